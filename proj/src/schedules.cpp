#include "qlink/schedules.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlink {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTimeSlack = 1e-9;  // ns, tolerance for endpoint queries
}  // namespace

Couplings adiabatic_couplings(double gbar, double t_f, double t) {
  if (t_f <= 0.0) throw std::invalid_argument("transfer time must be positive");
  if (t < -kTimeSlack || t > t_f + kTimeSlack)
    throw std::out_of_range("time outside adiabatic schedule");
  t = std::clamp(t, 0.0, t_f);
  const double phase = kPi * t / (2.0 * t_f);
  return {gbar * std::sin(phase), gbar * std::cos(phase)};
}

double relay_swap_time(double g) {
  if (g <= 0.0) throw std::invalid_argument("relay coupling must be positive");
  return kPi / (2.0 * g);
}

Couplings relay_couplings(double g, double t, bool half) {
  const double tau = relay_swap_time(g);
  const double first = half ? 0.5 * tau : tau;
  const double total = first + tau;
  if (t < -kTimeSlack || t > total + kTimeSlack)
    throw std::out_of_range("time outside relay schedule");
  // Right-continuous at the segment boundary.
  if (t < first) return {g, 0.0};
  return {0.0, g};
}

double Schedule::duration() const {
  switch (protocol) {
    case Protocol::AdiabaticTransfer:
      return t_f;
    case Protocol::AdiabaticHalf:
      return 0.5 * t_f + ramp_off_ns;
    case Protocol::RelayTransfer:
      return 2.0 * relay_swap_time(relay_g);
    case Protocol::RelayHalf:
      return 1.5 * relay_swap_time(relay_g);
  }
  throw std::logic_error("unknown protocol");
}

Couplings Schedule::at(double t) const {
  switch (protocol) {
    case Protocol::AdiabaticTransfer: {
      if (t < -kTimeSlack || t > duration() + kTimeSlack)
        throw std::out_of_range("time outside schedule");
      return adiabatic_couplings(gbar, t_f, std::clamp(t, 0.0, duration()));
    }
    case Protocol::AdiabaticHalf: {
      // Same sine/cosine pair stopped midway, then the switch-off ramp at
      // frozen theta = pi/4.
      if (t < -kTimeSlack || t > duration() + kTimeSlack)
        throw std::out_of_range("time outside schedule");
      const double t_hold = 0.5 * t_f;
      if (t <= t_hold || ramp_off_ns <= 0.0)
        return adiabatic_couplings(gbar, t_f, std::clamp(t, 0.0, t_hold));
      const double s = std::clamp((t - t_hold) / ramp_off_ns, 0.0, 1.0);
      const double envelope = 0.5 * (1.0 + std::cos(kPi * s));
      const Couplings mid = adiabatic_couplings(gbar, t_f, t_hold);
      return {mid.g1 * envelope, mid.g2 * envelope};
    }
    case Protocol::RelayTransfer:
      return relay_couplings(relay_g, t, false);
    case Protocol::RelayHalf:
      return relay_couplings(relay_g, t, true);
  }
  throw std::logic_error("unknown protocol");
}

std::vector<double> Schedule::breakpoints() const {
  switch (protocol) {
    case Protocol::AdiabaticTransfer:
    case Protocol::AdiabaticHalf:
      return {};
    case Protocol::RelayTransfer:
      return {relay_swap_time(relay_g)};
    case Protocol::RelayHalf:
      return {0.5 * relay_swap_time(relay_g)};
  }
  throw std::logic_error("unknown protocol");
}

double adiabaticity_integral(const Schedule& schedule) {
  if (!schedule.is_adiabatic())
    throw std::invalid_argument("adiabaticity integral is defined for adiabatic schedules");
  // Parallel adiabatic passage keeps gbar constant, so the integral is exact.
  return schedule.gbar * schedule.duration();
}

bool meets_adiabatic_threshold(const Schedule& schedule) {
  return adiabaticity_integral(schedule) >= kAdiabaticThreshold;
}

std::vector<double> dark_state_return_times(double gbar, int n_max) {
  if (gbar <= 0.0) throw std::invalid_argument("gbar must be positive");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  std::vector<double> times;
  times.reserve(n_max);
  for (int n = 1; n <= n_max; ++n) {
    const double nn = static_cast<double>(n);
    times.push_back((2.0 * kPi / gbar) * std::sqrt(nn * nn - 1.0 / 16.0));
  }
  return times;
}

double coupling_norm_integral(const std::function<Couplings(double)>& couplings,
                              double t0, double t1, int intervals) {
  if (intervals < 2) throw std::invalid_argument("need at least two intervals");
  if (intervals % 2 != 0) ++intervals;
  auto norm = [&](double t) {
    const Couplings c = couplings(t);
    return std::hypot(c.g1, c.g2);
  };
  const double h = (t1 - t0) / intervals;
  double sum = norm(t0) + norm(t1);
  for (int k = 1; k < intervals; ++k) sum += norm(t0 + k * h) * (k % 2 == 0 ? 2.0 : 4.0);
  return sum * h / 3.0;
}

}  // namespace qlink
