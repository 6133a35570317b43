#include "qlink/schedules.hpp"

#include "qlink/statespace.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>

using namespace qlink;

namespace {
constexpr double kPi = std::numbers::pi;
double mhz(double f) { return kTwoPi * f * 1e-3; }  // -> rad/ns
}  // namespace

TEST_CASE("adiabatic coupling endpoints and midpoint") {
  const double gbar = mhz(15.0);
  const double tf = 132.0;

  const Couplings start = adiabatic_couplings(gbar, tf, 0.0);
  CHECK(start.g1 == doctest::Approx(0.0));
  CHECK(start.g2 == doctest::Approx(gbar));

  const Couplings end = adiabatic_couplings(gbar, tf, tf);
  CHECK(end.g1 == doctest::Approx(gbar));
  CHECK(std::abs(end.g2) < 1e-12);

  const Couplings mid = adiabatic_couplings(gbar, tf, 0.5 * tf);
  CHECK(mid.g1 == doctest::Approx(gbar / std::sqrt(2.0)));
  CHECK(mid.g2 == doctest::Approx(gbar / std::sqrt(2.0)));

  // t = 33 ns: g1/2pi = 15 sin(pi/8) MHz = 5.74 MHz.
  const Couplings q = adiabatic_couplings(gbar, tf, 33.0);
  CHECK(q.g1 / kTwoPi * 1e3 == doctest::Approx(15.0 * std::sin(kPi / 8.0)).epsilon(1e-12));
  CHECK(q.g1 / kTwoPi * 1e3 == doctest::Approx(5.7403).epsilon(1e-4));

  CHECK_THROWS(adiabatic_couplings(gbar, tf, -1.0));
  CHECK_THROWS(adiabatic_couplings(gbar, tf, tf + 1.0));
}

TEST_CASE("parallel adiabatic passage keeps gbar constant") {
  const double gbar = mhz(21.3);
  const double tf = 97.0;
  for (int k = 0; k <= 400; ++k) {
    const double t = tf * k / 400.0;
    const Couplings c = adiabatic_couplings(gbar, tf, t);
    CHECK(std::abs(std::hypot(c.g1, c.g2) - gbar) < 1e-12 * gbar);
  }
}

TEST_CASE("adiabaticity integral") {
  Schedule s;
  s.protocol = Protocol::AdiabaticTransfer;
  s.gbar = mhz(15.0);
  s.t_f = 132.0;
  // 2pi * 15 MHz * 132 ns = 3.96 pi exactly.
  CHECK(adiabaticity_integral(s) == doctest::Approx(3.96 * kPi).epsilon(1e-12));
  CHECK(meets_adiabatic_threshold(s));

  // Threshold case: gbar * tf = 3 pi / 2 exactly.
  Schedule edge;
  edge.protocol = Protocol::AdiabaticTransfer;
  edge.gbar = 1.5 * kPi / 100.0;
  edge.t_f = 100.0;
  CHECK(adiabaticity_integral(edge) == doctest::Approx(1.5 * kPi).epsilon(1e-15));
  CHECK(meets_adiabatic_threshold(edge));
  edge.gbar *= 0.999;
  CHECK_FALSE(meets_adiabatic_threshold(edge));

  Schedule relay;
  relay.protocol = Protocol::RelayTransfer;
  relay.relay_g = mhz(5.0);
  CHECK_THROWS(adiabaticity_integral(relay));
}

TEST_CASE("quadrature matches the closed form for a non-constant envelope") {
  // g1 = t, g2 = 1: integral of sqrt(1 + t^2) = (t sqrt(1+t^2) + asinh t)/2.
  auto couplings = [](double t) { return Couplings{t, 1.0}; };
  const double t1 = 2.0;
  const double numeric = coupling_norm_integral(couplings, 0.0, t1, 4096);
  const double analytic = 0.5 * (t1 * std::sqrt(1.0 + t1 * t1) + std::asinh(t1));
  CHECK(numeric == doctest::Approx(analytic).epsilon(1e-9));

  // And the constant-gbar program agrees with gbar * tf.
  Schedule s;
  s.protocol = Protocol::AdiabaticTransfer;
  s.gbar = mhz(15.0);
  s.t_f = 132.0;
  auto pap = [&](double t) { return s.at(t); };
  CHECK(coupling_norm_integral(pap, 0.0, s.t_f) ==
        doctest::Approx(adiabaticity_integral(s)).epsilon(1e-10));
}

TEST_CASE("dark state return times") {
  const double gbar = mhz(15.0);
  const auto times = dark_state_return_times(gbar, 3);
  REQUIRE(times.size() == 3);
  CHECK(times[1] == doctest::Approx(132.2875).epsilon(1e-4));  // n = 2
  CHECK(times[0] == doctest::Approx(64.5497).epsilon(1e-4));   // n = 1

  // Homogeneity: doubling gbar halves every entry.
  const auto twice = dark_state_return_times(2.0 * gbar, 3);
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(twice[i] == doctest::Approx(0.5 * times[i]).epsilon(1e-12));

  CHECK_THROWS(dark_state_return_times(0.0, 2));
  CHECK_THROWS(dark_state_return_times(gbar, 0));
}

TEST_CASE("relay segments") {
  const double g = mhz(5.0);
  CHECK(relay_swap_time(g) == doctest::Approx(50.0).epsilon(1e-12));

  Schedule full;
  full.protocol = Protocol::RelayTransfer;
  full.relay_g = g;
  CHECK(full.duration() == doctest::Approx(100.0));
  CHECK(full.breakpoints().size() == 1);
  CHECK(full.breakpoints()[0] == doctest::Approx(50.0));

  // Segment 1 drives only g1; right-continuous switch at the boundary.
  CHECK(full.at(10.0).g1 == doctest::Approx(g));
  CHECK(full.at(10.0).g2 == 0.0);
  CHECK(full.at(50.0).g1 == 0.0);
  CHECK(full.at(50.0).g2 == doctest::Approx(g));
  CHECK(full.at(99.0).g2 == doctest::Approx(g));
  CHECK_THROWS(full.at(101.0));

  Schedule half;
  half.protocol = Protocol::RelayHalf;
  half.relay_g = g;
  CHECK(half.duration() == doctest::Approx(75.0));
  CHECK(half.breakpoints()[0] == doctest::Approx(25.0));
  CHECK(half.at(24.0).g1 == doctest::Approx(g));
  CHECK(half.at(26.0).g2 == doctest::Approx(g));
}

TEST_CASE("half program stops at the midpoint angle") {
  Schedule s;
  s.protocol = Protocol::AdiabaticHalf;
  s.gbar = mhz(15.0);
  s.t_f = 132.0;
  CHECK(s.duration() == doctest::Approx(66.0));
  const Couplings c = s.at(s.duration());
  CHECK(c.g1 == doctest::Approx(c.g2).epsilon(1e-12));  // theta = pi/4
}

TEST_CASE("switch-off ramp holds the mixing angle and ends at zero") {
  Schedule s;
  s.protocol = Protocol::AdiabaticHalf;
  s.gbar = mhz(15.0);
  s.t_f = 132.0;
  s.ramp_off_ns = 30.0;
  CHECK(s.duration() == doctest::Approx(96.0));

  // Continuous at the hold point.
  const Couplings hold = s.at(66.0);
  const Couplings just_after = s.at(66.0 + 1e-6);
  CHECK(just_after.g1 == doctest::Approx(hold.g1).epsilon(1e-6));

  for (double t : {70.0, 81.0, 90.0}) {
    const Couplings c = s.at(t);
    CHECK(c.g1 == doctest::Approx(c.g2).epsilon(1e-12));  // frozen theta
    CHECK(std::hypot(c.g1, c.g2) < s.gbar);
  }
  const Couplings end = s.at(96.0);
  CHECK(std::abs(end.g1) < 1e-12);
  CHECK(std::abs(end.g2) < 1e-12);
}
