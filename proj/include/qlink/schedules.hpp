#pragma once

#include <functional>
#include <vector>

// Time-dependent coupling programs. All couplings are angular frequencies in
// rad/ns; durations are in ns. Configuration files quote couplings as
// frequencies (g/2pi in MHz) and are converted at ingestion.

namespace qlink {

enum class Protocol {
  AdiabaticTransfer,  // g1 = gbar sin(pi t / 2 tf), g2 = gbar cos(pi t / 2 tf)
  AdiabaticHalf,      // same program stopped at tf/2 (Bell state generation)
  RelayTransfer,      // two sequential full swaps through the resonant mode
  RelayHalf,          // half swap into the mode, then a full swap out
};

struct Couplings {
  double g1 = 0.0;
  double g2 = 0.0;
};

struct Schedule {
  Protocol protocol = Protocol::AdiabaticTransfer;
  double gbar = 0.0;     // rad/ns, effective coupling of the adiabatic program
  double t_f = 0.0;      // ns, full transfer time of the adiabatic program
  double relay_g = 0.0;  // rad/ns, qubit-mode coupling of the relay program
  // Coupler switch-off appended to the half-adiabatic program: both
  // couplings ramp to zero at frozen mixing angle with a raised-cosine
  // envelope. Slow against 1/w_fsr, so the virtual occupation of the
  // neighboring modes returns to the qubits before readout.
  double ramp_off_ns = 0.0;

  // Total schedule duration: tf (transfer), tf/2 + ramp (half), 2*tau or
  // 1.5*tau for the relay programs with tau = pi / (2 g).
  double duration() const;
  // Right-continuous coupling pair at time t in [0, duration()].
  Couplings at(double t) const;
  // Interior discontinuities (relay segment boundaries); empty for the
  // smooth adiabatic programs.
  std::vector<double> breakpoints() const;

  bool is_adiabatic() const {
    return protocol == Protocol::AdiabaticTransfer || protocol == Protocol::AdiabaticHalf;
  }
  bool is_half() const {
    return protocol == Protocol::AdiabaticHalf || protocol == Protocol::RelayHalf;
  }
};

// Sine/cosine pair of the parallel adiabatic passage; sqrt(g1^2 + g2^2) is
// gbar for every t. Throws if t is outside [0, t_f].
Couplings adiabatic_couplings(double gbar, double t_f, double t);

// Piecewise-constant relay couplings. Full swap time is tau = pi / (2 g);
// the half variant uses tau/2 for the first segment. Throws if t is outside
// the total duration.
Couplings relay_couplings(double g, double t, bool half);

double relay_swap_time(double g);

// Integral of gbar(t) over the protocol, in radians. For the constant-gbar
// adiabatic program this equals gbar * t_f (or gbar * t_f / 2 for the half
// program). Throws for relay schedules.
double adiabaticity_integral(const Schedule& schedule);

// Minimum pulse area for efficient adiabatic transfer; integrals below this
// warrant a diagnostic.
inline constexpr double kAdiabaticThreshold = 4.71238898038468985769;  // 3 pi / 2

bool meets_adiabatic_threshold(const Schedule& schedule);

// Transfer times at which the dark state returns exactly,
// t_n = (2 pi / gbar) sqrt(n^2 - 1/16) for n = 1..n_max.
std::vector<double> dark_state_return_times(double gbar, int n_max);

// Composite Simpson quadrature of sqrt(g1(t)^2 + g2(t)^2); used to check
// non-analytic coupling programs against the closed form.
double coupling_norm_integral(const std::function<Couplings(double)>& couplings,
                              double t0, double t1, int intervals = 2048);

}  // namespace qlink
