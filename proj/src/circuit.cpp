#include "qlink/circuit.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace qlink {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double omega_fsr_rad_s(const ChannelParams& c) { return kTwoPi * c.fsr_mhz * 1e6; }
double omega_r_rad_s(const ChannelParams& c) { return kTwoPi * c.mode_freq_ghz * 1e9; }

}  // namespace

ModeRLC mode_rlc(const ChannelParams& channel, int n) {
  if (n < 1) throw std::invalid_argument("mode index must be >= 1");
  const double alpha_np = channel.alpha_db_per_m / kDbPerNeper;
  ModeRLC out;
  out.r_ohm = channel.z0_ohm * alpha_np * channel.length_m;
  out.l_h = 0.5 * channel.inductance_nh_per_m * 1e-9 * channel.length_m;
  const double wn = n * omega_fsr_rad_s(channel);
  out.c_f = 1.0 / (wn * wn * out.l_h);
  return out;
}

int operating_mode_index(const ChannelParams& channel) {
  return std::max(1, static_cast<int>(std::lround(
                         channel.mode_freq_ghz * 1e3 / channel.fsr_mhz)));
}

double implied_intrinsic_t1r_ns(const ChannelParams& channel) {
  const ModeRLC m = mode_rlc(channel, operating_mode_index(channel));
  return m.l_h / m.r_ohm * 1e9;
}

EffectiveLoad effective_load(double t1r_ns, double t1r_int_ns, double lr_h) {
  if (t1r_ns <= 0.0 || t1r_int_ns <= 0.0)
    throw std::invalid_argument("lifetimes must be positive");
  if (t1r_ns > t1r_int_ns * (1.0 + 1e-12))
    throw std::invalid_argument("T1r exceeds the intrinsic lifetime (negative external loss)");
  const double ext_rate = 1.0 / t1r_ns - 1.0 / t1r_int_ns;  // 1/ns
  if (ext_rate <= 0.0) return {kInf, 0.0};
  const double t_ext_s = 1e-9 / ext_rate;
  return {1.0 / ext_rate, lr_h / t_ext_s};
}

LoadingNetwork make_loading_network(const DeviceParams& device, double t1r_ns) {
  const ChannelParams& chan = device.channel;
  LoadingNetwork n;
  n.cq_f = device.coupler.cq_ff * 1e-15;
  n.lq_h = device.q1.lq_nh * 1e-9;
  n.lg_h = device.coupler.lg_nh * 1e-9;
  n.ls_h = device.coupler.ls_nh * 1e-9;
  n.omega_r = omega_r_rad_s(chan);
  const ModeRLC mode = mode_rlc(chan, operating_mode_index(chan));
  n.lr_h = mode.l_h;
  // Resonate the lumped mode at the operating frequency rather than at the
  // ideal n * w_fsr grid point.
  n.cr_f = 1.0 / (n.omega_r * n.omega_r * n.lr_h);
  n.rn_ohm = mode.r_ohm;
  n.r_load_ohm = effective_load(t1r_ns, chan.t1r_int_ns, n.lr_h).r_ohm;
  return n;
}

Complex network_impedance(const LoadingNetwork& nw, double lt_eff_h, double omega) {
  // Narrowband evaluation: the mode branch reactance varies on the MHz scale
  // of the detuning while every other element is flat there, so the ladder
  // sits at the carrier and the series branch is linearized to 2 L_r dw.
  // The response is taken even in the detuning (|dw|); the sign asymmetry of
  // the full ladder is below the fidelity of the element values anyway.
  const Complex jw(0.0, nw.omega_r);
  auto parallel = [](Complex a, Complex b) { return a * b / (a + b); };
  const double dw = std::abs(omega - nw.omega_r);
  const Complex z_mode = nw.rn_ohm + Complex(0.0, 2.0 * nw.lr_h * dw);
  Complex z = (nw.r_load_ohm > 0.0) ? parallel(Complex(nw.r_load_ohm, 0.0), z_mode)
                                    : z_mode;
  z += jw * nw.ls_h;
  z = parallel(jw * nw.lg_h, z);
  z += jw * lt_eff_h;
  z = parallel(jw * nw.lg_h, z);
  return z;
}

namespace {

// Node order: A (qubit/bridge left), D (inside qubit branch), B (bridge
// right), C (load node), E (inside mode branch).
constexpr int kNodeA = 0, kNodeD = 1, kNodeB = 2, kNodeC = 3, kNodeE = 4;

void stamp_inductor(Eigen::MatrixXd& gamma, int i, int j, double l_h) {
  const double g = 1.0 / l_h;
  if (i >= 0) gamma(i, i) += g;
  if (j >= 0) gamma(j, j) += g;
  if (i >= 0 && j >= 0) {
    gamma(i, j) -= g;
    gamma(j, i) -= g;
  }
}

void stamp_capacitor(Eigen::MatrixXd& cmat, int i, int j, double c_f) {
  if (i >= 0) cmat(i, i) += c_f;
  if (j >= 0) cmat(j, j) += c_f;
  if (i >= 0 && j >= 0) {
    cmat(i, j) -= c_f;
    cmat(j, i) -= c_f;
  }
}

// The two resonant frequencies (rad/s) of the lossless network with a given
// effective bridge inductance and qubit branch inductance.
std::pair<double, double> network_resonances(const LoadingNetwork& nw, double lt_eff_h,
                                             double lq_h) {
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(5, 5);
  Eigen::MatrixXd cmat = Eigen::MatrixXd::Zero(5, 5);
  stamp_capacitor(cmat, kNodeA, kNodeD, nw.cq_f);
  stamp_inductor(gamma, kNodeD, -1, lq_h);
  stamp_inductor(gamma, kNodeA, -1, nw.lg_h);
  stamp_inductor(gamma, kNodeA, kNodeB, lt_eff_h);
  stamp_inductor(gamma, kNodeB, -1, nw.lg_h);
  stamp_inductor(gamma, kNodeB, kNodeC, nw.ls_h);
  stamp_inductor(gamma, kNodeC, kNodeE, nw.lr_h);
  stamp_capacitor(cmat, kNodeE, -1, nw.cr_f);

  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> qz(gamma, cmat, false);
  std::vector<double> freqs;
  for (int k = 0; k < 5; ++k) {
    const double beta = qz.betas()[k];
    if (std::abs(beta) < 1e-12 * cmat.norm()) continue;  // infinite eigenvalue
    const Complex lambda = qz.alphas()[k] / beta;
    if (std::abs(lambda.imag()) > 1e-6 * std::abs(lambda.real())) continue;
    if (lambda.real() <= 0.0) continue;
    freqs.push_back(std::sqrt(lambda.real()));
  }
  if (freqs.size() != 2)
    throw CircuitModelError("loading network does not have two resonant modes");
  std::sort(freqs.begin(), freqs.end());
  return {freqs[0], freqs[1]};
}

double splitting(const LoadingNetwork& nw, double lt_eff_h, double lq_h) {
  const auto [lo, hi] = network_resonances(nw, lt_eff_h, lq_h);
  return hi - lo;
}

// Minimum splitting over the qubit inductance: the avoided-crossing gap,
// equal to twice the coupling.
double min_splitting(const LoadingNetwork& nw, double lt_eff_h) {
  const double lq0 = 1.0 / (nw.omega_r * nw.omega_r * nw.cq_f);
  double a = 0.6 * lq0, b = 1.6 * lq0;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = splitting(nw, lt_eff_h, x1), f2 = splitting(nw, lt_eff_h, x2);
  for (int it = 0; it < 90 && (b - a) > 1e-9 * lq0; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = splitting(nw, lt_eff_h, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = splitting(nw, lt_eff_h, x2);
    }
  }
  return std::min(f1, f2);
}

}  // namespace

double coupling_from_bridge(const LoadingNetwork& network, double lt_eff_h) {
  if (lt_eff_h <= -2.0 * network.lg_h)
    throw CircuitModelError("bridge inductance beyond the divergent-coupling point");
  return 0.5 * min_splitting(network, lt_eff_h);
}

double calibrate_bridge(const LoadingNetwork& network, double g_rad_s) {
  if (g_rad_s <= 0.0) throw std::invalid_argument("coupling must be positive");
  // g decreases monotonically with the effective bridge inductance.
  double lo = -1.9 * network.lg_h;  // strong-coupling end
  double hi = 200e-9;               // essentially decoupled
  double g_lo = coupling_from_bridge(network, lo);
  double g_hi = coupling_from_bridge(network, hi);
  if (g_rad_s > g_lo || g_rad_s < g_hi)
    throw CircuitModelError("requested coupling outside the bridge tuning range");
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double g_mid = coupling_from_bridge(network, mid);
    if (g_mid >= g_rad_s) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
      g_hi = g_mid;
    }
    if (std::abs(g_mid - g_rad_s) < 1e-6 * g_rad_s) break;
  }
  return 0.5 * (lo + hi);
}

double loaded_q1_t1_ns(const LoadingNetwork& network, double delta_omega1_rad_s,
                       double g1_rad_s) {
  if (network.r_load_ohm <= 0.0) return kInf;  // no external dissipation
  if (g1_rad_s <= 0.0) return kInf;            // coupler off
  const double lt = calibrate_bridge(network, g1_rad_s);
  const double omega_q = network.omega_r + delta_omega1_rad_s;
  const Complex z = network_impedance(network, lt, omega_q);
  const double re = z.real();
  if (!(re > 0.0))
    throw CircuitModelError("nonphysical network impedance Re[Z] <= 0");
  return network.lq_h / re * 1e9;
}

double proximity_loading_t1_ns(const DeviceParams& device, double t1r_ns,
                               double g1_rad_s, double delta_omega1_rad_s) {
  const LoadingNetwork here = make_loading_network(device, t1r_ns);
  if (here.r_load_ohm <= 0.0) return std::numeric_limits<double>::infinity();
  // Calibration point: the strongest loss setting the switch reaches.
  const double t1r_max_loss = 28.7;
  const LoadingNetwork anchor =
      make_loading_network(device, std::min(t1r_ns, t1r_max_loss));
  const double t1_anchor = loaded_q1_t1_ns(anchor, delta_omega1_rad_s, g1_rad_s);
  if (!std::isfinite(t1_anchor)) return std::numeric_limits<double>::infinity();
  // Load participation across loss settings: the mode branch limits how much
  // of the load the qubit can see, so the effective dissipation scales as
  // R_L in parallel with the branch impedance at the residual detuning.
  // Monotone in the loss setting, exact at the calibration point.
  const double z_mode =
      std::hypot(anchor.rn_ohm, 2.0 * anchor.lr_h * std::abs(delta_omega1_rad_s));
  auto participation = [&](double r) { return r * z_mode / (r + z_mode); };
  return t1_anchor * participation(anchor.r_load_ohm) / participation(here.r_load_ohm);
}

T1Table::T1Table(std::vector<double> g1_grid, std::vector<double> dw_grid,
                 std::vector<double> t1_ns)
    : g1_(std::move(g1_grid)), dw_(std::move(dw_grid)), t1_(std::move(t1_ns)) {
  if (g1_.empty() || dw_.empty() || t1_.size() != g1_.size() * dw_.size())
    throw std::invalid_argument("inconsistent T1 table shape");
  if (!std::is_sorted(g1_.begin(), g1_.end()) || !std::is_sorted(dw_.begin(), dw_.end()))
    throw std::invalid_argument("table grids must be sorted");
}

namespace {

// Index of the cell containing x, and the interpolation weight within it.
std::pair<std::size_t, double> bracket(const std::vector<double>& grid, double x) {
  if (grid.size() == 1) return {0, 0.0};
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  std::size_t hi = std::clamp<std::size_t>(it - grid.begin(), 1, grid.size() - 1);
  const std::size_t lo = hi - 1;
  const double span = grid[hi] - grid[lo];
  const double w = span > 0.0 ? std::clamp((x - grid[lo]) / span, 0.0, 1.0) : 0.0;
  return {lo, w};
}

}  // namespace

double T1Table::lookup(double g1_rad_s, double dw_rad_s) const {
  const auto [i, wi] = bracket(g1_, g1_rad_s);
  const auto [j, wj] = bracket(dw_, dw_rad_s);
  const std::size_t i1 = std::min(i + 1, g1_.size() - 1);
  const std::size_t j1 = std::min(j + 1, dw_.size() - 1);
  const double v00 = at(i, j), v01 = at(i, j1), v10 = at(i1, j), v11 = at(i1, j1);
  return (1.0 - wi) * ((1.0 - wj) * v00 + wj * v01) + wi * ((1.0 - wj) * v10 + wj * v11);
}

T1Table t1_lookup_table(const LoadingNetwork& network, std::span<const double> g1_grid,
                        std::span<const double> dw_grid) {
  if (g1_grid.empty() || dw_grid.empty())
    throw std::invalid_argument("table grids must be non-empty");
  std::vector<double> values;
  values.reserve(g1_grid.size() * dw_grid.size());
  for (double g1 : g1_grid) {
    // One bridge calibration per coupling row.
    double lt = 0.0;
    const bool off = (g1 <= 0.0) || network.r_load_ohm <= 0.0;
    if (!off) lt = calibrate_bridge(network, g1);
    for (double dw : dw_grid) {
      if (off) {
        values.push_back(kInf);
        continue;
      }
      const Complex z = network_impedance(network, lt, network.omega_r + dw);
      const double re = z.real();
      if (!(re > 0.0)) throw CircuitModelError("nonphysical network impedance in table");
      values.push_back(network.lq_h / re * 1e9);
    }
  }
  return T1Table(std::vector<double>(g1_grid.begin(), g1_grid.end()),
                 std::vector<double>(dw_grid.begin(), dw_grid.end()), std::move(values));
}

}  // namespace qlink
