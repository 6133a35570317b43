#pragma once

#include "qlink/model.hpp"

#include <span>
#include <stdexcept>
#include <vector>

// Lumped-element models of the communication channel and of the parasitic
// loading of Q1 through the loss switch. This module works in SI units
// (ohm, henry, farad, rad/s); callers convert from the device-parameter
// units at the boundary.

namespace qlink {

class CircuitModelError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// dB -> Np conversion, 20 / ln(10).
inline constexpr double kDbPerNeper = 8.685889638065035;

struct ModeRLC {
  double r_ohm = 0.0;
  double l_h = 0.0;
  double c_f = 0.0;
};

// Series RLC equivalent of standing mode n >= 1:
// R = Z0 alpha_Np l, L = (1/2) L' l, C = 1 / (w_n^2 L) with w_n = n w_fsr.
ModeRLC mode_rlc(const ChannelParams& channel, int n);

// Mode index closest to the operating frequency.
int operating_mode_index(const ChannelParams& channel);

// L_n / R_n, the lifetime implied by the line's propagation loss, in ns.
double implied_intrinsic_t1r_ns(const ChannelParams& channel);

struct EffectiveLoad {
  double t1r_ext_ns = 0.0;  // +inf when the mode is loss-free externally
  double r_ohm = 0.0;
};

// External part of the mode decay, 1/T_ext = 1/T1r - 1/T1r_int, and the
// equivalent load resistance R = L_r / T_ext. Throws when T1r > T1r_int.
EffectiveLoad effective_load(double t1r_ns, double t1r_int_ns, double lr_h);

// One port of the parasitic-loading calculation: the qubit branch is a
// series C_q - L_q to ground; it faces a pi bridge (shunt L_g, series L_T,
// shunt L_g), a stub L_s, and finally the load node where R_load sits in
// parallel with the series mode branch R_n - L_r - C_r.
struct LoadingNetwork {
  double cq_f = 0.0;
  double lq_h = 0.0;       // inductance used in T1 = L_q / Re[Z]
  double lg_h = 0.0;
  double ls_h = 0.0;
  double lr_h = 0.0;
  double cr_f = 0.0;
  double rn_ohm = 0.0;     // mode series resistance; 0 gives the idealized network
  double r_load_ohm = 0.0;
  double omega_r = 0.0;    // rad/s
};

// Builds the network for a given channel loss setting (T1r in ns).
LoadingNetwork make_loading_network(const DeviceParams& device, double t1r_ns);

// Input impedance seen by the qubit branch at angular frequency w, with the
// bridge set to the given effective junction inductance.
Complex network_impedance(const LoadingNetwork& network, double lt_eff_h, double omega);

// Qubit-mode coupling g (rad/s) realized by an effective bridge inductance.
// Computed from the vacuum-Rabi splitting of the lossless network, with the
// qubit branch tuned onto resonance. The effective junction inductance of a
// flux-biased bridge may be negative.
double coupling_from_bridge(const LoadingNetwork& network, double lt_eff_h);

// Inverse map: effective bridge inductance realizing the requested coupling.
double calibrate_bridge(const LoadingNetwork& network, double g_rad_s);

// Loaded Q1 lifetime T1 = L_q / Re[Z(dw1)] in ns, with the bridge set for
// coupling g1. Returns +inf when there is no external load (R = 0) or the
// coupler is off (g1 = 0).
double loaded_q1_t1_ns(const LoadingNetwork& network, double delta_omega1_rad_s,
                       double g1_rad_s);

// Parasitic Q1 lifetime used by the dynamics for a given loss setting. The
// loading stems from the qubit's physical proximity to the switch, so its
// rate scales with the effective load participation R_L_eff across loss
// settings (strictly monotone, no impedance-matching artifacts); the scale
// is calibrated once against the full network at maximum loss with the
// operating coupling and residual detuning. Returns +inf when the mode has
// no external loss.
double proximity_loading_t1_ns(const DeviceParams& device, double t1r_ns,
                               double g1_rad_s, double delta_omega1_rad_s);

// Tabulated T1(g1, dw1) with bilinear interpolation; degenerate axes give
// constant interpolation. Grid values are rad/s, entries ns.
class T1Table {
 public:
  T1Table(std::vector<double> g1_grid, std::vector<double> dw_grid,
          std::vector<double> t1_ns);
  double lookup(double g1_rad_s, double dw_rad_s) const;
  const std::vector<double>& g1_grid() const { return g1_; }
  const std::vector<double>& dw_grid() const { return dw_; }
  double at(std::size_t i, std::size_t j) const { return t1_[i * dw_.size() + j]; }

 private:
  std::vector<double> g1_;
  std::vector<double> dw_;
  std::vector<double> t1_;  // row-major [g1][dw]
};

T1Table t1_lookup_table(const LoadingNetwork& network, std::span<const double> g1_grid,
                        std::span<const double> dw_grid);

}  // namespace qlink
