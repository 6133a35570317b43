#pragma once

#include "qlink/schedules.hpp"
#include "qlink/statespace.hpp"

#include <Eigen/SparseCore>

// Hamiltonian of two qubits coupled to 2N+1 channel standing modes in the
// rotating frame of the central mode:
//
//   H = dw1 s1+s1 + dw2 s2+s2 + sum_n D_n an+an
//       + sum_n g1(t) (s1 an+ + s1+ an) + sum_n g2(t) (-1)^n (s2 an+ + s2+ an)
//
// with D_n = n * w_fsr. Q2's coupling alternates sign with the mode parity.
// Couplings are identical for every mode. Internally all frequencies are
// angular (rad/ns); configuration values are quoted as f = w/2pi.

namespace qlink {

struct QubitParams {
  double omega_idle_ghz = 0.0;
  double t1_int_us = 0.0;
  double t2_ramsey_us = 0.0;
  double t2_echo_us = 0.0;
  double readout_f_g = 1.0;  // P(assign g | prepared g)
  double readout_f_e = 1.0;  // P(assign e | prepared e)
  double lq_nh = 0.0;        // SQUID inductance
  double anharmonicity_mhz = 0.0;  // stored for completeness, not simulated
};

struct ChannelParams {
  double z0_ohm = 50.0;
  double alpha_db_per_m = 0.0;       // propagation loss
  double inductance_nh_per_m = 0.0;  // per unit length
  double length_m = 0.0;
  double fsr_mhz = 0.0;              // free spectral range, w_fsr / 2pi
  double mode_freq_ghz = 0.0;        // operating standing-mode frequency
  double t1r_int_ns = 0.0;           // intrinsic mode lifetime
};

struct CouplerParams {
  double cq_ff = 0.0;  // qubit shunt capacitance
  double lt_nh = 0.0;  // bridge junction inductance (zero-bias value)
  double lg_nh = 0.0;  // bridge grounding inductance
  double ls_nh = 0.0;  // stub between the bridge and the load node
};

struct DeviceParams {
  QubitParams q1;
  QubitParams q2;
  ChannelParams channel;
  CouplerParams coupler;

  void validate() const;  // throws on out-of-range values
  double fsr_rad_per_ns() const { return kTwoPi * channel.fsr_mhz * 1e-3; }
};

struct HamiltonianModel {
  SpaceLayout layout;
  double detuning_q1 = 0.0;             // rad/ns
  double detuning_q2 = 0.0;             // rad/ns
  std::vector<double> mode_detunings;   // rad/ns, modes -N..N ascending
  Schedule schedule;
};

// Model with D_n = n * w_fsr exactly and the given qubit detunings.
HamiltonianModel make_hamiltonian_model(const SpaceLayout& layout,
                                        double fsr_rad_per_ns, Schedule schedule,
                                        double detuning_q1 = 0.0,
                                        double detuning_q2 = 0.0);

// Static pieces of H(t) = diag + g1(t) V1 + g2(t) V2 for either layout kind.
struct HamiltonianTerms {
  RealVector detuning_diag;                 // rad/ns per basis state
  Eigen::SparseMatrix<double> v1;           // Q1-channel coupling pattern
  Eigen::SparseMatrix<double> v2;           // Q2-channel pattern, parity signs included
};

HamiltonianTerms hamiltonian_terms(const HamiltonianModel& model);

// Dense H(t); intended for tests and small spaces. Throws if t lies outside
// the schedule or the dense dimension cap is exceeded.
Operator build_hamiltonian(const HamiltonianModel& model, double t);

// Resonant three-state Hamiltonian on {|e0g>, |g1g>, |g0e>}.
Matrix single_excitation_hamiltonian(double g1, double g2);

// cos(theta)|e0g> - sin(theta)|g0e>, the zero-energy transfer vehicle.
Vector dark_state(double theta);

struct EigenStructure {
  RealVector energies;   // ascending: -gbar, 0, +gbar on resonance
  Matrix states;         // columns match energies
  double mixing_angle = 0.0;  // tan(theta) = g1/g2, theta in [0, pi/2]
  double gbar = 0.0;
};

// Eigenstructure of single_excitation_hamiltonian; the bright states sit at
// +-gbar = +-sqrt(g1^2 + g2^2).
EigenStructure eigen_splitting(double g1, double g2);

}  // namespace qlink
