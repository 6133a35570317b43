#pragma once

#include "qlink/statespace.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

// Readout-error correction, quantum state / process tomography by linear
// inversion, and the fidelity, distance, and entanglement metrics.
//
// Two-qubit probability vectors are ordered (gg, ge, eg, ee) with the first
// letter referring to Q1. The process matrix chi is expressed in the Pauli
// basis {I, X, Y, Z} and normalized to unit trace for trace-preserving maps,
// so chi matrices are comparable entry by entry across implementations.

namespace qlink {

class AssignmentMatrix {
 public:
  // Columns are prepared states, rows assigned outcomes. Columns must sum to
  // one; set renormalize to absorb rounding in measured matrices. Warns on
  // stderr when the condition number exceeds 1e3.
  static AssignmentMatrix from_matrix(const Eigen::Matrix4d& m, bool renormalize = false);
  // Uncorrelated model built from per-qubit readout fidelities.
  static AssignmentMatrix from_fidelities(double f_g1, double f_e1, double f_g2,
                                          double f_e2);
  static AssignmentMatrix identity();

  const Eigen::Matrix4d& matrix() const { return m_; }
  double condition_number() const;

 private:
  AssignmentMatrix() = default;
  Eigen::Matrix4d m_ = Eigen::Matrix4d::Identity();
};

// Euclidean projection onto the probability simplex.
Eigen::Vector4d project_to_simplex(const Eigen::Vector4d& v);

// Readout correction through linear inversion, followed by simplex
// projection (set project = false to keep the raw inverted values for
// corrected-vs-uncorrected comparisons).
Eigen::Vector4d correct_readout(const Eigen::Vector4d& raw_probs,
                                const AssignmentMatrix& m, bool project = true);

// Tomography gate set {I, Rx(pi/2), Ry(pi/2)} per qubit.
enum class TomoGate : std::uint8_t { I = 0, Xhalf = 1, Yhalf = 2 };

struct TomographySettings {
  // Azimuthal correction applied to Q2's tomography frame; removes the
  // deterministic phase accumulated on Q2 during a transfer sequence.
  double phi_q2 = 0.0;
};

Matrix gate_unitary(TomoGate g);
// Q2 gate with its rotation axis turned by phi in the equatorial plane.
Matrix gate_unitary_q2(TomoGate g, double phi);

struct MeasurementRecord {
  TomoGate gate_q1 = TomoGate::I;
  TomoGate gate_q2 = TomoGate::I;
  Eigen::Vector4d probs = Eigen::Vector4d::Zero();  // (gg, ge, eg, ee)
};

struct SyntheticNoise {
  std::optional<AssignmentMatrix> readout;  // forward model applied to probabilities
  long shots = 0;                           // 0 = exact expectation values
  std::uint64_t seed = 0;
};

// Measurement data for the full 3x3 gate-set product on a two-qubit state.
std::vector<MeasurementRecord> simulate_measurements(
    const DensityMatrix& two_qubit_state, const SyntheticNoise& noise = {});

// Nearest-physical projection: Hermitize, clip negative eigenvalues, rescale
// the trace to one. Idempotent; leaves physical inputs untouched.
Matrix project_to_physical(const Matrix& m);

// Linear-inversion state estimate from the nine gate settings, readout
// corrected upstream. Throws unless all nine settings are present.
DensityMatrix state_tomography(const std::vector<MeasurementRecord>& records,
                               const TomographySettings& settings = {});

struct ProcessMatrix {
  Matrix chi;  // 4x4, Pauli basis {I, X, Y, Z}
};

// The four standard preparations |g>, (|g>+|e>)/sqrt2, (|g>+i|e>)/sqrt2, |e>.
std::array<Matrix, 4> standard_process_inputs();

// chi by linear inversion from input/output pairs, physicality projected.
ProcessMatrix process_tomography(const std::array<Matrix, 4>& input_states,
                                 const std::array<Matrix, 4>& output_states);

// Applies chi to a state: sum_mn chi_mn P_m rho P_n.
Matrix apply_process(const ProcessMatrix& chi, const Matrix& rho);

ProcessMatrix identity_process();

// F = Tr(chi * chi_ideal).
double process_fidelity(const ProcessMatrix& chi, const ProcessMatrix& chi_ideal);

// sqrt(Tr[(a - b)^2]) for Hermitian chi matrices.
double trace_distance_chi(const ProcessMatrix& a, const ProcessMatrix& b);

// <psi| rho |psi>.
double state_fidelity(const DensityMatrix& rho, const Vector& psi);

// Ideal Bell singlet (|eg> - |ge>)/sqrt(2) on the two-qubit layout.
Vector bell_singlet();

// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix& rho);

// <sigma_i sigma_j> table, i, j in {I, X, Y, Z}.
Eigen::Matrix4d pauli_expectations(const DensityMatrix& rho);

}  // namespace qlink
