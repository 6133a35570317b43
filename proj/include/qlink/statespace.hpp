#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

// Composite Hilbert space for two qubits coupled through a multimode channel.
//
// Canonical subsystem ordering is fixed: Q1, channel modes n = -N..N in
// ascending order, Q2. Every subsystem is two-level (qubit {|g>,|e>}, mode
// Fock states {|0>,|1>}). Basis index bits follow the subsystem order with
// Q1 as the most significant bit, so serialized states are portable.
//
// Two layout kinds are supported:
//   * TensorProduct: the full 2^(n_modes+2)-dimensional space.
//   * SingleExcitation: {|ground>, Q1 excited, one photon in mode n, Q2
//     excited}, dimension n_modes + 3. The Hamiltonian conserves excitation
//     number and every collapse operator maps this set into itself, so
//     dynamics started from at most one excitation stay exact here.

namespace qlink {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Largest dimension for which dense operators may be materialized (64 MB of
// complex doubles). Larger spaces must use the single-excitation layout.
inline constexpr std::int64_t kMaxDenseDimension = 2048;

enum class LayoutKind { TensorProduct, SingleExcitation };

enum class SubsystemRole { Qubit1, ChannelMode, Qubit2 };

struct Subsystem {
  SubsystemRole role = SubsystemRole::ChannelMode;
  int mode_number = 0;  // meaningful for ChannelMode only

  bool operator==(const Subsystem&) const = default;
};

class SpaceLayout {
 public:
  static constexpr int kQubitLevels = 2;
  static constexpr int kFockCutoff = 2;

  SpaceLayout() = default;

  // Full tensor-product space: Q1, modes -N..N, Q2.
  static SpaceLayout full(int n_side_modes);
  // Two-qubit space (Q1, Q2), used for tomography results.
  static SpaceLayout two_qubit();
  // Single-excitation space with a ground-state sink, dimension 2N+4.
  static SpaceLayout single_excitation(int n_side_modes);
  // Tensor-product layout over an explicit subsystem list (reduced spaces).
  static SpaceLayout from_subsystems(std::vector<Subsystem> subsystems);

  LayoutKind kind() const { return kind_; }
  int n_side_modes() const { return n_side_modes_; }
  int n_modes() const { return 2 * n_side_modes_ + 1; }
  std::int64_t dimension() const;

  // Tensor-product layouts only.
  const std::vector<Subsystem>& subsystems() const { return subsystems_; }
  int subsystem_count() const { return static_cast<int>(subsystems_.size()); }
  int subsystem_index(SubsystemRole role, int mode_number = 0) const;
  bool has_subsystem(SubsystemRole role, int mode_number = 0) const;

  // Single-excitation basis indices.
  int ground_index() const { return 0; }
  int q1_excited_index() const { return 1; }
  int mode_excited_index(int mode_number) const;
  int q2_excited_index() const { return 2 * n_side_modes_ + 3; }

  bool operator==(const SpaceLayout&) const = default;

 private:
  LayoutKind kind_ = LayoutKind::TensorProduct;
  int n_side_modes_ = 0;
  bool has_modes_ = true;  // false for the bare two-qubit layout
  std::vector<Subsystem> subsystems_;
};

struct Operator {
  SpaceLayout layout;
  Matrix mat;
};

// Dense density matrix on a layout. Use validate() at module boundaries;
// internal evolution code works on raw matrices.
struct DensityMatrix {
  SpaceLayout layout;
  Matrix rho;
};

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kEigenvalueTol = 1e-8;

// Throws std::runtime_error naming the violated invariant.
void validate(const DensityMatrix& dm);
bool is_physical(const Matrix& rho, double herm_tol = kHermitianTol,
                 double trace_tol = kTraceTol, double eig_tol = kEigenvalueTol);

// Elementary 2x2 blocks.
Matrix lowering_2x2();           // |0><1|
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();                // diag(1, -1), |g> = |0>
Matrix identity_2x2();

// Tensor-embeds a 2x2 operator on one subsystem of a tensor-product layout.
// Throws on dimension mismatch or if the dense dimension cap is exceeded.
Operator embed(const Matrix& local_op, int subsystem, const SpaceLayout& layout);

// Lowering operators for either layout kind. On the single-excitation layout
// these are the exact restrictions |ground><excited|.
Operator q1_lowering(const SpaceLayout& layout);
Operator q2_lowering(const SpaceLayout& layout);
Operator mode_lowering(const SpaceLayout& layout, int mode_number);
Operator q1_pauli_z(const SpaceLayout& layout);
Operator q2_pauli_z(const SpaceLayout& layout);

// Diagonal of the excitation-number observable for one subsystem, used for
// population readout without forming dense operators.
RealVector q1_number_diagonal(const SpaceLayout& layout);
RealVector q2_number_diagonal(const SpaceLayout& layout);
RealVector mode_number_diagonal(const SpaceLayout& layout, int mode_number);

// Reduced density matrix over the kept subsystems (ascending indices).
// Trace-preserving; throws on an empty keep set.
DensityMatrix partial_trace(const DensityMatrix& dm, std::span<const int> keep);

// Two-qubit reduction. For tensor layouts this is partial_trace onto
// {Q1, Q2}; for the single-excitation layout the channel amplitudes are
// folded into |gg>.
DensityMatrix reduce_to_qubits(const DensityMatrix& dm);

Matrix kron(const Matrix& a, const Matrix& b);

// Pure initial states used by the protocols: the given qubit amplitudes on
// Q1, channel in vacuum, Q2 in |g>.
DensityMatrix q1_state_with_vacuum(const SpaceLayout& layout, Complex amp_g,
                                   Complex amp_e);

}  // namespace qlink
