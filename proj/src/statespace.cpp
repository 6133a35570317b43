#include "qlink/statespace.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace qlink {

SpaceLayout SpaceLayout::full(int n_side_modes) {
  if (n_side_modes < 0) throw std::invalid_argument("n_side_modes must be >= 0");
  SpaceLayout l;
  l.kind_ = LayoutKind::TensorProduct;
  l.n_side_modes_ = n_side_modes;
  l.has_modes_ = true;
  l.subsystems_.push_back({SubsystemRole::Qubit1, 0});
  for (int n = -n_side_modes; n <= n_side_modes; ++n)
    l.subsystems_.push_back({SubsystemRole::ChannelMode, n});
  l.subsystems_.push_back({SubsystemRole::Qubit2, 0});
  return l;
}

SpaceLayout SpaceLayout::two_qubit() {
  SpaceLayout l;
  l.kind_ = LayoutKind::TensorProduct;
  l.n_side_modes_ = 0;
  l.has_modes_ = false;
  l.subsystems_ = {{SubsystemRole::Qubit1, 0}, {SubsystemRole::Qubit2, 0}};
  return l;
}

SpaceLayout SpaceLayout::single_excitation(int n_side_modes) {
  if (n_side_modes < 0) throw std::invalid_argument("n_side_modes must be >= 0");
  SpaceLayout l;
  l.kind_ = LayoutKind::SingleExcitation;
  l.n_side_modes_ = n_side_modes;
  l.has_modes_ = true;
  return l;
}

SpaceLayout SpaceLayout::from_subsystems(std::vector<Subsystem> subsystems) {
  if (subsystems.empty()) throw std::invalid_argument("empty subsystem list");
  SpaceLayout l;
  l.kind_ = LayoutKind::TensorProduct;
  l.n_side_modes_ = 0;
  l.has_modes_ = false;
  l.subsystems_ = std::move(subsystems);
  return l;
}

std::int64_t SpaceLayout::dimension() const {
  if (kind_ == LayoutKind::SingleExcitation)
    return static_cast<std::int64_t>(n_modes()) + 3;
  return std::int64_t{1} << subsystems_.size();
}

int SpaceLayout::subsystem_index(SubsystemRole role, int mode_number) const {
  for (int k = 0; k < subsystem_count(); ++k) {
    const auto& s = subsystems_[k];
    if (s.role == role && (role != SubsystemRole::ChannelMode || s.mode_number == mode_number))
      return k;
  }
  throw std::invalid_argument("subsystem not present in layout");
}

bool SpaceLayout::has_subsystem(SubsystemRole role, int mode_number) const {
  return std::any_of(subsystems_.begin(), subsystems_.end(), [&](const Subsystem& s) {
    return s.role == role && (role != SubsystemRole::ChannelMode || s.mode_number == mode_number);
  });
}

int SpaceLayout::mode_excited_index(int mode_number) const {
  if (mode_number < -n_side_modes_ || mode_number > n_side_modes_)
    throw std::invalid_argument("mode number out of range");
  return 2 + (mode_number + n_side_modes_);
}

void validate(const DensityMatrix& dm) {
  const Matrix& rho = dm.rho;
  if (rho.rows() != rho.cols() || rho.rows() != dm.layout.dimension())
    throw std::runtime_error("density matrix dimension does not match layout");
  const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol)
    throw std::runtime_error("density matrix not Hermitian, max |rho - rho^+| = " +
                             std::to_string(herm));
  const double trace_err = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
  if (trace_err > kTraceTol)
    throw std::runtime_error("density matrix trace deviates from 1 by " +
                             std::to_string(trace_err));
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                           Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -kEigenvalueTol)
    throw std::runtime_error("density matrix has negative eigenvalue " +
                             std::to_string(min_eig));
}

bool is_physical(const Matrix& rho, double herm_tol, double trace_tol, double eig_tol) {
  if (rho.rows() != rho.cols()) return false;
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > herm_tol) return false;
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > trace_tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -eig_tol;
}

Matrix lowering_2x2() {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  return a;
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix identity_2x2() { return Matrix::Identity(2, 2); }

namespace {

// Bit position (from the least significant end) of subsystem k when the
// basis index is read with subsystem 0 as the most significant bit.
inline int bit_shift(const SpaceLayout& layout, int subsystem) {
  return layout.subsystem_count() - 1 - subsystem;
}

}  // namespace

Operator embed(const Matrix& local_op, int subsystem, const SpaceLayout& layout) {
  if (layout.kind() != LayoutKind::TensorProduct)
    throw std::invalid_argument("embed requires a tensor-product layout");
  if (local_op.rows() != 2 || local_op.cols() != 2)
    throw std::invalid_argument("local operator must be 2x2 (all subsystems are two-level)");
  if (subsystem < 0 || subsystem >= layout.subsystem_count())
    throw std::invalid_argument("subsystem index out of range");
  const std::int64_t dim = layout.dimension();
  if (dim > kMaxDenseDimension)
    throw std::length_error("dense operator too large; use the single-excitation layout");

  const std::int64_t stride = std::int64_t{1} << bit_shift(layout, subsystem);
  Matrix full = Matrix::Zero(dim, dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    const int bi = static_cast<int>((i / stride) & 1);
    for (int bj = 0; bj < 2; ++bj) {
      const Complex v = local_op(bi, bj);
      if (v == Complex(0.0, 0.0)) continue;
      const std::int64_t j = i + (static_cast<std::int64_t>(bj) - bi) * stride;
      full(i, j) = v;
    }
  }
  return {layout, std::move(full)};
}

namespace {

Operator single_excitation_lowering(const SpaceLayout& layout, int excited_index) {
  Matrix m = Matrix::Zero(layout.dimension(), layout.dimension());
  m(layout.ground_index(), excited_index) = 1.0;
  return {layout, std::move(m)};
}

Operator single_excitation_pauli_z(const SpaceLayout& layout, int excited_index) {
  // sigma_z = |g><g| - |e><e| acts as identity on every basis state in which
  // the qubit is in |g>, and as -1 on the state in which it is excited.
  Matrix m = Matrix::Identity(layout.dimension(), layout.dimension());
  m(excited_index, excited_index) = -1.0;
  return {layout, std::move(m)};
}

}  // namespace

Operator q1_lowering(const SpaceLayout& layout) {
  if (layout.kind() == LayoutKind::SingleExcitation)
    return single_excitation_lowering(layout, layout.q1_excited_index());
  return embed(lowering_2x2(), layout.subsystem_index(SubsystemRole::Qubit1), layout);
}

Operator q2_lowering(const SpaceLayout& layout) {
  if (layout.kind() == LayoutKind::SingleExcitation)
    return single_excitation_lowering(layout, layout.q2_excited_index());
  return embed(lowering_2x2(), layout.subsystem_index(SubsystemRole::Qubit2), layout);
}

Operator mode_lowering(const SpaceLayout& layout, int mode_number) {
  if (layout.kind() == LayoutKind::SingleExcitation)
    return single_excitation_lowering(layout, layout.mode_excited_index(mode_number));
  return embed(lowering_2x2(),
               layout.subsystem_index(SubsystemRole::ChannelMode, mode_number), layout);
}

Operator q1_pauli_z(const SpaceLayout& layout) {
  if (layout.kind() == LayoutKind::SingleExcitation)
    return single_excitation_pauli_z(layout, layout.q1_excited_index());
  return embed(pauli_z(), layout.subsystem_index(SubsystemRole::Qubit1), layout);
}

Operator q2_pauli_z(const SpaceLayout& layout) {
  if (layout.kind() == LayoutKind::SingleExcitation)
    return single_excitation_pauli_z(layout, layout.q2_excited_index());
  return embed(pauli_z(), layout.subsystem_index(SubsystemRole::Qubit2), layout);
}

namespace {

RealVector number_diagonal_tensor(const SpaceLayout& layout, int subsystem) {
  const std::int64_t dim = layout.dimension();
  const std::int64_t stride = std::int64_t{1} << bit_shift(layout, subsystem);
  RealVector d(dim);
  for (std::int64_t i = 0; i < dim; ++i) d[i] = static_cast<double>((i / stride) & 1);
  return d;
}

RealVector indicator_diagonal(const SpaceLayout& layout, int index) {
  RealVector d = RealVector::Zero(layout.dimension());
  d[index] = 1.0;
  return d;
}

}  // namespace

RealVector q1_number_diagonal(const SpaceLayout& layout) {
  if (layout.kind() == LayoutKind::SingleExcitation)
    return indicator_diagonal(layout, layout.q1_excited_index());
  return number_diagonal_tensor(layout, layout.subsystem_index(SubsystemRole::Qubit1));
}

RealVector q2_number_diagonal(const SpaceLayout& layout) {
  if (layout.kind() == LayoutKind::SingleExcitation)
    return indicator_diagonal(layout, layout.q2_excited_index());
  return number_diagonal_tensor(layout, layout.subsystem_index(SubsystemRole::Qubit2));
}

RealVector mode_number_diagonal(const SpaceLayout& layout, int mode_number) {
  if (layout.kind() == LayoutKind::SingleExcitation)
    return indicator_diagonal(layout, layout.mode_excited_index(mode_number));
  return number_diagonal_tensor(
      layout, layout.subsystem_index(SubsystemRole::ChannelMode, mode_number));
}

DensityMatrix partial_trace(const DensityMatrix& dm, std::span<const int> keep) {
  const SpaceLayout& layout = dm.layout;
  if (layout.kind() != LayoutKind::TensorProduct)
    throw std::invalid_argument("partial_trace requires a tensor-product layout");
  if (keep.empty()) throw std::invalid_argument("keep set must not be empty");

  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::unique(kept.begin(), kept.end()) != kept.end())
    throw std::invalid_argument("keep set has duplicates");
  for (int k : kept)
    if (k < 0 || k >= layout.subsystem_count())
      throw std::invalid_argument("keep index out of range");

  const std::int64_t dim = layout.dimension();

  std::int64_t keep_mask = 0;
  for (int k : kept) keep_mask |= std::int64_t{1} << bit_shift(layout, k);
  const std::int64_t trace_mask = (dim - 1) & ~keep_mask;

  // Packs the kept bits of a full index into a reduced index, preserving the
  // subsystem order.
  auto pack = [&](std::int64_t idx) {
    std::int64_t out = 0;
    for (std::size_t r = 0; r < kept.size(); ++r) {
      const int shift = bit_shift(layout, kept[r]);
      const std::int64_t bit = (idx >> shift) & 1;
      out |= bit << (kept.size() - 1 - r);
    }
    return out;
  };

  const std::int64_t red_dim = std::int64_t{1} << kept.size();
  Matrix out = Matrix::Zero(red_dim, red_dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    const std::int64_t ti = i & trace_mask;
    const std::int64_t ri = pack(i);
    for (std::int64_t j = 0; j < dim; ++j) {
      if ((j & trace_mask) != ti) continue;
      out(ri, pack(j)) += dm.rho(i, j);
    }
  }

  std::vector<Subsystem> subs;
  for (int k : kept) subs.push_back(layout.subsystems()[k]);
  return {SpaceLayout::from_subsystems(std::move(subs)), std::move(out)};
}

DensityMatrix reduce_to_qubits(const DensityMatrix& dm) {
  const SpaceLayout& layout = dm.layout;
  if (layout.kind() == LayoutKind::TensorProduct) {
    const int k1 = layout.subsystem_index(SubsystemRole::Qubit1);
    const int k2 = layout.subsystem_index(SubsystemRole::Qubit2);
    const int keep[] = {k1, k2};
    return partial_trace(dm, keep);
  }
  // Single-excitation layout: basis states map onto the two-qubit space as
  // |ground> -> |gg>, |Q1> -> |eg>, |Q2> -> |ge>, |mode n> -> |gg>.
  const int g = layout.ground_index();
  const int q1 = layout.q1_excited_index();
  const int q2 = layout.q2_excited_index();
  Matrix out = Matrix::Zero(4, 4);
  // Index convention: |q1 q2> with Q1 the most significant bit -> gg=0,
  // ge=1, eg=2, ee=3.
  out(0, 0) = dm.rho(g, g);
  for (int n = -layout.n_side_modes(); n <= layout.n_side_modes(); ++n) {
    const int m = layout.mode_excited_index(n);
    out(0, 0) += dm.rho(m, m);
  }
  out(2, 2) = dm.rho(q1, q1);
  out(1, 1) = dm.rho(q2, q2);
  out(2, 1) = dm.rho(q1, q2);
  out(1, 2) = dm.rho(q2, q1);
  out(0, 2) = dm.rho(g, q1);
  out(2, 0) = dm.rho(q1, g);
  out(0, 1) = dm.rho(g, q2);
  out(1, 0) = dm.rho(q2, g);
  return {SpaceLayout::two_qubit(), std::move(out)};
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DensityMatrix q1_state_with_vacuum(const SpaceLayout& layout, Complex amp_g,
                                   Complex amp_e) {
  const double norm = std::sqrt(std::norm(amp_g) + std::norm(amp_e));
  if (norm <= 0.0) throw std::invalid_argument("zero state amplitude");
  amp_g /= norm;
  amp_e /= norm;

  const std::int64_t dim = layout.dimension();
  Vector psi = Vector::Zero(dim);
  if (layout.kind() == LayoutKind::SingleExcitation) {
    psi[layout.ground_index()] = amp_g;
    psi[layout.q1_excited_index()] = amp_e;
  } else {
    const int k1 = layout.subsystem_index(SubsystemRole::Qubit1);
    const std::int64_t stride = std::int64_t{1} << (layout.subsystem_count() - 1 - k1);
    psi[0] = amp_g;           // |g, vac, g>
    psi[stride] = amp_e;      // |e, vac, g>
  }
  Matrix rho = psi * psi.adjoint();
  return {layout, std::move(rho)};
}

}  // namespace qlink
