#include "qlink/statespace.hpp"

#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <random>

using namespace qlink;

namespace {

Matrix random_unitary_2x2(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix a(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = Complex(n(rng), n(rng));
  const Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

Matrix random_density(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(n(rng), n(rng));
  Matrix rho = a * a.adjoint();
  rho /= rho.trace();
  return rho;
}

}  // namespace

TEST_CASE("layout dimensions") {
  CHECK(SpaceLayout::full(0).dimension() == 8);
  CHECK(SpaceLayout::full(2).dimension() == 128);
  CHECK(SpaceLayout::full(7).dimension() == 131072);  // descriptor only
  CHECK(SpaceLayout::two_qubit().dimension() == 4);
  CHECK(SpaceLayout::single_excitation(2).dimension() == 8);
  CHECK(SpaceLayout::single_excitation(7).dimension() == 18);
  CHECK(SpaceLayout::full(2).n_modes() == 5);
  CHECK_THROWS(SpaceLayout::full(-1));
}

TEST_CASE("embed identity and number operator") {
  const SpaceLayout layout = SpaceLayout::full(1);
  const int dim = static_cast<int>(layout.dimension());
  for (int k = 0; k < layout.subsystem_count(); ++k) {
    const Operator id = embed(identity_2x2(), k, layout);
    CHECK((id.mat - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() == 0.0);
  }

  // Number operator of Q1 applied to |e, vac, g>.
  const Operator s1 = q1_lowering(layout);
  const Matrix n1 = s1.mat.adjoint() * s1.mat;
  const DensityMatrix psi = q1_state_with_vacuum(layout, 0.0, 1.0);
  CHECK((n1 * psi.rho).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("embed dimension mismatch is rejected") {
  const SpaceLayout layout = SpaceLayout::full(1);
  CHECK_THROWS(embed(Matrix::Identity(3, 3), 0, layout));
  CHECK_THROWS(embed(identity_2x2(), 99, layout));
}

TEST_CASE("commutator of mode ladder operators restricted to the cutoff") {
  // [a, a+] acting within the two-level truncation: brute-force product at
  // N=1, checked on the number-conserving subspace it acts on.
  const SpaceLayout layout = SpaceLayout::full(1);
  const Operator a = mode_lowering(layout, 0);
  const Matrix comm = a.mat * a.mat.adjoint() - a.mat.adjoint() * a.mat;
  // On the cutoff space [a, a+] = diag(1, -1) on the mode: identity on the
  // |0> sector, -1 on |1>. Restricted to mode vacuum it is the identity.
  const int dim = static_cast<int>(layout.dimension());
  const RealVector occ = mode_number_diagonal(layout, 0);
  for (int i = 0; i < dim; ++i) {
    if (occ[i] == 0.0) CHECK(comm(i, i) == Complex(1.0, 0.0));
    if (occ[i] == 1.0) CHECK(comm(i, i) == Complex(-1.0, 0.0));
  }
  CHECK((comm - Matrix(comm.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lowering operators square to zero") {
  const SpaceLayout layout = SpaceLayout::full(1);
  for (const Operator& op : {q1_lowering(layout), q2_lowering(layout),
                             mode_lowering(layout, -1), mode_lowering(layout, 1)}) {
    CHECK((op.mat * op.mat).cwiseAbs().maxCoeff() == 0.0);
  }
  const SpaceLayout sub = SpaceLayout::single_excitation(1);
  for (const Operator& op : {q1_lowering(sub), q2_lowering(sub), mode_lowering(sub, 0)})
    CHECK((op.mat * op.mat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("embed commutes with composition") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n;
  const SpaceLayout layout = SpaceLayout::full(1);
  for (int trial = 0; trial < 16; ++trial) {
    Matrix a(2, 2), b(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        a(i, j) = Complex(n(rng), n(rng));
        b(i, j) = Complex(n(rng), n(rng));
      }
    const int k = trial % layout.subsystem_count();
    const Matrix lhs = embed(a * b, k, layout).mat;
    const Matrix rhs = embed(a, k, layout).mat * embed(b, k, layout).mat;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("partial trace basics") {
  const SpaceLayout layout = SpaceLayout::full(0);

  SUBCASE("product state keeps the qubit factor") {
    const DensityMatrix rho = q1_state_with_vacuum(layout, 0.0, 1.0);
    const int keep[] = {0};
    const DensityMatrix red = partial_trace(rho, keep);
    CHECK(red.rho.rows() == 2);
    CHECK(red.rho(1, 1).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(red.rho(0, 0)) < 1e-14);
  }

  SUBCASE("Bell singlet reduces to the maximally mixed state") {
    const SpaceLayout qq = SpaceLayout::two_qubit();
    Vector psi = Vector::Zero(4);
    psi[1] = 1.0 / std::sqrt(2.0);
    psi[2] = -1.0 / std::sqrt(2.0);
    const DensityMatrix bell{qq, psi * psi.adjoint()};
    const int keep[] = {0};
    const DensityMatrix red = partial_trace(bell, keep);
    CHECK((red.rho - 0.5 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("random state: trace preserved") {
    std::mt19937_64 rng(21);
    const DensityMatrix rho{layout, random_density(8, rng)};
    const int keep[] = {0, 2};
    const DensityMatrix red = partial_trace(rho, keep);
    CHECK(std::abs(red.rho.trace().real() - 1.0) < 1e-12);
    CHECK(std::abs(red.rho.trace().imag()) < 1e-14);
    Eigen::SelfAdjointEigenSolver<Matrix> es(red.rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }

  SUBCASE("empty keep set rejected") {
    const DensityMatrix rho = q1_state_with_vacuum(layout, 1.0, 0.0);
    CHECK_THROWS(partial_trace(rho, std::span<const int>{}));
  }
}

TEST_CASE("embedding then tracing recovers the local action") {
  // Apply an embedded operator to the maximally mixed state and trace back
  // to the subsystem; this must equal the local conjugation of I/2.
  std::mt19937_64 rng(3);
  const SpaceLayout layout = SpaceLayout::full(1);
  const int dim = static_cast<int>(layout.dimension());
  for (int k = 0; k < layout.subsystem_count(); ++k) {
    const Matrix u = random_unitary_2x2(rng);
    const Operator big = embed(u, k, layout);
    const Matrix mixed = Matrix::Identity(dim, dim) / static_cast<double>(dim);
    const DensityMatrix out{layout, big.mat * mixed * big.mat.adjoint()};
    const int keep[] = {k};
    const DensityMatrix red = partial_trace(out, keep);
    const Matrix expected = u * (0.5 * Matrix::Identity(2, 2)) * u.adjoint();
    CHECK((red.rho - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("single-excitation reduction to the qubit pair") {
  const SpaceLayout sub = SpaceLayout::single_excitation(2);
  Vector psi = Vector::Zero(sub.dimension());
  psi[sub.q1_excited_index()] = 1.0 / std::sqrt(2.0);
  psi[sub.q2_excited_index()] = -1.0 / std::sqrt(2.0);
  const DensityMatrix rho{sub, psi * psi.adjoint()};
  const DensityMatrix red = reduce_to_qubits(rho);
  // (|eg> - |ge>)/sqrt(2).
  CHECK(red.rho(2, 2).real() == doctest::Approx(0.5));
  CHECK(red.rho(1, 1).real() == doctest::Approx(0.5));
  CHECK(red.rho(2, 1).real() == doctest::Approx(-0.5));
  CHECK(std::abs(red.rho.trace() - Complex(1.0)) < 1e-12);
}

TEST_CASE("density matrix validation") {
  const SpaceLayout qq = SpaceLayout::two_qubit();
  Matrix good = Matrix::Zero(4, 4);
  good(0, 0) = 1.0;
  CHECK_NOTHROW(validate(DensityMatrix{qq, good}));

  Matrix bad_trace = good * 0.5;
  CHECK_THROWS(validate(DensityMatrix{qq, bad_trace}));

  Matrix not_herm = good;
  not_herm(0, 1) = Complex(0.1, 0.0);
  CHECK_THROWS(validate(DensityMatrix{qq, not_herm}));

  Matrix neg = Matrix::Zero(4, 4);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS(validate(DensityMatrix{qq, neg}));
}
