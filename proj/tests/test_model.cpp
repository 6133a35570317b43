#include "qlink/model.hpp"

#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <random>

using namespace qlink;

namespace {
double mhz(double f) { return kTwoPi * f * 1e-3; }

Schedule adiabatic(double gbar_mhz, double tf) {
  Schedule s;
  s.protocol = Protocol::AdiabaticTransfer;
  s.gbar = mhz(gbar_mhz);
  s.t_f = tf;
  return s;
}

RealVector total_excitation_diagonal(const SpaceLayout& layout) {
  RealVector d = q1_number_diagonal(layout) + q2_number_diagonal(layout);
  for (int n = -layout.n_side_modes(); n <= layout.n_side_modes(); ++n)
    d += mode_number_diagonal(layout, n);
  return d;
}

}  // namespace

TEST_CASE("zero couplings and zero detunings give the zero Hamiltonian") {
  const SpaceLayout layout = SpaceLayout::full(1);
  HamiltonianModel m = make_hamiltonian_model(layout, 0.0, adiabatic(15.0, 132.0));
  std::fill(m.mode_detunings.begin(), m.mode_detunings.end(), 0.0);
  m.schedule.gbar = 0.0;
  const Operator h = build_hamiltonian(m, 10.0);
  CHECK(h.mat.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-mode resonant eigenvalues are 0 and +-gbar") {
  const SpaceLayout layout = SpaceLayout::full(0);
  const double gbar = mhz(15.0);
  Schedule s = adiabatic(15.0, 132.0);
  const HamiltonianModel m = make_hamiltonian_model(layout, mhz(84.0), s);
  // Midpoint: g1 = g2 = gbar / sqrt(2).
  const Operator h = build_hamiltonian(m, 66.0);
  CHECK((h.mat - h.mat.adjoint()).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::SelfAdjointEigenSolver<Matrix> es(h.mat);
  // The single-excitation block contributes {-gbar, 0, +gbar}.
  const RealVector ev = es.eigenvalues();
  CHECK(std::abs(ev.minCoeff() + gbar) < 1e-12 * gbar);
  CHECK(std::abs(ev.maxCoeff() - gbar) < 1e-12 * gbar);
}

TEST_CASE("odd-mode coupling sign flip for Q2") {
  // <g,1_{n=1},g| H |g0e> = -g2.
  const SpaceLayout layout = SpaceLayout::full(1);
  Schedule s = adiabatic(10.0, 100.0);
  const HamiltonianModel m = make_hamiltonian_model(layout, mhz(84.0), s);
  const double t = 40.0;
  const Couplings c = s.at(t);
  const Operator h = build_hamiltonian(m, t);

  const std::int64_t ket_q2 = 1;  // |g, vac, e>: Q2 is the least significant bit
  const int k_mode1 = layout.subsystem_index(SubsystemRole::ChannelMode, 1);
  const std::int64_t bra_mode =
      std::int64_t{1} << (layout.subsystem_count() - 1 - k_mode1);
  CHECK(h.mat(bra_mode, ket_q2).real() == doctest::Approx(-c.g2).epsilon(1e-12));
  const int k_mode0 = layout.subsystem_index(SubsystemRole::ChannelMode, 0);
  const std::int64_t bra_mode0 =
      std::int64_t{1} << (layout.subsystem_count() - 1 - k_mode0);
  CHECK(h.mat(bra_mode0, ket_q2).real() == doctest::Approx(c.g2).epsilon(1e-12));
}

TEST_CASE("H is Hermitian and conserves the excitation number") {
  const SpaceLayout layout = SpaceLayout::full(2);
  Schedule s = adiabatic(15.0, 132.0);
  const HamiltonianModel m =
      make_hamiltonian_model(layout, mhz(84.0), s, mhz(0.3), mhz(-0.2));
  const RealVector ntot = total_excitation_diagonal(layout);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, s.t_f);
  for (int trial = 0; trial < 100; ++trial) {
    const Operator h = build_hamiltonian(m, u(rng));
    const double scale = std::max(1.0, h.mat.cwiseAbs().maxCoeff());
    CHECK((h.mat - h.mat.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * scale);
    const Matrix nmat = ntot.cast<Complex>().asDiagonal();
    CHECK((h.mat * nmat - nmat * h.mat).cwiseAbs().maxCoeff() < 1e-12 * scale);
  }
}

TEST_CASE("multi-mode N=0 block reduces to the three-state Hamiltonian") {
  const SpaceLayout layout = SpaceLayout::full(0);
  Schedule s = adiabatic(12.0, 120.0);
  const HamiltonianModel m = make_hamiltonian_model(layout, mhz(84.0), s);
  const double t = 37.0;
  const Couplings c = s.at(t);
  const Operator h = build_hamiltonian(m, t);
  const Matrix h3 = single_excitation_hamiltonian(c.g1, c.g2);

  // Basis map: |e0g> = 100b, |g1g> = 010b, |g0e> = 001b.
  const std::int64_t idx[3] = {4, 2, 1};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(h.mat(idx[i], idx[j]).real() == doctest::Approx(h3(i, j).real()).epsilon(1e-14));
}

TEST_CASE("dark state") {
  const Vector d0 = dark_state(0.0);
  CHECK(d0(0).real() == doctest::Approx(1.0));
  CHECK(std::abs(d0(1)) == 0.0);
  CHECK(std::abs(d0(2)) == 0.0);

  const Vector d90 = dark_state(std::numbers::pi / 2.0);
  CHECK(d90(2).real() == doctest::Approx(-1.0));

  const Vector d45 = dark_state(std::numbers::pi / 4.0);
  CHECK(d45(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(d45(2).real() == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(d45.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("three-state eigenstructure") {
  SUBCASE("decoupled Q2") {
    const EigenStructure es = eigen_splitting(1.0, 0.0);
    CHECK(es.energies(0) == doctest::Approx(-1.0));
    CHECK(es.energies(1) == doctest::Approx(0.0));
    CHECK(es.energies(2) == doctest::Approx(1.0));
    // Dark state is |g0e> up to phase.
    const Vector dark = es.states.col(1);
    CHECK(std::abs(dark(2)) == doctest::Approx(1.0));
  }

  SUBCASE("symmetric couplings give the Bell-ready dark state") {
    const double g = mhz(10.0);
    const EigenStructure es = eigen_splitting(g, g);
    CHECK(es.gbar == doctest::Approx(std::sqrt(2.0) * g));
    const Vector dark = es.states.col(1);
    CHECK(std::abs(dark(1)) < 1e-12);  // no channel amplitude
    CHECK(std::abs(std::abs(dark(0)) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(dark(0) + dark(2)) < 1e-12);  // opposite signs
  }

  SUBCASE("reported splittings") {
    // g1/2pi = g2/2pi = 5.9 MHz -> bright states at +-8.344 MHz.
    const EigenStructure a = eigen_splitting(mhz(5.9), mhz(5.9));
    CHECK(a.gbar / kTwoPi * 1e3 == doctest::Approx(8.3439).epsilon(1e-4));
    // 20 MHz -> +-28.28 MHz.
    const EigenStructure b = eigen_splitting(mhz(20.0), mhz(20.0));
    CHECK(b.gbar / kTwoPi * 1e3 == doctest::Approx(28.2843).epsilon(1e-4));
    // g2 = 0 -> splitting +-g1.
    const EigenStructure c = eigen_splitting(mhz(7.7), 0.0);
    CHECK(c.gbar == doctest::Approx(mhz(7.7)));
  }
}

TEST_CASE("dark state is a zero eigenvector for random couplings") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, mhz(40.0));
  for (int trial = 0; trial < 50; ++trial) {
    const double g1 = u(rng), g2 = u(rng);
    if (g1 == 0.0 && g2 == 0.0) continue;
    const double gbar = std::hypot(g1, g2);
    const double theta = std::atan2(g1, g2);
    const Vector d = dark_state(theta);
    const Matrix h = single_excitation_hamiltonian(g1, g2);
    CHECK((h * d).norm() < 1e-12 * gbar);
    // Numeric zero eigenvector matches (cos theta, 0, -sin theta).
    const EigenStructure es = eigen_splitting(g1, g2);
    Vector numeric = es.states.col(1);
    if (std::abs(numeric(0)) > 1e-12) numeric *= d(0) / numeric(0);
    CHECK((numeric - d).norm() < 1e-9);
  }
}

TEST_CASE("device parameter validation") {
  DeviceParams d;
  CHECK_THROWS(d.validate());  // zeros everywhere
}
