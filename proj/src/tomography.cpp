#include "qlink/tomography.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

namespace qlink {

namespace {

const Matrix& pauli(int i) {
  static const std::array<Matrix, 4> paulis = {identity_2x2(), pauli_x(), pauli_y(),
                                               pauli_z()};
  return paulis[i];
}

Matrix rz(double phi) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::exp(Complex(0.0, -0.5 * phi));
  m(1, 1) = std::exp(Complex(0.0, 0.5 * phi));
  return m;
}

}  // namespace

AssignmentMatrix AssignmentMatrix::from_matrix(const Eigen::Matrix4d& m, bool renormalize) {
  Eigen::Matrix4d mm = m;
  for (int c = 0; c < 4; ++c) {
    const double s = mm.col(c).sum();
    if (renormalize) {
      if (s <= 0.0) throw std::invalid_argument("assignment column sums to zero");
      mm.col(c) /= s;
    } else if (std::abs(s - 1.0) > 1e-9) {
      throw std::invalid_argument("assignment matrix column does not sum to 1");
    }
  }
  if ((mm.array() < -1e-12).any() || (mm.array() > 1.0 + 1e-12).any())
    throw std::invalid_argument("assignment matrix entries must lie in [0, 1]");
  AssignmentMatrix a;
  a.m_ = mm;
  if (a.condition_number() > 1e3)
    std::cerr << "warning: assignment matrix condition number "
              << a.condition_number() << " exceeds 1e3; inversion is ill-conditioned\n";
  return a;
}

AssignmentMatrix AssignmentMatrix::from_fidelities(double f_g1, double f_e1,
                                                   double f_g2, double f_e2) {
  auto single = [](double fg, double fe) {
    Eigen::Matrix2d m;
    m << fg, 1.0 - fe, 1.0 - fg, fe;
    return m;
  };
  const Eigen::Matrix2d m1 = single(f_g1, f_e1);
  const Eigen::Matrix2d m2 = single(f_g2, f_e2);
  Eigen::Matrix4d m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      m.block<2, 2>(2 * a, 2 * b) = m1(a, b) * m2;
  return from_matrix(m);
}

AssignmentMatrix AssignmentMatrix::identity() {
  AssignmentMatrix a;
  a.m_ = Eigen::Matrix4d::Identity();
  return a;
}

double AssignmentMatrix::condition_number() const {
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(m_);
  const double smin = svd.singularValues().minCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return svd.singularValues().maxCoeff() / smin;
}

Eigen::Vector4d project_to_simplex(const Eigen::Vector4d& v) {
  std::array<double, 4> u{v[0], v[1], v[2], v[3]};
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, lambda = 0.0;
  int rho = 0;
  double css_rho = 0.0;
  for (int j = 0; j < 4; ++j) {
    css += u[j];
    if (u[j] + (1.0 - css) / (j + 1) > 0.0) {
      rho = j + 1;
      css_rho = css;
    }
  }
  lambda = (1.0 - css_rho) / rho;
  Eigen::Vector4d out;
  for (int i = 0; i < 4; ++i) out[i] = std::max(v[i] + lambda, 0.0);
  return out;
}

Eigen::Vector4d correct_readout(const Eigen::Vector4d& raw_probs,
                                const AssignmentMatrix& m, bool project) {
  if (std::abs(raw_probs.sum() - 1.0) > 1e-6)
    throw std::invalid_argument("raw probabilities must sum to 1");
  Eigen::FullPivLU<Eigen::Matrix4d> lu(m.matrix());
  if (!lu.isInvertible()) throw std::invalid_argument("assignment matrix is singular");
  const Eigen::Vector4d inverted = lu.solve(raw_probs);
  return project ? project_to_simplex(inverted) : inverted;
}

Matrix gate_unitary(TomoGate g) {
  const double s = 1.0 / std::sqrt(2.0);
  Matrix m(2, 2);
  switch (g) {
    case TomoGate::I:
      return identity_2x2();
    case TomoGate::Xhalf:
      m << Complex(s, 0), Complex(0, -s), Complex(0, -s), Complex(s, 0);
      return m;
    case TomoGate::Yhalf:
      m << Complex(s, 0), Complex(-s, 0), Complex(s, 0), Complex(s, 0);
      return m;
  }
  throw std::logic_error("unknown gate");
}

Matrix gate_unitary_q2(TomoGate g, double phi) {
  if (g == TomoGate::I || phi == 0.0) return gate_unitary(g);
  const Matrix r = rz(phi);
  return r * gate_unitary(g) * r.adjoint();
}

std::vector<MeasurementRecord> simulate_measurements(const DensityMatrix& state,
                                                     const SyntheticNoise& noise) {
  if (state.rho.rows() != 4)
    throw std::invalid_argument("two-qubit state expected");
  std::mt19937_64 rng(noise.seed);
  std::vector<MeasurementRecord> records;
  records.reserve(9);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const Matrix u =
          kron(gate_unitary(static_cast<TomoGate>(a)), gate_unitary(static_cast<TomoGate>(b)));
      const Matrix rotated = u * state.rho * u.adjoint();
      Eigen::Vector4d p;
      for (int k = 0; k < 4; ++k) p[k] = std::max(rotated(k, k).real(), 0.0);
      p /= p.sum();
      if (noise.readout) p = noise.readout->matrix() * p;
      if (noise.shots > 0) {
        // Multinomial resampling via chained binomials.
        Eigen::Vector4d counts = Eigen::Vector4d::Zero();
        long remaining = noise.shots;
        double mass = 1.0;
        for (int k = 0; k < 3 && remaining > 0; ++k) {
          const double q = std::clamp(p[k] / mass, 0.0, 1.0);
          std::binomial_distribution<long> bin(remaining, q);
          const long n = bin(rng);
          counts[k] = static_cast<double>(n);
          remaining -= n;
          mass = std::max(mass - p[k], 1e-300);
        }
        counts[3] = static_cast<double>(remaining);
        p = counts / static_cast<double>(noise.shots);
      }
      records.push_back({static_cast<TomoGate>(a), static_cast<TomoGate>(b), p});
    }
  }
  return records;
}

Matrix project_to_physical(const Matrix& m) {
  const Matrix herm = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  RealVector ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) ev[i] = std::max(ev[i], 0.0);
  const double total = ev.sum();
  if (total <= 0.0)
    return Matrix::Identity(m.rows(), m.cols()) / static_cast<double>(m.rows());
  ev /= total;
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

DensityMatrix state_tomography(const std::vector<MeasurementRecord>& records,
                               const TomographySettings& settings) {
  bool seen[3][3] = {};
  for (const auto& r : records)
    seen[static_cast<int>(r.gate_q1)][static_cast<int>(r.gate_q2)] = true;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (!seen[a][b])
        throw std::invalid_argument("incomplete tomography settings: need all 9 gate pairs");

  // rho = (1/4) sum_ij r_ij sigma_i x sigma_j with real r; each measured
  // probability is linear in r.
  Eigen::MatrixXd a(records.size() * 4, 16);
  Eigen::VectorXd y(records.size() * 4);
  for (std::size_t rec = 0; rec < records.size(); ++rec) {
    const auto& r = records[rec];
    const Matrix u = kron(gate_unitary(r.gate_q1), gate_unitary_q2(r.gate_q2, settings.phi_q2));
    for (int k = 0; k < 4; ++k) {
      Matrix pk = Matrix::Zero(4, 4);
      pk(k, k) = 1.0;
      const Matrix e = u.adjoint() * pk * u;
      const int row = static_cast<int>(rec) * 4 + k;
      y[row] = r.probs[k];
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          a(row, 4 * i + j) = 0.25 * (e * kron(pauli(i), pauli(j))).trace().real();
    }
  }
  const Eigen::VectorXd x = a.colPivHouseholderQr().solve(y);
  Matrix rho = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) rho += 0.25 * x[4 * i + j] * kron(pauli(i), pauli(j));
  DensityMatrix out{SpaceLayout::two_qubit(), project_to_physical(rho)};
  validate(out);
  return out;
}

std::array<Matrix, 4> standard_process_inputs() {
  auto pure = [](const Vector& v) { return Matrix(v * v.adjoint()); };
  Vector g(2), p(2), pi(2), e(2);
  g << 1, 0;
  e << 0, 1;
  const double s = 1.0 / std::sqrt(2.0);
  p << s, s;
  pi << s, Complex(0, s);
  return {pure(g), pure(p), pure(pi), pure(e)};
}

ProcessMatrix process_tomography(const std::array<Matrix, 4>& input_states,
                                 const std::array<Matrix, 4>& output_states) {
  for (const auto& m : input_states)
    if (m.rows() != 2 || m.cols() != 2)
      throw std::invalid_argument("process tomography expects single-qubit states");
  for (const auto& m : output_states)
    if (m.rows() != 2 || m.cols() != 2)
      throw std::invalid_argument("process tomography expects single-qubit states");

  // Linear system E(rho_j) = sum_mn chi_mn P_m rho_j P_n over the 16 complex
  // entries of chi.
  Eigen::MatrixXcd a(16, 16);
  Eigen::VectorXcd y(16);
  for (int j = 0; j < 4; ++j) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        const int row = 4 * j + 2 * r + c;
        y[row] = output_states[j](r, c);
        for (int m = 0; m < 4; ++m)
          for (int n = 0; n < 4; ++n)
            a(row, 4 * m + n) = (pauli(m) * input_states[j] * pauli(n))(r, c);
      }
    }
  }
  const Eigen::VectorXcd x = a.colPivHouseholderQr().solve(y);
  Matrix chi(4, 4);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) chi(m, n) = x[4 * m + n];
  return {project_to_physical(chi)};
}

Matrix apply_process(const ProcessMatrix& chi, const Matrix& rho) {
  Matrix out = Matrix::Zero(2, 2);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) out += chi.chi(m, n) * pauli(m) * rho * pauli(n);
  return out;
}

ProcessMatrix identity_process() {
  Matrix chi = Matrix::Zero(4, 4);
  chi(0, 0) = 1.0;
  return {chi};
}

double process_fidelity(const ProcessMatrix& chi, const ProcessMatrix& chi_ideal) {
  return (chi.chi * chi_ideal.chi).trace().real();
}

double trace_distance_chi(const ProcessMatrix& a, const ProcessMatrix& b) {
  const Matrix d = a.chi - b.chi;
  return std::sqrt(std::max(0.0, (d * d).trace().real()));
}

double state_fidelity(const DensityMatrix& rho, const Vector& psi) {
  if (psi.size() != rho.rho.rows())
    throw std::invalid_argument("state dimension mismatch");
  const double n2 = psi.squaredNorm();
  if (std::abs(n2 - 1.0) > 1e-9) throw std::invalid_argument("reference state not normalized");
  return std::real(Complex(psi.adjoint() * rho.rho * psi));
}

Vector bell_singlet() {
  Vector v = Vector::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  v[2] = s;   // |eg>
  v[1] = -s;  // |ge>
  return v;
}

double concurrence(const DensityMatrix& rho) {
  if (rho.rho.rows() != 4) throw std::invalid_argument("two-qubit state expected");
  const Matrix yy = kron(pauli_y(), pauli_y());
  const Matrix rho_tilde = yy * rho.rho.conjugate() * yy;
  const Matrix r = rho.rho * rho_tilde;
  Eigen::ComplexEigenSolver<Matrix> es(r);
  std::array<double, 4> lambda{};
  for (int i = 0; i < 4; ++i)
    lambda[i] = std::sqrt(std::max(0.0, es.eigenvalues()[i].real()));
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

Eigen::Matrix4d pauli_expectations(const DensityMatrix& rho) {
  Eigen::Matrix4d out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      out(i, j) = (rho.rho * kron(pauli(i), pauli(j))).trace().real();
  return out;
}

}  // namespace qlink
