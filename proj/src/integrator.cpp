#include "qlink/integrator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace qlink {

double compute_tphi(double t1_int, double t2_ramsey) {
  if (t1_int <= 0.0 || t2_ramsey <= 0.0)
    throw std::invalid_argument("lifetimes must be positive");
  const double rate = 1.0 / t2_ramsey - 1.0 / (2.0 * t1_int);
  if (rate < 0.0)
    throw std::invalid_argument("T2,Ramsey exceeds 2*T1; dephasing rate would be negative");
  if (rate == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / rate;
}

namespace {

using RowMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Collapse operator with at most one nonzero per row, stored as an index
// list: c = sum_k amp[k] |to[k]><from[k]|. Its c+c is diagonal.
struct JumpKernel {
  std::vector<int> to;
  std::vector<int> from;
  std::vector<Complex> amp;
  double rate = 0.0;
  std::function<double(double)> rate_fn;
  RealVector cdagc_diag;
};

struct DenseKernel {
  Matrix c;
  Matrix cdagc;
  double rate = 0.0;
  std::function<double(double)> rate_fn;
};

// H(t) = diag + g1 V1 + g2 V2 compiled to one CSR pattern holding the
// per-entry coefficients, so per-stage assembly is a single pass over nnz.
struct CompiledHamiltonian {
  int dim = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> det;   // detuning contribution (diagonal entries)
  std::vector<double> c1;    // V1 coefficient
  std::vector<double> c2;    // V2 coefficient
  std::vector<int> diag_pos; // CSR slot of each diagonal entry
};

CompiledHamiltonian compile_hamiltonian(const HamiltonianTerms& terms) {
  const int dim = static_cast<int>(terms.detuning_diag.size());
  struct Entry {
    double det = 0.0, c1 = 0.0, c2 = 0.0;
  };
  std::vector<std::vector<std::pair<int, Entry>>> rows(dim);
  auto upsert = [&](int r, int c) -> Entry& {
    for (auto& [cc, e] : rows[r])
      if (cc == c) return e;
    rows[r].emplace_back(c, Entry{});
    return rows[r].back().second;
  };
  for (int i = 0; i < dim; ++i) upsert(i, i).det = terms.detuning_diag[i];
  for (int k = 0; k < terms.v1.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(terms.v1, k); it; ++it)
      upsert(static_cast<int>(it.row()), static_cast<int>(it.col())).c1 += it.value();
  for (int k = 0; k < terms.v2.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(terms.v2, k); it; ++it)
      upsert(static_cast<int>(it.row()), static_cast<int>(it.col())).c2 += it.value();

  CompiledHamiltonian h;
  h.dim = dim;
  h.row_ptr.assign(dim + 1, 0);
  h.diag_pos.assign(dim, -1);
  for (int i = 0; i < dim; ++i) {
    std::sort(rows[i].begin(), rows[i].end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    h.row_ptr[i + 1] = h.row_ptr[i] + static_cast<int>(rows[i].size());
    for (const auto& [c, e] : rows[i]) {
      if (c == i) h.diag_pos[i] = static_cast<int>(h.col.size());
      h.col.push_back(c);
      h.det.push_back(e.det);
      h.c1.push_back(e.c1);
      h.c2.push_back(e.c2);
    }
  }
  return h;
}

// True when every row of m has at most one nonzero entry.
bool try_compile_jump(const Matrix& m, JumpKernel& out) {
  const int dim = static_cast<int>(m.rows());
  out.to.clear();
  out.from.clear();
  out.amp.clear();
  for (int i = 0; i < dim; ++i) {
    int found = -1;
    for (int j = 0; j < dim; ++j) {
      if (m(i, j) == Complex(0.0, 0.0)) continue;
      if (found >= 0) return false;
      found = j;
    }
    if (found >= 0) {
      out.to.push_back(i);
      out.from.push_back(found);
      out.amp.push_back(m(i, found));
    }
  }
  out.cdagc_diag = RealVector::Zero(dim);
  for (std::size_t k = 0; k < out.from.size(); ++k)
    out.cdagc_diag[out.from[k]] += std::norm(out.amp[k]);
  return true;
}

// Secularized qubit dephasing, compiled per channel: the operator is the
// bare sigma_z site diagonal with the central triad replaced by
// L I + mu |d(th)><d(th)|, where d is supported on the two qubit sites.
struct AdiabaticDephasing {
  double rate = 0.0;
  bool is_q1 = true;
  RealVector base_diag;  // bare sigma_z site values
  int site_q1 = 0;       // |e, vac, g>
  int site_mode = 0;     // |g, 1_0, g>
  int site_q2 = 0;       // |g, vac, e>
};

class Rhs {
 public:
  Rhs(const LindbladProblem& problem)
      : schedule_(problem.model.schedule), dim_(static_cast<int>(problem.initial.rho.rows())) {
    ham_ = compile_hamiltonian(hamiltonian_terms(problem.model));
    static_diag_ = RealVector::Zero(dim_);
    const SpaceLayout& layout = problem.initial.layout;
    for (const auto& ch : problem.adiabatic_dephasing) {
      if (ch.qubit != 1 && ch.qubit != 2)
        throw std::invalid_argument("adiabatic dephasing qubit must be 1 or 2");
      if (ch.rate <= 0.0) continue;
      AdiabaticDephasing ad;
      ad.rate = ch.rate;
      ad.is_q1 = ch.qubit == 1;
      const RealVector number =
          ad.is_q1 ? q1_number_diagonal(layout) : q2_number_diagonal(layout);
      ad.base_diag = RealVector::Ones(dim_) - 2.0 * number;
      if (layout.kind() == LayoutKind::SingleExcitation) {
        ad.site_q1 = layout.q1_excited_index();
        ad.site_mode = layout.mode_excited_index(0);
        ad.site_q2 = layout.q2_excited_index();
      } else {
        const int n_sub = layout.subsystem_count();
        const auto site = [&](SubsystemRole role, int mode) {
          return 1 << (n_sub - 1 - layout.subsystem_index(role, mode));
        };
        ad.site_q1 = site(SubsystemRole::Qubit1, 0);
        ad.site_mode = site(SubsystemRole::ChannelMode, 0);
        ad.site_q2 = site(SubsystemRole::Qubit2, 0);
      }
      // sigma_z^2 = 1: the static half of the anticommutator is uniform; the
      // triad entries get a per-stage correction.
      static_diag_ += RealVector::Constant(dim_, 0.5 * ad.rate);
      adiabatic_.push_back(std::move(ad));
    }
    for (const auto& ch : problem.collapse) {
      if (ch.op.mat.rows() != dim_ || ch.op.mat.cols() != dim_)
        throw std::invalid_argument("collapse operator dimension mismatch");
      JumpKernel jk;
      if (try_compile_jump(ch.op.mat, jk)) {
        jk.rate = ch.rate;
        jk.rate_fn = ch.rate_fn;
        if (jk.rate_fn) {
          td_jumps_.push_back(std::move(jk));
        } else if (jk.rate > 0.0) {
          static_diag_ += 0.5 * jk.rate * jk.cdagc_diag;
          jumps_.push_back(std::move(jk));
        }
      } else {
        DenseKernel dk;
        dk.c = ch.op.mat;
        dk.cdagc = ch.op.mat.adjoint() * ch.op.mat;
        dk.rate = ch.rate;
        dk.rate_fn = ch.rate_fn;
        dense_.push_back(std::move(dk));
      }
    }
    vals_.resize(ham_.col.size());
    k_.resize(dim_, dim_);
    lam_.resize(dim_);
    u_.resize(dim_);
    w_.resize(dim_);
  }

  int dim() const { return dim_; }

  // out = L(t)[rho]; rho must be Hermitian (RK4 stages preserve this).
  void operator()(double t, double t_right_limit, const RowMatrix& rho, RowMatrix& out) {
    const double t_eval = std::min(t, t_right_limit);
    const Couplings g = schedule_.at(t_eval);

    // A = -iH - (1/2) sum r c+c restricted to the diagonal part; the
    // anticommutator and commutator together are K + K^+ with K = A rho.
    const Complex mi(0.0, -1.0);
    for (std::size_t k = 0; k < vals_.size(); ++k)
      vals_[k] = mi * Complex(ham_.det[k] + g.g1 * ham_.c1[k] + g.g2 * ham_.c2[k], 0.0);
    for (int i = 0; i < dim_; ++i) vals_[ham_.diag_pos[i]] -= static_diag_[i];
    for (const auto& jk : td_jumps_) {
      const double r = jk.rate_fn(t_eval);
      if (r == 0.0) continue;
      for (int i = 0; i < dim_; ++i)
        if (jk.cdagc_diag[i] != 0.0)
          vals_[ham_.diag_pos[i]] -= 0.5 * r * jk.cdagc_diag[i];
    }
    const double theta = std::atan2(g.g1, g.g2);
    const double ct = std::cos(theta), st = std::sin(theta);
    // With both couplers off every site is an eigenstate and the secular
    // operator reduces to the bare sigma_z.
    const bool coupled = std::hypot(g.g1, g.g2) > 1e-12;
    if (coupled) {
      for (const auto& ad : adiabatic_) {
        // Triad entries of sigma_z^2 change from 1 to lambda^2.
        const double lam = ad.is_q1 ? ct * ct : st * st;
        const double corr = 0.5 * ad.rate * (1.0 - lam * lam);
        for (int site : {ad.site_q1, ad.site_mode, ad.site_q2})
          vals_[ham_.diag_pos[site]] += corr;
      }
    }

    // K = A rho, one axpy over a contiguous row per CSR entry.
    for (int i = 0; i < dim_; ++i) {
      k_.row(i).setZero();
      for (int p = ham_.row_ptr[i]; p < ham_.row_ptr[i + 1]; ++p)
        k_.row(i) += vals_[p] * rho.row(ham_.col[p]);
    }
    out = k_ + k_.adjoint();

    // Jump terms r c rho c+.
    auto apply_jump = [&](const JumpKernel& jk, double r) {
      const int n = static_cast<int>(jk.to.size());
      for (int a = 0; a < n; ++a) {
        const Complex fa = r * jk.amp[a];
        for (int b = 0; b < n; ++b)
          out(jk.to[a], jk.to[b]) += fa * std::conj(jk.amp[b]) * rho(jk.from[a], jk.from[b]);
      }
    };
    for (const auto& jk : jumps_) apply_jump(jk, jk.rate);
    for (const auto& jk : td_jumps_) {
      const double r = jk.rate_fn(t_eval);
      if (r != 0.0) apply_jump(jk, r);
    }

    // Secularized dephasing: z = Lambda + mu |d><d| with d supported on the
    // two qubit sites. Lambda rho Lambda plus the rank-1 pieces of both the
    // jump and the anticommutator (whose diagonal part sits in A already).
    for (const auto& ad : adiabatic_) {
      const double r = ad.rate;
      const double lam_t = ad.is_q1 ? ct * ct : st * st;
      const double mu = coupled ? 1.0 - 3.0 * lam_t : 0.0;
      const int q1 = ad.site_q1, q2 = ad.site_q2;

      lam_ = ad.base_diag;
      if (coupled) lam_[q1] = lam_[ad.site_mode] = lam_[q2] = lam_t;
      for (int i = 0; i < dim_; ++i) {
        const double li = r * lam_[i];
        for (int j = 0; j < dim_; ++j) out(i, j) += li * lam_[j] * rho(i, j);
      }

      u_ = ct * rho.col(q1) - st * rho.col(q2);            // rho d
      w_ = lam_.cast<Complex>().asDiagonal() * u_;         // Lambda rho d
      const double s = (ct * u_[q1].real() - st * u_[q2].real());  // d+ rho d

      const double nu = mu * (2.0 * lam_t + mu);
      const double a = -0.5 * r * nu;  // anticommutator rank-1 weight
      out.col(q1) += (a * ct) * u_;
      out.col(q2) += (-a * st) * u_;
      out.row(q1) += (a * ct) * u_.adjoint();
      out.row(q2) += (-a * st) * u_.adjoint();

      const double c = r * mu;  // jump cross weight
      out.col(q1) += (c * ct) * w_;
      out.col(q2) += (-c * st) * w_;
      out.row(q1) += (c * ct) * w_.adjoint();
      out.row(q2) += (-c * st) * w_.adjoint();

      const double q = r * mu * mu * s;  // jump scalar piece
      out(q1, q1) += q * ct * ct;
      out(q1, q2) -= q * ct * st;
      out(q2, q1) -= q * ct * st;
      out(q2, q2) += q * st * st;
    }

    // Generic dense channels (arbitrary collapse operators).
    for (const auto& dk : dense_) {
      const double r = dk.rate_fn ? dk.rate_fn(t_eval) : dk.rate;
      if (r == 0.0) continue;
      const Matrix rho_c = rho;  // column-major copies for Eigen products
      const Matrix sandwich = dk.c * rho_c * dk.c.adjoint();
      const Matrix anti = dk.cdagc * rho_c + rho_c * dk.cdagc;
      out += (r * (sandwich - 0.5 * anti));
    }
  }

 private:
  Schedule schedule_;
  int dim_;
  CompiledHamiltonian ham_;
  std::vector<Complex> vals_;
  RealVector static_diag_;
  std::vector<JumpKernel> jumps_;
  std::vector<JumpKernel> td_jumps_;
  std::vector<DenseKernel> dense_;
  std::vector<AdiabaticDephasing> adiabatic_;
  RowMatrix k_;
  RealVector lam_;
  Vector u_, w_;
};

struct Observables {
  RealVector q1;
  RealVector q2;
  std::vector<RealVector> modes;
};

double diag_expectation(const RowMatrix& rho, const RealVector& diag) {
  double s = 0.0;
  for (int i = 0; i < diag.size(); ++i) s += diag[i] * rho(i, i).real();
  return s;
}

void rk4_step(Rhs& rhs, double t, double h, double t_right, RowMatrix& rho,
              RowMatrix& k1, RowMatrix& k2, RowMatrix& k3, RowMatrix& k4,
              RowMatrix& tmp) {
  rhs(t, t_right, rho, k1);
  tmp = rho + (0.5 * h) * k1;
  rhs(t + 0.5 * h, t_right, tmp, k2);
  tmp = rho + (0.5 * h) * k2;
  rhs(t + 0.5 * h, t_right, tmp, k3);
  tmp = rho + h * k3;
  rhs(t + h, t_right, tmp, k4);
  rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

std::vector<double> sample_grid(double duration_ns, double dt_ns) {
  if (duration_ns < 0.0 || dt_ns <= 0.0)
    throw std::invalid_argument("invalid sample grid");
  std::vector<double> out;
  const int n = std::max(1, static_cast<int>(std::ceil(duration_ns / dt_ns - 1e-12)));
  out.reserve(n + 1);
  for (int k = 0; k <= n; ++k) out.push_back(duration_ns * k / n);
  return out;
}

Trajectory evolve(const LindbladProblem& problem, std::span<const double> sample_times) {
  const SpaceLayout& layout = problem.initial.layout;
  const std::int64_t dim64 = layout.dimension();
  if (dim64 > kMaxDenseDimension)
    throw std::invalid_argument(
        "density-matrix integration is limited to small spaces; "
        "use the single-excitation layout");
  if (problem.model.layout != layout)
    throw std::invalid_argument("initial state layout does not match model");
  validate(problem.initial);
  if (problem.duration_ns < 0.0) throw std::invalid_argument("negative duration");
  if (problem.step.max_step_ns <= 0.0) throw std::invalid_argument("non-positive step");

  std::vector<double> samples(sample_times.begin(), sample_times.end());
  if (samples.empty()) samples = {problem.duration_ns};
  if (!std::is_sorted(samples.begin(), samples.end()))
    throw std::invalid_argument("sample times must be sorted");
  if (samples.front() < -1e-12 || samples.back() > problem.duration_ns + 1e-9)
    throw std::invalid_argument("sample times outside duration");

  // Integration checkpoints: every sample and every schedule breakpoint.
  std::vector<double> checkpoints = samples;
  for (double b : problem.model.schedule.breakpoints())
    if (b > 1e-12 && b < problem.duration_ns - 1e-12) checkpoints.push_back(b);
  checkpoints.push_back(0.0);
  checkpoints.push_back(problem.duration_ns);
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end(),
                                [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                    checkpoints.end());

  Rhs rhs(problem);
  const int dim = rhs.dim();

  Observables obs;
  obs.q1 = q1_number_diagonal(layout);
  obs.q2 = q2_number_diagonal(layout);
  for (int n = -layout.n_side_modes(); n <= layout.n_side_modes(); ++n)
    obs.modes.push_back(mode_number_diagonal(layout, n));

  Trajectory traj;
  traj.mode_populations.resize(obs.modes.size());

  RowMatrix rho = problem.initial.rho;
  RowMatrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), tmp(dim, dim);
  RowMatrix check_prev(dim, dim), check_half(dim, dim);

  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.pe_q1.push_back(diag_expectation(rho, obs.q1));
    traj.pe_q2.push_back(diag_expectation(rho, obs.q2));
    for (std::size_t m = 0; m < obs.modes.size(); ++m)
      traj.mode_populations[m].push_back(diag_expectation(rho, obs.modes[m]));
    double tr = 0.0;
    for (int i = 0; i < dim; ++i) tr += rho(i, i).real();
    traj.trace_error.push_back(std::abs(tr - 1.0));
  };

  std::size_t next_sample = 0;
  auto record_if_sample = [&](double t) {
    while (next_sample < samples.size() && std::abs(samples[next_sample] - t) < 1e-9) {
      record(t);
      ++next_sample;
    }
  };

  long step_count = 0;
  record_if_sample(0.0);
  for (std::size_t seg = 0; seg + 1 < checkpoints.size(); ++seg) {
    const double a = checkpoints[seg];
    const double b = checkpoints[seg + 1];
    const double span = b - a;
    if (span <= 0.0) continue;
    const long n_steps =
        std::max<long>(1, static_cast<long>(std::ceil(span / problem.step.max_step_ns - 1e-12)));
    const double h = span / static_cast<double>(n_steps);
    // Stage evaluations never cross the segment's right edge, so relay
    // segments see only their own coupling values.
    const double t_right = std::nextafter(b, a);
    for (long s = 0; s < n_steps; ++s) {
      const double t = a + h * static_cast<double>(s);
      const bool do_check = problem.step.stiffness_check &&
                            (step_count % problem.step.check_interval == 0);
      if (do_check) check_prev = rho;
      rk4_step(rhs, t, h, t_right, rho, k1, k2, k3, k4, tmp);
      ++step_count;
      if (do_check) {
        check_half = check_prev;
        rk4_step(rhs, t, 0.5 * h, t_right, check_half, k1, k2, k3, k4, tmp);
        rk4_step(rhs, t + 0.5 * h, 0.5 * h, t_right, check_half, k1, k2, k3, k4, tmp);
        const double err = (check_half - rho).cwiseAbs().maxCoeff();
        if (!std::isfinite(err) || err > problem.step.stiffness_tol)
          throw IntegrationError(
              "step-doubling error estimate " + std::to_string(err) +
                  " exceeds tolerance; reduce max_step or relax rates",
              t + h);
        // Keep the one-step solution: the estimate is a guard, not a
        // corrector, so results do not depend on the check interval.
      }
    }
    record_if_sample(b);
  }

  if (next_sample != samples.size())
    throw IntegrationError("sample time missed (not aligned with checkpoints)",
                           samples[next_sample]);

  double tr = 0.0;
  for (int i = 0; i < dim; ++i) tr += rho(i, i).real();
  if (std::abs(tr - 1.0) > 1e-6)
    throw IntegrationError("trace drifted to " + std::to_string(tr), problem.duration_ns);

  traj.final_state = DensityMatrix{layout, Matrix(rho)};
  // Positivity tolerance 1e-7 here; the tighter DensityMatrix bound applies
  // to reconstructed states, not to raw integrator output.
  if (problem.step.validate_final &&
      !is_physical(traj.final_state.rho, kHermitianTol, kTraceTol, 1e-7))
    throw IntegrationError("final state violates the density-matrix invariants",
                           problem.duration_ns);
  return traj;
}

double transfer_efficiency(const Trajectory& traj) {
  if (traj.times.empty()) throw std::invalid_argument("empty trajectory");
  if (std::abs(traj.times.front()) > 1e-9)
    throw std::invalid_argument("trajectory must include t = 0");
  const double p0 = traj.pe_q1.front();
  if (p0 <= 0.0)
    throw std::invalid_argument("undefined transfer efficiency: P_e,Q1(0) = 0");
  return traj.pe_q2.back() / p0;
}

std::vector<SweepRow> sweep(std::span<const double> values,
                            const std::function<double(double)>& metric_fn,
                            int workers) {
  std::vector<SweepRow> rows(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) rows[i].value = values[i];
  if (rows.empty()) return rows;

  auto run_row = [&](std::size_t i) {
    try {
      rows[i].metric = metric_fn(rows[i].value);
      rows[i].ok = true;
    } catch (const std::exception& e) {
      rows[i].ok = false;
      rows[i].error = e.what();
    }
  };

  workers = std::max(1, workers);
  if (workers == 1 || rows.size() == 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) run_row(i);
    return rows;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int n_threads = std::min<std::size_t>(workers, rows.size());
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
        run_row(i);
    });
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace qlink
