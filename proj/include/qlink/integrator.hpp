#pragma once

#include "qlink/model.hpp"
#include "qlink/statespace.hpp"

#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Fixed-step order-4 integration of the Lindblad master equation
//
//   drho/dt = -i [H(t), rho] + sum_k r_k (c_k rho c_k+ - 1/2 {c_k+ c_k, rho}).
//
// H(t) is evaluated at the integrator substage times; relay discontinuities
// are handled by splitting the integration at segment boundaries. Collapse
// operators are given as dense matrices; operators with at most one nonzero
// per row (every lowering and dephasing operator used here) are applied
// through a compiled index representation, everything else falls back to
// dense products.

namespace qlink {

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t_ns)
      : std::runtime_error(what + " at t = " + std::to_string(t_ns) + " ns"),
        t_ns_(t_ns) {}
  double time_ns() const { return t_ns_; }

 private:
  double t_ns_;
};

struct CollapseChannel {
  Operator op;
  double rate = 0.0;  // 1/ns
  // Optional time-dependent rate; takes precedence over `rate` when set.
  std::function<double(double)> rate_fn;
  std::string label;
};

// Pure dephasing of one qubit by slow (quasi-static dominated) sigma_z
// noise, secularized in the instantaneous eigenbasis of the coupled system:
// eigenstate superpositions dephase at the measured low-frequency rate while
// populations of the gapped eigenstates are untouched, since the noise has
// no spectral weight at the dark-bright splitting. On the central triad the
// projected operator is analytic,
//   q1: cos^2(th) I - (3 cos^2(th) - 1) |D(th)><D(th)|,
//   q2: sin^2(th) I - (3 sin^2(th) - 1) |D(th)><D(th)|,
// with bare sigma_z diagonals on every other basis state.
struct AdiabaticDephasingChannel {
  int qubit = 1;      // 1 or 2
  double rate = 0.0;  // 1/(2 Tphi), 1/ns
};

struct StepControl {
  double max_step_ns = 0.05;
  // Step-doubling error estimate, run every `check_interval` steps; guards
  // against stiffness from very short mode lifetimes.
  bool stiffness_check = true;
  double stiffness_tol = 1e-5;
  int check_interval = 200;
  // Check the density-matrix invariants on the final state. Disable for
  // deliberately coarse-step studies (convergence-order measurements).
  bool validate_final = true;
};

struct LindbladProblem {
  HamiltonianModel model;
  std::vector<CollapseChannel> collapse;
  std::vector<AdiabaticDephasingChannel> adiabatic_dephasing;
  DensityMatrix initial;
  double duration_ns = 0.0;
  StepControl step;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> pe_q1;
  std::vector<double> pe_q2;
  // Indexed [mode - (-N)][sample], modes ascending -N..N.
  std::vector<std::vector<double>> mode_populations;
  std::vector<double> trace_error;
  DensityMatrix final_state;
};

// Pure-dephasing time from 1/Tphi = 1/T2R - 1/(2 T1); units follow the
// inputs. Returns +infinity when T2R = 2 T1 (no dephasing). Throws when
// T2R > 2 T1.
double compute_tphi(double t1_int, double t2_ramsey);

// Integrates the problem, sampling populations at the requested times
// (sorted, within [0, duration]). The final state is validated against the
// density-matrix invariants.
Trajectory evolve(const LindbladProblem& problem, std::span<const double> sample_times);

// Uniformly spaced sample grid including both endpoints.
std::vector<double> sample_grid(double duration_ns, double dt_ns);

// eta = P_e,Q2(t_f) / P_e,Q1(0). Throws if the initial population vanishes.
double transfer_efficiency(const Trajectory& traj);

struct SweepRow {
  double value = 0.0;
  double metric = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
  std::string error;
};

// Evaluates metric_fn at every value, fanning rows out to a worker pool.
// Rows are merged in input order, so the result is identical for any worker
// count; per-row failures are recorded and the sweep continues.
std::vector<SweepRow> sweep(std::span<const double> values,
                            const std::function<double(double)>& metric_fn,
                            int workers = 1);

}  // namespace qlink
