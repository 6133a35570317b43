#pragma once

#include "qlink/circuit.hpp"
#include "qlink/config.hpp"
#include "qlink/integrator.hpp"
#include "qlink/io.hpp"
#include "qlink/tomography.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>

// Experiment drivers behind the CLI subcommands. Every driver writes a
// ResultBundle into config.out_dir: metrics.json (stable key order, no
// timing information, so repeated runs are byte-identical), CSV artifacts,
// and a self-contained config snapshot that reproduces the run.

namespace qlink {

struct ResultBundle {
  std::filesystem::path out_dir;
  Json metrics;
  std::vector<std::string> files;  // artifact names inside out_dir
};

// Lindblad problem for the configured protocol with Q1 prepared in
// amp_g |g> + amp_e |e> and the channel in vacuum.
LindbladProblem make_problem(const RunConfig& config, Complex amp_g, Complex amp_e);

struct TransferTomographyResult {
  ProcessMatrix chi;
  double process_fidelity = 0.0;
  double trace_distance_identity = 0.0;
  double eta = 0.0;  // from the |e> input run
};

// Process tomography of the configured transfer: runs the four standard
// preparations, reconstructs each Q2 output state through synthetic
// measurement data, and inverts for chi in the corrected Q2 frame.
TransferTomographyResult simulated_process_tomography(const RunConfig& config);

ResultBundle run_transfer(const RunConfig& config);
ResultBundle run_entangle(const RunConfig& config);
ResultBundle run_sweep(const RunConfig& config);
ResultBundle run_circuit(const RunConfig& config);

// Estimators over stored measurement files; writes results next to the
// input. Returns a process exit code (0 ok).
int run_tomography_file(const std::filesystem::path& input,
                        const std::filesystem::path& out_dir, std::ostream& log);

// Regression comparison of two metrics documents. Tolerances are absolute,
// from an optional JSON file {"metric": tol, "default": tol}. Returns 0 on
// pass, 4 on any failing metric or schema mismatch.
int compare_metrics(const std::filesystem::path& a, const std::filesystem::path& b,
                    const std::optional<std::filesystem::path>& tolerances,
                    std::ostream& report);

}  // namespace qlink
