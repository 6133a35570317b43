// Command-line front end: transfer, entangle, sweep, circuit, tomography,
// compare, validate. Exit codes: 0 success, 2 configuration error,
// 3 integration failure (or partial sweep failure), 4 regression failure.

#include "qlink/config.hpp"
#include "qlink/integrator.hpp"
#include "qlink/presets.hpp"
#include "qlink/runner.hpp"
#include "qlink/version.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  int workers = 0;
  long seed = -1;
  bool no_spurious = false;
  bool subspace = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "run configuration file");
  cmd->add_option("--preset", opts.preset, "named experiment preset");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--workers", opts.workers, "worker threads for sweeps and tomography");
  cmd->add_option("--seed", opts.seed, "seed for optional shot noise");
  cmd->add_flag("--no-spurious-loading", opts.no_spurious,
                "disable the parasitic Q1 loading model");
  cmd->add_flag("--subspace", opts.subspace,
                "integrate in the single-excitation subspace");
}

qlink::RunConfig resolve_config(const CommonOpts& opts) {
  qlink::RunConfig config;
  if (!opts.preset.empty() && !opts.config_path.empty())
    throw qlink::ConfigError("--preset and --config are mutually exclusive");
  if (!opts.preset.empty())
    config = qlink::preset(opts.preset);
  else if (!opts.config_path.empty())
    config = qlink::run_config_from_file(opts.config_path);
  else
    throw qlink::ConfigError("one of --preset or --config is required");

  if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
  if (opts.workers > 0) config.workers = opts.workers;
  if (opts.seed >= 0) config.seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.no_spurious) config.spurious_loading = false;
  if (opts.subspace) config.subspace = true;
  config.validate();
  return config;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const qlink::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qlink::IntegrationError& e) {
    std::cerr << "integration failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

void print_metrics(const qlink::ResultBundle& bundle) {
  if (bundle.metrics.contains("metrics"))
    for (auto it = bundle.metrics["metrics"].begin(); it != bundle.metrics["metrics"].end();
         ++it)
      std::cout << "  " << it.key() << " = " << it.value().dump() << "\n";
  std::cout << "results in " << bundle.out_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(qlink::kToolName) +
               " - adiabatic and relay state transfer through a lossy multimode channel"};
  app.set_version_flag("--version", qlink::kToolVersion);
  app.require_subcommand(1);

  CommonOpts transfer_opts, entangle_opts, sweep_opts, circuit_opts, validate_opts;

  auto* transfer = app.add_subcommand("transfer", "state transfer with process tomography");
  add_common(transfer, transfer_opts);

  auto* entangle = app.add_subcommand("entangle", "Bell state generation and tomography");
  add_common(entangle, entangle_opts);

  auto* sweep = app.add_subcommand("sweep", "parameter sweep");
  add_common(sweep, sweep_opts);

  auto* circuit = app.add_subcommand("circuit", "lumped-element channel and loading model");
  add_common(circuit, circuit_opts);

  std::string tomo_input, tomo_out = "results";
  auto* tomo = app.add_subcommand("tomography", "run estimators on stored data files");
  tomo->add_option("input", tomo_input, "input JSON document")->required();
  tomo->add_option("--out", tomo_out, "output directory");

  std::string cmp_a, cmp_b, cmp_tol;
  auto* compare = app.add_subcommand("compare", "compare two metrics documents");
  compare->add_option("a", cmp_a, "metrics.json")->required();
  compare->add_option("b", cmp_b, "metrics.json or golden file")->required();
  compare->add_option("--tolerances", cmp_tol, "JSON file of absolute tolerances");

  auto* validate = app.add_subcommand("validate", "parse a configuration and echo it");
  add_common(validate, validate_opts);

  CLI11_PARSE(app, argc, argv);

  if (transfer->parsed())
    return guarded([&] {
      const auto bundle = qlink::run_transfer(resolve_config(transfer_opts));
      print_metrics(bundle);
      return 0;
    });
  if (entangle->parsed())
    return guarded([&] {
      const auto bundle = qlink::run_entangle(resolve_config(entangle_opts));
      print_metrics(bundle);
      return 0;
    });
  if (sweep->parsed())
    return guarded([&] {
      const auto bundle = qlink::run_sweep(resolve_config(sweep_opts));
      print_metrics(bundle);
      const int failed = bundle.metrics["metrics"].value("failed_rows", 0);
      if (failed > 0) {
        std::cerr << failed << " sweep row(s) failed\n";
        return 3;
      }
      return 0;
    });
  if (circuit->parsed())
    return guarded([&] {
      const auto bundle = qlink::run_circuit(resolve_config(circuit_opts));
      print_metrics(bundle);
      return 0;
    });
  if (tomo->parsed())
    return guarded([&] {
      return qlink::run_tomography_file(tomo_input, tomo_out, std::cout);
    });
  if (compare->parsed())
    return guarded([&] {
      std::optional<std::filesystem::path> tol;
      if (!cmp_tol.empty()) tol = cmp_tol;
      return qlink::compare_metrics(cmp_a, cmp_b, tol, std::cout);
    });
  if (validate->parsed())
    return guarded([&] {
      const auto config = resolve_config(validate_opts);
      std::cout << qlink::run_config_to_text(config);
      std::cout << "configuration OK\n";
      return 0;
    });
  return 0;
}
