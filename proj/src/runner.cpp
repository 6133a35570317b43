#include "qlink/runner.hpp"

#include "qlink/presets.hpp"
#include "qlink/version.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <iostream>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace qlink {

namespace {

constexpr double kPi = std::numbers::pi;

double mhz_to_rad_per_ns(double mhz) { return kTwoPi * mhz * 1e-3; }

template <typename F>
void parallel_for(std::size_t n, int workers, F&& body) {
  workers = std::max(1, workers);
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t n_threads = std::min<std::size_t>(workers, n);
  for (std::size_t w = 0; w < n_threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  for (auto& th : pool) th.join();
}

Schedule schedule_from_config(const RunConfig& c) {
  Schedule s;
  s.protocol = c.protocol;
  s.gbar = mhz_to_rad_per_ns(c.gbar_mhz);
  s.t_f = c.tf_ns;
  s.relay_g = mhz_to_rad_per_ns(c.relay_g_mhz);
  if (c.protocol == Protocol::AdiabaticHalf) s.ramp_off_ns = c.ramp_off_ns;
  return s;
}

double max_coupling(const RunConfig& c) {
  return (c.protocol == Protocol::RelayTransfer || c.protocol == Protocol::RelayHalf)
             ? mhz_to_rad_per_ns(c.relay_g_mhz)
             : mhz_to_rad_per_ns(c.gbar_mhz);
}

Json tool_header(const std::string& command, const RunConfig& c) {
  Json j;
  j["schema"] = kMetricsSchema;
  j["tool"] = Json{{"name", kToolName}, {"version", kToolVersion}};
  j["command"] = command;
  if (!c.preset_name.empty()) j["preset"] = c.preset_name;
  Json params;
  params["protocol"] = static_cast<int>(c.protocol);
  params["gbar_mhz"] = c.gbar_mhz;
  params["tf_ns"] = c.tf_ns;
  params["relay_g_mhz"] = c.relay_g_mhz;
  params["t1r_ns"] = c.t1r_ns;
  params["lossless"] = c.lossless;
  params["spurious_loading"] = c.spurious_loading;
  params["spurious_detuning_mhz"] = c.spurious_detuning_mhz;
  params["n_side_modes"] = c.n_side_modes;
  params["subspace"] = c.subspace;
  params["step_ns"] = c.step_ns;
  params["shots"] = c.shots;
  params["seed"] = c.seed;
  j["params"] = params;
  return j;
}

void finalize_bundle(ResultBundle& bundle, const RunConfig& config) {
  write_json_file(bundle.out_dir / "metrics.json", bundle.metrics);
  bundle.files.push_back("metrics.json");
  write_text_file(bundle.out_dir / "config_snapshot.cfg", run_config_to_text(config));
  bundle.files.push_back("config_snapshot.cfg");
}

}  // namespace

namespace {

// Shared problem assembly; `with_spurious` is off for segments where the
// couplers are idle (no loading path without an active coupler).
LindbladProblem assemble_problem(const RunConfig& config, const SpaceLayout& layout,
                                 const Schedule& schedule, DensityMatrix initial,
                                 bool with_spurious) {
  const DeviceParams& dev = config.device;

  LindbladProblem problem;
  problem.model = make_hamiltonian_model(layout, dev.fsr_rad_per_ns(), schedule);
  problem.initial = std::move(initial);
  problem.duration_ns = schedule.duration();
  problem.step.max_step_ns = config.step_ns;

  if (config.lossless) return problem;

  const double t1_q1_ns = dev.q1.t1_int_us * 1e3;
  const double t1_q2_ns = dev.q2.t1_int_us * 1e3;
  problem.collapse.push_back({q1_lowering(layout), 1.0 / t1_q1_ns, nullptr, "q1_decay"});
  problem.collapse.push_back({q2_lowering(layout), 1.0 / t1_q2_ns, nullptr, "q2_decay"});

  const bool echo = config.dephasing_basis == "echo";
  const double tphi_q1_ns =
      compute_tphi(dev.q1.t1_int_us, echo ? dev.q1.t2_echo_us : dev.q1.t2_ramsey_us) * 1e3;
  const double tphi_q2_ns =
      compute_tphi(dev.q2.t1_int_us, echo ? dev.q2.t2_echo_us : dev.q2.t2_ramsey_us) * 1e3;
  if (config.dephasing_model == "adiabatic") {
    if (std::isfinite(tphi_q1_ns))
      problem.adiabatic_dephasing.push_back({1, 1.0 / (2.0 * tphi_q1_ns)});
    if (std::isfinite(tphi_q2_ns))
      problem.adiabatic_dephasing.push_back({2, 1.0 / (2.0 * tphi_q2_ns)});
  } else {
    if (std::isfinite(tphi_q1_ns))
      problem.collapse.push_back(
          {q1_pauli_z(layout), 1.0 / (2.0 * tphi_q1_ns), nullptr, "q1_dephasing"});
    if (std::isfinite(tphi_q2_ns))
      problem.collapse.push_back(
          {q2_pauli_z(layout), 1.0 / (2.0 * tphi_q2_ns), nullptr, "q2_dephasing"});
  }

  for (int n = -config.n_side_modes; n <= config.n_side_modes; ++n)
    problem.collapse.push_back({mode_lowering(layout, n), 1.0 / config.t1r_ns, nullptr,
                                "mode_" + std::to_string(n) + "_decay"});

  if (config.spurious_loading && with_spurious) {
    // Parasitic loading of Q1 through the switch: a fixed rate per loss
    // setting, calibrated against the circuit model at the operating
    // coupling and residual detuning.
    const double t1_sp = proximity_loading_t1_ns(
        dev, config.t1r_ns, max_coupling(config) * 1e9,
        kTwoPi * config.spurious_detuning_mhz * 1e6);
    if (std::isfinite(t1_sp))
      problem.collapse.push_back(
          {q1_lowering(layout), 1.0 / t1_sp, nullptr, "q1_spurious_loading"});
  }
  return problem;
}

}  // namespace

LindbladProblem make_problem(const RunConfig& config, Complex amp_g, Complex amp_e) {
  const SpaceLayout layout = config.subspace
                                 ? SpaceLayout::single_excitation(config.n_side_modes)
                                 : SpaceLayout::full(config.n_side_modes);
  const Schedule schedule = schedule_from_config(config);
  return assemble_problem(config, layout, schedule,
                          q1_state_with_vacuum(layout, amp_g, amp_e), true);
}

namespace {

// Free evolution between the coupler switch-off and the tomography pulses:
// couplings zero, decoherence on, no loading path.
DensityMatrix evolve_dead_time(const RunConfig& config, const DensityMatrix& state) {
  if (config.idle_after_ns <= 0.0) return state;
  Schedule idle;
  idle.protocol = Protocol::AdiabaticTransfer;
  idle.gbar = 0.0;
  idle.t_f = config.idle_after_ns;
  LindbladProblem problem =
      assemble_problem(config, state.layout, idle, state, false);
  const std::array<double, 2> samples = {0.0, problem.duration_ns};
  return evolve(problem, samples).final_state;
}

struct QptOutputs {
  std::array<Matrix, 4> outputs;
  double eta = 0.0;
};

QptOutputs run_qpt_inputs(const RunConfig& config) {
  struct Prep {
    Complex g, e;
  };
  const double s = 1.0 / std::sqrt(2.0);
  const std::array<Prep, 4> preps = {
      Prep{1.0, 0.0}, Prep{s, s}, Prep{s, Complex(0.0, s)}, Prep{0.0, 1.0}};

  std::optional<AssignmentMatrix> readout;
  if (config.simulate_readout_error)
    readout = AssignmentMatrix::from_fidelities(
        config.device.q1.readout_f_g, config.device.q1.readout_f_e,
        config.device.q2.readout_f_g, config.device.q2.readout_f_e);

  QptOutputs result;
  std::array<double, 4> eta_slot{};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  parallel_for(4, config.workers, [&](std::size_t k) {
    try {
      const LindbladProblem problem = make_problem(config, preps[k].g, preps[k].e);
      const std::array<double, 2> samples = {0.0, problem.duration_ns};
      const Trajectory traj = evolve(problem, samples);
      if (k == 3) eta_slot[k] = transfer_efficiency(traj);

      const DensityMatrix measured = evolve_dead_time(config, traj.final_state);
      DensityMatrix two_qubit = reduce_to_qubits(measured);
      SyntheticNoise noise;
      noise.readout = readout;
      noise.shots = config.shots;
      noise.seed = config.seed + 1000 * k;
      auto records = simulate_measurements(two_qubit, noise);
      if (readout)
        for (auto& r : records) r.probs = correct_readout(r.probs, *readout);
      const TomographySettings settings{config.phi_for_transfer()};
      const DensityMatrix reconstructed = state_tomography(records, settings);
      const int keep_q2[] = {1};
      result.outputs[k] = partial_trace(reconstructed, keep_q2).rho;
    } catch (...) {
      std::scoped_lock lock(error_mutex);
      if (!first_error) first_error = std::current_exception();
    }
  });
  if (first_error) std::rethrow_exception(first_error);
  result.eta = eta_slot[3];
  return result;
}

}  // namespace

TransferTomographyResult simulated_process_tomography(const RunConfig& config) {
  const QptOutputs qpt = run_qpt_inputs(config);
  TransferTomographyResult out;
  out.chi = process_tomography(standard_process_inputs(), qpt.outputs);
  out.process_fidelity = process_fidelity(out.chi, identity_process());
  out.trace_distance_identity = trace_distance_chi(out.chi, identity_process());
  out.eta = qpt.eta;
  return out;
}

ResultBundle run_transfer(const RunConfig& config) {
  if (config.protocol != Protocol::AdiabaticTransfer &&
      config.protocol != Protocol::RelayTransfer)
    throw ConfigError("transfer requires a transfer protocol");

  ResultBundle bundle;
  bundle.out_dir = config.out_dir;
  bundle.metrics = tool_header("transfer", config);

  const LindbladProblem problem = make_problem(config, 0.0, 1.0);
  const std::vector<double> grid = sample_grid(problem.duration_ns, config.sample_dt_ns);
  const Trajectory traj = evolve(problem, grid);
  const double eta = transfer_efficiency(traj);

  write_trajectory_csv(bundle.out_dir / "trajectory.csv", traj, config.n_side_modes);
  bundle.files.push_back("trajectory.csv");

  const TransferTomographyResult qpt = simulated_process_tomography(config);
  write_json_file(bundle.out_dir / "chi.json", chi_to_json(qpt.chi));
  bundle.files.push_back("chi.json");

  Json metrics;
  metrics["eta"] = eta;
  metrics["pe_q1_initial"] = traj.pe_q1.front();
  metrics["pe_q2_final"] = traj.pe_q2.back();
  metrics["process_fidelity"] = qpt.process_fidelity;
  metrics["trace_distance_identity"] = qpt.trace_distance_identity;
  const Schedule schedule = schedule_from_config(config);
  if (schedule.is_adiabatic()) {
    metrics["adiabaticity_integral_rad"] = adiabaticity_integral(schedule);
    metrics["adiabaticity_ok"] = meets_adiabatic_threshold(schedule);
    if (!meets_adiabatic_threshold(schedule))
      std::cerr << "warning: pulse area below the 3*pi/2 adiabaticity threshold\n";
  }
  bundle.metrics["metrics"] = metrics;
  finalize_bundle(bundle, config);
  return bundle;
}

ResultBundle run_entangle(const RunConfig& config) {
  if (config.protocol != Protocol::AdiabaticHalf && config.protocol != Protocol::RelayHalf)
    throw ConfigError("entangle requires a half protocol");

  ResultBundle bundle;
  bundle.out_dir = config.out_dir;
  bundle.metrics = tool_header("entangle", config);

  const LindbladProblem problem = make_problem(config, 0.0, 1.0);
  const std::vector<double> grid = sample_grid(problem.duration_ns, config.sample_dt_ns);
  const Trajectory traj = evolve(problem, grid);

  write_trajectory_csv(bundle.out_dir / "trajectory.csv", traj, config.n_side_modes);
  bundle.files.push_back("trajectory.csv");

  // Reconstruct the two-qubit state through the tomography pipeline; the
  // tomography pulses start one dead time after the coupler switch-off.
  const DensityMatrix exact = reduce_to_qubits(evolve_dead_time(config, traj.final_state));
  SyntheticNoise noise;
  if (config.simulate_readout_error)
    noise.readout = AssignmentMatrix::from_fidelities(
        config.device.q1.readout_f_g, config.device.q1.readout_f_e,
        config.device.q2.readout_f_g, config.device.q2.readout_f_e);
  noise.shots = config.shots;
  noise.seed = config.seed;
  auto records = simulate_measurements(exact, noise);
  if (noise.readout)
    for (auto& r : records) r.probs = correct_readout(r.probs, *noise.readout);
  const TomographySettings settings{config.phi_q2_auto ? 0.0 : config.phi_q2_rad};
  const DensityMatrix rho = state_tomography(records, settings);

  write_json_file(bundle.out_dir / "state.json", density_to_json(rho, "q1q2"));
  bundle.files.push_back("state.json");

  const Eigen::Matrix4d pauli = pauli_expectations(rho);
  {
    static const char* kLabels[] = {"I", "X", "Y", "Z"};
    std::string csv = "pauli_q1,pauli_q2,expectation\n";
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        csv += std::string(kLabels[i]) + "," + kLabels[j] + "," +
               format_double(pauli(i, j)) + "\n";
    write_text_file(bundle.out_dir / "pauli_expectations.csv", csv);
    bundle.files.push_back("pauli_expectations.csv");
  }

  Json metrics;
  metrics["bell_fidelity"] = state_fidelity(rho, bell_singlet());
  metrics["concurrence"] = concurrence(rho);
  metrics["pe_q1_final"] = traj.pe_q1.back();
  metrics["pe_q2_final"] = traj.pe_q2.back();
  metrics["xx"] = pauli(1, 1);
  metrics["yy"] = pauli(2, 2);
  metrics["zz"] = pauli(3, 3);
  bundle.metrics["metrics"] = metrics;
  finalize_bundle(bundle, config);
  return bundle;
}

namespace {

RunConfig config_with_value(const RunConfig& base, const std::string& parameter,
                            double value) {
  RunConfig c = base;
  if (parameter == "t_f")
    c.tf_ns = value;
  else if (parameter == "gbar")
    c.gbar_mhz = value;
  else if (parameter == "t1r")
    c.t1r_ns = value;
  else if (parameter == "relay_g")
    c.relay_g_mhz = value;
  else
    throw ConfigError("unknown sweep parameter '" + parameter + "'");
  c.validate();
  return c;
}

double run_eta_only(const RunConfig& config) {
  const LindbladProblem problem = make_problem(config, 0.0, 1.0);
  const std::array<double, 2> samples = {0.0, problem.duration_ns};
  return transfer_efficiency(evolve(problem, samples));
}

// Transfer efficiency with the transfer time scaled to the coupling: every
// point runs at the n = 2 dark-state return, the design rule behind the
// reference protocol (gbar * t_f held at 2 pi sqrt(4 - 1/16)).
double eta_at_scaled_tf(const RunConfig& config) {
  RunConfig c = config;
  const double gbar = mhz_to_rad_per_ns(config.gbar_mhz);
  c.tf_ns = dark_state_return_times(gbar, 2)[1];
  c.validate();
  return run_eta_only(c);
}

}  // namespace

ResultBundle run_sweep(const RunConfig& config) {
  if (config.sweep_parameter.empty())
    throw ConfigError("sweep requires [sweep] parameter and values");

  ResultBundle bundle;
  bundle.out_dir = config.out_dir;
  bundle.metrics = tool_header("sweep", config);

  const bool with_fp = config.sweep_metric == "fp";
  struct Row {
    double value = 0.0;
    double eta = std::numeric_limits<double>::quiet_NaN();
    double fp = std::numeric_limits<double>::quiet_NaN();
    double dist = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string error;
  };
  std::vector<Row> rows(config.sweep_values.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].value = config.sweep_values[i];

  parallel_for(rows.size(), config.workers, [&](std::size_t i) {
    Row& row = rows[i];
    try {
      RunConfig c = config_with_value(config, config.sweep_parameter, row.value);
      c.workers = 1;  // rows are already parallel
      if (config.sweep_scaled_tf) {
        row.eta = eta_at_scaled_tf(c);
      } else if (with_fp) {
        const TransferTomographyResult qpt = simulated_process_tomography(c);
        row.eta = qpt.eta;
        row.fp = qpt.process_fidelity;
        row.dist = qpt.trace_distance_identity;
      } else {
        row.eta = run_eta_only(c);
      }
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });

  // CSV table.
  std::vector<std::string> header = {config.sweep_parameter == "t_f"       ? "tf_ns"
                                     : config.sweep_parameter == "gbar"    ? "gbar_mhz"
                                     : config.sweep_parameter == "relay_g" ? "relay_g_mhz"
                                                                           : "t1r_ns",
                                     "eta"};
  if (with_fp) {
    header.push_back("process_fidelity");
    header.push_back("trace_distance_identity");
  }
  header.push_back("ok");
  std::vector<std::vector<double>> csv_rows;
  for (const Row& r : rows) {
    std::vector<double> line = {r.value, r.eta};
    if (with_fp) {
      line.push_back(r.fp);
      line.push_back(r.dist);
    }
    line.push_back(r.ok ? 1.0 : 0.0);
    csv_rows.push_back(std::move(line));
  }
  write_csv(bundle.out_dir / "sweep.csv", header, csv_rows);
  bundle.files.push_back("sweep.csv");

  // Summary: argmax and interior local maxima of the headline metric.
  const auto metric_of = [&](const Row& r) { return with_fp ? r.fp : r.eta; };
  Json rows_json = Json::array();
  int argmax = -1;
  int failed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    Json jr;
    jr["value"] = r.value;
    jr["eta"] = r.eta;
    if (with_fp) {
      jr["process_fidelity"] = r.fp;
      jr["trace_distance_identity"] = r.dist;
    }
    jr["ok"] = r.ok;
    if (!r.ok) {
      jr["error"] = r.error;
      ++failed;
    }
    rows_json.push_back(std::move(jr));
    if (r.ok && (argmax < 0 || metric_of(r) > metric_of(rows[argmax])))
      argmax = static_cast<int>(i);
  }
  Json local_maxima = Json::array();
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    if (!rows[i].ok || !rows[i - 1].ok || !rows[i + 1].ok) continue;
    if (metric_of(rows[i]) > metric_of(rows[i - 1]) &&
        metric_of(rows[i]) > metric_of(rows[i + 1]))
      local_maxima.push_back(Json{{"value", rows[i].value}, {"metric", metric_of(rows[i])}});
  }

  Json metrics;
  metrics["n_values"] = rows.size();
  metrics["failed_rows"] = failed;
  if (argmax >= 0) {
    metrics["argmax_value"] = rows[argmax].value;
    metrics["max_metric"] = metric_of(rows[argmax]);
    metrics["max_eta"] = rows[argmax].eta;
  }
  bundle.metrics["metrics"] = metrics;
  bundle.metrics["local_maxima"] = local_maxima;
  bundle.metrics["rows"] = rows_json;
  finalize_bundle(bundle, config);
  return bundle;
}

ResultBundle run_circuit(const RunConfig& config) {
  ResultBundle bundle;
  bundle.out_dir = config.out_dir;
  bundle.metrics = tool_header("circuit", config);

  const ChannelParams& chan = config.device.channel;
  const ModeRLC rlc = mode_rlc(chan, operating_mode_index(chan));
  const double implied_t1r = implied_intrinsic_t1r_ns(chan);

  // Effective load ladder.
  {
    std::vector<std::vector<double>> rows;
    for (double t1r : standard_loss_ladder()) {
      const EffectiveLoad load = effective_load(t1r, chan.t1r_int_ns, rlc.l_h);
      rows.push_back({t1r, load.t1r_ext_ns, load.r_ohm});
    }
    write_csv(bundle.out_dir / "effective_load.csv",
              {"t1r_ns", "t1r_ext_ns", "r_l_eff_ohm"}, rows);
    bundle.files.push_back("effective_load.csv");
  }

  const LoadingNetwork network = make_loading_network(config.device, config.t1r_ns);
  const double g1 = mhz_to_rad_per_ns(config.gbar_mhz) * 1e9;  // rad/s
  const double dw_sp = kTwoPi * config.spurious_detuning_mhz * 1e6;

  // T1 vs detuning at the operating coupling.
  {
    std::vector<std::vector<double>> rows;
    for (int k = -80; k <= 80; ++k) {
      const double dw_mhz = 2.0 * k / 80.0;  // +-2 MHz
      const double t1 =
          loaded_q1_t1_ns(network, kTwoPi * dw_mhz * 1e6, g1);
      rows.push_back({dw_mhz, t1});
    }
    write_csv(bundle.out_dir / "t1_vs_detuning.csv", {"detuning_mhz", "t1_ns"}, rows);
    bundle.files.push_back("t1_vs_detuning.csv");
  }

  // T1 vs coupling at the residual detuning.
  {
    std::vector<double> g_grid, dw_grid = {dw_sp};
    for (int k = 1; k <= 40; ++k) g_grid.push_back(kTwoPi * 0.5e6 * k);  // 0.5..20 MHz
    const T1Table table = t1_lookup_table(network, g_grid, dw_grid);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < g_grid.size(); ++i)
      rows.push_back({g_grid[i] / (kTwoPi * 1e6), table.at(i, 0)});
    write_csv(bundle.out_dir / "t1_vs_coupling.csv", {"g1_mhz", "t1_ns"}, rows);
    bundle.files.push_back("t1_vs_coupling.csv");
  }

  // Import/export grid for integrator consumption.
  {
    std::vector<double> g_grid, dw_grid;
    for (int k = 1; k <= 10; ++k) g_grid.push_back(kTwoPi * 2.0e6 * k);
    for (int k = 0; k <= 8; ++k) dw_grid.push_back(kTwoPi * 0.25e6 * k);
    write_t1_table_csv(bundle.out_dir / "t1_table.csv",
                       t1_lookup_table(network, g_grid, dw_grid));
    bundle.files.push_back("t1_table.csv");
  }

  Json metrics;
  metrics["mode_index"] = operating_mode_index(chan);
  metrics["ln_nh"] = rlc.l_h * 1e9;
  metrics["rn_ohm"] = rlc.r_ohm;
  metrics["cn_ff"] = rlc.c_f * 1e15;
  metrics["implied_t1r_int_ns"] = implied_t1r;
  metrics["r_l_eff_ohm"] = network.r_load_ohm;
  metrics["loaded_t1_ns"] = loaded_q1_t1_ns(network, dw_sp, g1);
  bundle.metrics["metrics"] = metrics;
  finalize_bundle(bundle, config);
  return bundle;
}

int run_tomography_file(const std::filesystem::path& input,
                        const std::filesystem::path& out_dir, std::ostream& log) {
  const Json doc = read_json_file(input);
  const std::string task = doc.value("task", "");
  if (task == "readout_correction") {
    Eigen::Matrix4d m;
    const auto& mj = doc.at("assignment_matrix");
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = mj.at(r).at(c).get<double>();
    const AssignmentMatrix am =
        AssignmentMatrix::from_matrix(m, doc.value("renormalize", false));
    Eigen::Vector4d raw;
    for (int k = 0; k < 4; ++k) raw[k] = doc.at("raw_probs").at(k).get<double>();
    const Eigen::Vector4d corrected = correct_readout(raw, am);
    Json out;
    out["task"] = task;
    out["corrected_probs"] = {corrected[0], corrected[1], corrected[2], corrected[3]};
    write_json_file(out_dir / "corrected.json", out);
    log << "wrote " << (out_dir / "corrected.json").string() << "\n";
    return 0;
  }
  if (task == "state_tomography") {
    std::vector<MeasurementRecord> records;
    auto gate_of = [](const std::string& s) {
      if (s == "I") return TomoGate::I;
      if (s == "Xhalf") return TomoGate::Xhalf;
      if (s == "Yhalf") return TomoGate::Yhalf;
      throw std::runtime_error("unknown gate '" + s + "'");
    };
    for (const auto& rj : doc.at("records")) {
      MeasurementRecord r;
      r.gate_q1 = gate_of(rj.at("gate_q1").get<std::string>());
      r.gate_q2 = gate_of(rj.at("gate_q2").get<std::string>());
      for (int k = 0; k < 4; ++k) r.probs[k] = rj.at("probs").at(k).get<double>();
      records.push_back(r);
    }
    const TomographySettings settings{doc.value("phi_q2_rad", 0.0)};
    const DensityMatrix rho = state_tomography(records, settings);
    write_json_file(out_dir / "state.json", density_to_json(rho, "q1q2"));
    log << "wrote " << (out_dir / "state.json").string() << "\n";
    return 0;
  }
  if (task == "process_tomography") {
    std::array<Matrix, 4> outputs;
    const auto& oj = doc.at("outputs");
    if (oj.size() != 4) throw std::runtime_error("process_tomography needs 4 outputs");
    for (int k = 0; k < 4; ++k) outputs[k] = matrix_from_json(oj.at(k));
    const ProcessMatrix chi = process_tomography(standard_process_inputs(), outputs);
    Json out = chi_to_json(chi);
    out["process_fidelity_identity"] = process_fidelity(chi, identity_process());
    write_json_file(out_dir / "chi.json", out);
    log << "wrote " << (out_dir / "chi.json").string() << "\n";
    return 0;
  }
  log << "unknown tomography task '" << task << "'\n";
  return 2;
}

int compare_metrics(const std::filesystem::path& a, const std::filesystem::path& b,
                    const std::optional<std::filesystem::path>& tolerances,
                    std::ostream& report) {
  const Json ja = read_json_file(a);
  const Json jb = read_json_file(b);
  if (!ja.contains("metrics") || !jb.contains("metrics")) {
    report << "FAIL schema: missing 'metrics' object\n";
    return 4;
  }
  Json tol = Json::object();
  if (tolerances) tol = read_json_file(*tolerances);
  const double default_tol = tol.value("default", 0.0);

  bool all_pass = true;
  const Json& ma = ja["metrics"];
  const Json& mb = jb["metrics"];
  for (auto it = ma.begin(); it != ma.end(); ++it) {
    const std::string& key = it.key();
    if (!mb.contains(key)) {
      report << "FAIL " << key << ": missing in " << b.string() << "\n";
      all_pass = false;
      continue;
    }
    if (!it.value().is_number()) {
      const bool same = it.value() == mb[key];
      report << (same ? "PASS " : "FAIL ") << key << "\n";
      all_pass = all_pass && same;
      continue;
    }
    const double va = it.value().get<double>();
    const double vb = mb[key].get<double>();
    const double t = tol.value(key, default_tol);
    const double delta = std::abs(va - vb);
    const double rel = (va != 0.0) ? delta / std::abs(va) : delta;
    const bool pass = delta <= t;
    report << (pass ? "PASS " : "FAIL ") << key << " a=" << format_double(va)
           << " b=" << format_double(vb) << " |delta|=" << format_double(delta)
           << " rel=" << format_double(rel) << " tol=" << format_double(t) << "\n";
    all_pass = all_pass && pass;
  }
  for (auto it = mb.begin(); it != mb.end(); ++it)
    if (!ma.contains(it.key())) {
      report << "FAIL " << it.key() << ": missing in " << a.string() << "\n";
      all_pass = false;
    }
  return all_pass ? 0 : 4;
}

}  // namespace qlink
