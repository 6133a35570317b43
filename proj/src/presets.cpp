#include "qlink/presets.hpp"

#include <cmath>

namespace qlink {

DeviceParams default_device() {
  DeviceParams d;
  d.q1.omega_idle_ghz = 5.504;
  d.q1.t1_int_us = 11.5;
  d.q1.t2_ramsey_us = 1.11;
  d.q1.t2_echo_us = 4.09;
  d.q1.readout_f_g = 0.966;
  d.q1.readout_f_e = 0.881;
  d.q1.lq_nh = 7.2;
  d.q1.anharmonicity_mhz = -168.0;

  d.q2.omega_idle_ghz = 5.419;
  d.q2.t1_int_us = 9.1;
  d.q2.t2_ramsey_us = 1.15;
  d.q2.t2_echo_us = 3.54;
  d.q2.readout_f_g = 0.959;
  d.q2.readout_f_e = 0.888;
  d.q2.lq_nh = 7.5;
  d.q2.anharmonicity_mhz = -171.0;

  d.channel.z0_ohm = 50.0;
  d.channel.alpha_db_per_m = 0.010;
  d.channel.inductance_nh_per_m = 402.0;
  d.channel.length_m = 0.73;
  d.channel.fsr_mhz = 84.0;
  d.channel.mode_freq_ghz = 5.351;
  d.channel.t1r_int_ns = 3410.0;

  d.coupler.cq_ff = 90.0;
  d.coupler.lt_nh = 0.61;
  d.coupler.lg_nh = 0.2;
  // Stub between the bridge and the load node: 1.6 mm of line at 402 nH/m.
  d.coupler.ls_nh = 1.6e-3 * 402.0;
  return d;
}

AssignmentMatrix default_assignment_matrix() {
  Eigen::Matrix4d m;
  m << 0.926, 0.107, 0.114, 0.013,  //
      0.040, 0.865, 0.005, 0.120,   //
      0.033, 0.005, 0.853, 0.107,   //
      0.001, 0.023, 0.028, 0.759;
  return AssignmentMatrix::from_matrix(m, /*renormalize=*/true);
}

namespace {

RunConfig base_config() {
  RunConfig c;
  c.device = default_device();
  c.workers = 1;
  return c;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  v.reserve(n);
  for (int i = 0; i < n; ++i)
    v.push_back(a + (b - a) * (n == 1 ? 0.0 : static_cast<double>(i) / (n - 1)));
  return v;
}

}  // namespace

RunConfig preset(const std::string& name) {
  RunConfig c = base_config();
  c.preset_name = name;

  if (name == "transfer-lossless") {
    c.protocol = Protocol::AdiabaticTransfer;
    c.lossless = true;
    c.spurious_loading = false;
  } else if (name == "transfer-intrinsic") {
    c.protocol = Protocol::AdiabaticTransfer;
    c.t1r_ns = 3410.0;
  } else if (name == "transfer-maxloss") {
    c.protocol = Protocol::AdiabaticTransfer;
    c.t1r_ns = 28.7;
  } else if (name == "relay-intrinsic") {
    c.protocol = Protocol::RelayTransfer;
    c.t1r_ns = 3410.0;
  } else if (name == "relay-maxloss") {
    c.protocol = Protocol::RelayTransfer;
    c.t1r_ns = 28.7;
  } else if (name == "relay-lossless-check") {
    // Single-mode check of the swap timing against the analytic oracle; with
    // side modes present a small coherent leakage is physical.
    c.protocol = Protocol::RelayTransfer;
    c.lossless = true;
    c.spurious_loading = false;
    c.n_side_modes = 0;
  } else if (name == "entangle-intrinsic") {
    c.protocol = Protocol::AdiabaticHalf;
    c.t1r_ns = 3410.0;
  } else if (name == "entangle-lossless") {
    c.protocol = Protocol::AdiabaticHalf;
    c.lossless = true;
    c.spurious_loading = false;
  } else if (name == "entangle-relay-intrinsic") {
    c.protocol = Protocol::RelayHalf;
    c.t1r_ns = 3410.0;
  } else if (name == "ladder-adiabatic" || name == "ladder-relay") {
    c.protocol =
        name == "ladder-adiabatic" ? Protocol::AdiabaticTransfer : Protocol::RelayTransfer;
    c.sweep_parameter = "t1r";
    c.sweep_values = standard_loss_ladder();
    c.sweep_metric = "fp";
  } else if (name == "tf-scan-maxloss") {
    c.protocol = Protocol::AdiabaticTransfer;
    c.t1r_ns = 28.7;
    c.sweep_parameter = "t_f";
    c.sweep_values = linspace(36.0, 204.0, 85);  // 2 ns spacing
    c.sweep_metric = "eta";
  } else if (name == "strong-coupling") {
    c.protocol = Protocol::AdiabaticTransfer;
    c.t1r_ns = 3410.0;
    c.spurious_loading = false;
    c.subspace = true;
    c.n_side_modes = 7;  // 15 channel modes
    c.sweep_parameter = "gbar";
    c.sweep_values = linspace(6.0, 48.0, 15);  // 3 MHz spacing
    c.sweep_metric = "eta";
    c.sweep_scaled_tf = true;
  } else if (name == "circuit-model") {
    c.t1r_ns = 28.7;
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  c.validate();
  return c;
}

std::vector<std::string> preset_names() {
  return {"transfer-lossless",  "transfer-intrinsic",     "transfer-maxloss",
          "relay-intrinsic",    "relay-maxloss",          "relay-lossless-check",
          "entangle-intrinsic", "entangle-lossless",      "entangle-relay-intrinsic",
          "ladder-adiabatic",   "ladder-relay",           "tf-scan-maxloss",
          "strong-coupling",    "circuit-model"};
}

}  // namespace qlink
