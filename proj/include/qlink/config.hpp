#pragma once

#include "qlink/model.hpp"
#include "qlink/schedules.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Configuration ingestion. Files are plain key-value text with [section]
// headers, '#' comments and one `key = value` pair per line. Units are part
// of the key names (t1r_ns, gbar_mhz, ...) to keep conventions explicit;
// frequencies are quoted as f = w/2pi.

namespace qlink {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

class KeyValueFile {
 public:
  static KeyValueFile parse_file(const std::filesystem::path& path);
  static KeyValueFile parse_string(const std::string& text,
                                   const std::string& name = "<string>");

  bool has(const std::string& dotted_key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_number(const std::string& key) const;
  double get_number(const std::string& key, double fallback) const;
  long get_integer(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_number_list(const std::string& key) const;  // comma separated

  // Keys never queried through the getters; used by `validate`.
  std::vector<std::string> unused_keys() const;
  const std::string& name() const { return name_; }

 private:
  struct Entry {
    std::string value;
    int line = 0;
    mutable bool used = false;
  };
  std::map<std::string, Entry> entries_;
  std::string name_;
  const Entry& lookup(const std::string& key) const;
};

// Device parameter files: sections [qubit1], [qubit2], [channel], [coupler].
DeviceParams device_from_config(const KeyValueFile& kv);
std::string device_to_config_text(const DeviceParams& device);

struct RunConfig {
  DeviceParams device;
  std::string device_path;  // empty when the device block is inline

  Protocol protocol = Protocol::AdiabaticTransfer;
  double gbar_mhz = 15.0;
  double tf_ns = 132.0;
  double relay_g_mhz = 5.0;

  double t1r_ns = 3410.0;
  bool lossless = false;  // disables every collapse channel
  bool spurious_loading = true;
  double spurious_detuning_mhz = 0.4;
  // Dephasing model. 'adiabatic' (default) secularizes the sigma_z noise in
  // the instantaneous eigenbasis: superpositions of eigenstates dephase at
  // the measured Ramsey rate while the gapped eigenstate populations are
  // protected, as expected for quasi-static-dominated flux noise (T2E >>
  // T2*). 'site' applies bare sigma_z collapse operators.
  std::string dephasing_model = "adiabatic";  // adiabatic | site
  // Which measured T2 feeds the pure-dephasing rate via
  // 1/Tphi = 1/T2 - 1/(2 T1).
  std::string dephasing_basis = "ramsey";  // ramsey | echo

  // Coupler switch-off ramp appended to the half-adiabatic program (ns).
  double ramp_off_ns = 30.0;
  // Free-evolution dead time between the end of the sequence and the
  // tomography pulses (ns); populations are read at t_f regardless.
  double idle_after_ns = 20.0;

  int n_side_modes = 2;
  bool subspace = false;
  double step_ns = 0.05;
  double sample_dt_ns = 0.5;

  long shots = 0;  // 0 = noiseless expectation values
  std::uint64_t seed = 0;
  bool simulate_readout_error = false;

  bool phi_q2_auto = true;  // pi for transfer tomography, 0 for entanglement
  double phi_q2_rad = 0.0;

  std::string out_dir = "results";
  int workers = 1;

  std::string preset_name;  // provenance only

  // Sweep specification (cmd_sweep only).
  std::string sweep_parameter;  // t_f | gbar | t1r | relay_g
  std::vector<double> sweep_values;
  std::string sweep_metric = "eta";  // eta | fp
  // Scale the transfer time with the swept coupling so every point runs at
  // the protocol's design pulse area (the n = 2 dark-state return).
  bool sweep_scaled_tf = false;

  double phi_for_transfer() const;
  void validate() const;  // throws ConfigError
};

// Loads a run configuration; device parameters come from an inline device
// block or from the file named by run.device (resolved against base_dir).
RunConfig run_config_from_file(const std::filesystem::path& path);
RunConfig run_config_from_kv(const KeyValueFile& kv,
                             const std::filesystem::path& base_dir);

// Normalized, self-contained dump; parsing it reproduces the configuration.
std::string run_config_to_text(const RunConfig& config);

// T1r values of the shipped loss presets, ascending (ns).
const std::vector<double>& standard_loss_ladder();

// Named loss settings: "intrinsic" and "maximum", else numeric ns.
double parse_loss_setting(const std::string& text);

}  // namespace qlink
