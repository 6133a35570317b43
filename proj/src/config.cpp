#include "qlink/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace qlink {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

KeyValueFile KeyValueFile::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path.string());
}

KeyValueFile KeyValueFile::parse_string(const std::string& text, const std::string& name) {
  KeyValueFile kv;
  kv.name_ = name;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header '" + line + "'", line_no);
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    const std::string dotted = section.empty() ? key : section + "." + key;
    if (kv.entries_.count(dotted))
      throw ConfigError("duplicate key '" + dotted + "'", line_no);
    kv.entries_[dotted] = Entry{value, line_no, false};
  }
  return kv;
}

const KeyValueFile::Entry& KeyValueFile::lookup(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing key '" + key + "' in " + name_);
  it->second.used = true;
  return it->second;
}

bool KeyValueFile::has(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it != entries_.end()) it->second.used = true;
  return it != entries_.end();
}

std::string KeyValueFile::get_string(const std::string& key) const {
  return lookup(key).value;
}

std::string KeyValueFile::get_string(const std::string& key,
                                     const std::string& fallback) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  it->second.used = true;
  return it->second.value;
}

double KeyValueFile::get_number(const std::string& key) const {
  const Entry& e = lookup(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + e.value + "' is not a number", e.line);
  }
}

double KeyValueFile::get_number(const std::string& key, double fallback) const {
  return entries_.count(key) ? get_number(key) : fallback;
}

long KeyValueFile::get_integer(const std::string& key, long fallback) const {
  if (!entries_.count(key)) return fallback;
  const double v = get_number(key);
  const long n = static_cast<long>(std::llround(v));
  if (std::abs(v - static_cast<double>(n)) > 1e-9)
    throw ConfigError("key '" + key + "' must be an integer");
  return n;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  if (!entries_.count(key)) return fallback;
  const std::string v = lower(lookup(key).value);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("key '" + key + "' must be a boolean, got '" + v + "'");
}

std::vector<double> KeyValueFile::get_number_list(const std::string& key) const {
  const Entry& e = lookup(key);
  std::vector<double> out;
  std::stringstream ss(e.value);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token = trim(token);
    if (token.empty()) continue;
    try {
      out.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': '" + token + "' is not a number", e.line);
    }
  }
  return out;
}

std::vector<std::string> KeyValueFile::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, e] : entries_)
    if (!e.used) out.push_back(k);
  return out;
}

namespace {

QubitParams qubit_from_config(const KeyValueFile& kv, const std::string& section) {
  QubitParams q;
  q.omega_idle_ghz = kv.get_number(section + ".omega_idle_ghz");
  q.t1_int_us = kv.get_number(section + ".t1_int_us");
  q.t2_ramsey_us = kv.get_number(section + ".t2_ramsey_us");
  q.t2_echo_us = kv.get_number(section + ".t2_echo_us");
  q.readout_f_g = kv.get_number(section + ".readout_f_g");
  q.readout_f_e = kv.get_number(section + ".readout_f_e");
  q.lq_nh = kv.get_number(section + ".lq_nh");
  q.anharmonicity_mhz = kv.get_number(section + ".anharmonicity_mhz", 0.0);
  return q;
}

void qubit_to_text(std::ostream& os, const QubitParams& q, const std::string& section) {
  os << "[" << section << "]\n";
  os << "omega_idle_ghz = " << q.omega_idle_ghz << "\n";
  os << "t1_int_us = " << q.t1_int_us << "\n";
  os << "t2_ramsey_us = " << q.t2_ramsey_us << "\n";
  os << "t2_echo_us = " << q.t2_echo_us << "\n";
  os << "readout_f_g = " << q.readout_f_g << "\n";
  os << "readout_f_e = " << q.readout_f_e << "\n";
  os << "lq_nh = " << q.lq_nh << "\n";
  os << "anharmonicity_mhz = " << q.anharmonicity_mhz << "\n";
}

}  // namespace

DeviceParams device_from_config(const KeyValueFile& kv) {
  DeviceParams d;
  d.q1 = qubit_from_config(kv, "qubit1");
  d.q2 = qubit_from_config(kv, "qubit2");
  d.channel.z0_ohm = kv.get_number("channel.z0_ohm");
  d.channel.alpha_db_per_m = kv.get_number("channel.alpha_db_per_m");
  d.channel.inductance_nh_per_m = kv.get_number("channel.inductance_nh_per_m");
  d.channel.length_m = kv.get_number("channel.length_m");
  d.channel.fsr_mhz = kv.get_number("channel.fsr_mhz");
  d.channel.mode_freq_ghz = kv.get_number("channel.mode_freq_ghz");
  d.channel.t1r_int_ns = kv.get_number("channel.t1r_int_ns");
  d.coupler.cq_ff = kv.get_number("coupler.cq_ff");
  d.coupler.lt_nh = kv.get_number("coupler.lt_nh");
  d.coupler.lg_nh = kv.get_number("coupler.lg_nh");
  d.coupler.ls_nh = kv.get_number("coupler.ls_nh");
  d.validate();
  return d;
}

std::string device_to_config_text(const DeviceParams& d) {
  std::ostringstream os;
  os.precision(17);
  qubit_to_text(os, d.q1, "qubit1");
  os << "\n";
  qubit_to_text(os, d.q2, "qubit2");
  os << "\n[channel]\n";
  os << "z0_ohm = " << d.channel.z0_ohm << "\n";
  os << "alpha_db_per_m = " << d.channel.alpha_db_per_m << "\n";
  os << "inductance_nh_per_m = " << d.channel.inductance_nh_per_m << "\n";
  os << "length_m = " << d.channel.length_m << "\n";
  os << "fsr_mhz = " << d.channel.fsr_mhz << "\n";
  os << "mode_freq_ghz = " << d.channel.mode_freq_ghz << "\n";
  os << "t1r_int_ns = " << d.channel.t1r_int_ns << "\n";
  os << "\n[coupler]\n";
  os << "cq_ff = " << d.coupler.cq_ff << "\n";
  os << "lt_nh = " << d.coupler.lt_nh << "\n";
  os << "lg_nh = " << d.coupler.lg_nh << "\n";
  os << "ls_nh = " << d.coupler.ls_nh << "\n";
  return os.str();
}

namespace {

Protocol protocol_from_string(const std::string& s) {
  const std::string v = lower(s);
  if (v == "adiabatic_transfer") return Protocol::AdiabaticTransfer;
  if (v == "adiabatic_half") return Protocol::AdiabaticHalf;
  if (v == "relay_transfer") return Protocol::RelayTransfer;
  if (v == "relay_half") return Protocol::RelayHalf;
  throw ConfigError("unknown protocol '" + s + "'");
}

std::string protocol_to_string(Protocol p) {
  switch (p) {
    case Protocol::AdiabaticTransfer:
      return "adiabatic_transfer";
    case Protocol::AdiabaticHalf:
      return "adiabatic_half";
    case Protocol::RelayTransfer:
      return "relay_transfer";
    case Protocol::RelayHalf:
      return "relay_half";
  }
  return "?";
}

}  // namespace

double RunConfig::phi_for_transfer() const {
  if (!phi_q2_auto) return phi_q2_rad;
  // The transfer maps the excited amplitude with an overall sign flip (the
  // dark state ends at -|g0e>, and two resonant swaps contribute (-i)^2);
  // the azimuthal correction removes this deterministic Z phase.
  const bool transfer =
      protocol == Protocol::AdiabaticTransfer || protocol == Protocol::RelayTransfer;
  return transfer ? std::numbers::pi : 0.0;
}

void RunConfig::validate() const {
  device.validate();
  if (gbar_mhz <= 0.0) throw ConfigError("gbar_mhz must be positive");
  if (tf_ns <= 0.0) throw ConfigError("tf_ns must be positive");
  if (relay_g_mhz <= 0.0) throw ConfigError("relay_g_mhz must be positive");
  if (t1r_ns <= 0.0) throw ConfigError("t1r_ns must be positive");
  if (!lossless && t1r_ns > device.channel.t1r_int_ns + 1e-9)
    throw ConfigError("t1r_ns exceeds the intrinsic mode lifetime");
  if (n_side_modes < 0) throw ConfigError("n_side_modes must be >= 0");
  if (step_ns <= 0.0) throw ConfigError("step_ns must be positive");
  if (sample_dt_ns <= 0.0) throw ConfigError("sample_dt_ns must be positive");
  if (shots < 0) throw ConfigError("shots must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (spurious_detuning_mhz < 0.0) throw ConfigError("spurious_detuning_mhz must be >= 0");
  if (dephasing_model != "adiabatic" && dephasing_model != "site")
    throw ConfigError("dephasing_model must be 'adiabatic' or 'site'");
  if (dephasing_basis != "echo" && dephasing_basis != "ramsey")
    throw ConfigError("dephasing_basis must be 'echo' or 'ramsey'");
  if (ramp_off_ns < 0.0) throw ConfigError("ramp_off_ns must be >= 0");
  if (idle_after_ns < 0.0) throw ConfigError("idle_after_ns must be >= 0");
  if (!sweep_parameter.empty() && sweep_parameter != "t_f" && sweep_parameter != "gbar" &&
      sweep_parameter != "t1r" && sweep_parameter != "relay_g")
    throw ConfigError("sweep parameter must be one of t_f, gbar, t1r, relay_g");
  if (sweep_metric != "eta" && sweep_metric != "fp")
    throw ConfigError("sweep metric must be eta or fp");
  if (!subspace && SpaceLayout::full(n_side_modes).dimension() > kMaxDenseDimension)
    throw ConfigError(
        "n_side_modes too large for the dense path; set subspace = true");
}

RunConfig run_config_from_file(const std::filesystem::path& path) {
  const KeyValueFile kv = KeyValueFile::parse_file(path);
  return run_config_from_kv(kv, path.has_parent_path() ? path.parent_path()
                                                       : std::filesystem::path("."));
}

RunConfig run_config_from_kv(const KeyValueFile& kv, const std::filesystem::path& base_dir) {
  RunConfig c;
  if (kv.has("run.device")) {
    c.device_path = kv.get_string("run.device");
    std::filesystem::path p(c.device_path);
    if (p.is_relative()) p = base_dir / p;
    c.device = device_from_config(KeyValueFile::parse_file(p));
  } else {
    c.device = device_from_config(kv);
  }
  c.protocol = protocol_from_string(kv.get_string("run.protocol", "adiabatic_transfer"));
  c.gbar_mhz = kv.get_number("run.gbar_mhz", c.gbar_mhz);
  c.tf_ns = kv.get_number("run.tf_ns", c.tf_ns);
  c.relay_g_mhz = kv.get_number("run.relay_g_mhz", c.relay_g_mhz);
  if (kv.has("run.loss")) c.t1r_ns = parse_loss_setting(kv.get_string("run.loss"));
  c.t1r_ns = kv.get_number("run.t1r_ns", c.t1r_ns);
  c.lossless = kv.get_bool("run.lossless", c.lossless);
  c.spurious_loading = kv.get_bool("run.spurious_loading", c.spurious_loading);
  c.spurious_detuning_mhz =
      kv.get_number("run.spurious_detuning_mhz", c.spurious_detuning_mhz);
  c.dephasing_model = kv.get_string("run.dephasing_model", c.dephasing_model);
  c.dephasing_basis = kv.get_string("run.dephasing_basis", c.dephasing_basis);
  c.ramp_off_ns = kv.get_number("run.ramp_off_ns", c.ramp_off_ns);
  c.idle_after_ns = kv.get_number("run.idle_after_ns", c.idle_after_ns);
  c.n_side_modes = static_cast<int>(kv.get_integer("run.n_side_modes", c.n_side_modes));
  c.subspace = kv.get_bool("run.subspace", c.subspace);
  c.step_ns = kv.get_number("run.step_ns", c.step_ns);
  c.sample_dt_ns = kv.get_number("run.sample_dt_ns", c.sample_dt_ns);
  c.shots = kv.get_integer("run.shots", c.shots);
  c.seed = static_cast<std::uint64_t>(kv.get_integer("run.seed", 0));
  c.simulate_readout_error =
      kv.get_bool("run.simulate_readout_error", c.simulate_readout_error);
  if (kv.has("run.phi_q2_rad")) {
    c.phi_q2_auto = false;
    c.phi_q2_rad = kv.get_number("run.phi_q2_rad");
  }
  c.out_dir = kv.get_string("run.out_dir", c.out_dir);
  c.workers = static_cast<int>(kv.get_integer("run.workers", c.workers));
  c.preset_name = kv.get_string("run.preset", "");

  c.sweep_parameter = kv.get_string("sweep.parameter", "");
  if (kv.has("sweep.values")) c.sweep_values = kv.get_number_list("sweep.values");
  c.sweep_metric = kv.get_string("sweep.metric", c.sweep_metric);
  c.sweep_scaled_tf = kv.get_bool("sweep.scaled_tf", c.sweep_scaled_tf);

  c.validate();
  return c;
}

std::string run_config_to_text(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "[run]\n";
  if (!c.preset_name.empty()) os << "preset = " << c.preset_name << "\n";
  os << "protocol = " << protocol_to_string(c.protocol) << "\n";
  os << "gbar_mhz = " << c.gbar_mhz << "\n";
  os << "tf_ns = " << c.tf_ns << "\n";
  os << "relay_g_mhz = " << c.relay_g_mhz << "\n";
  os << "t1r_ns = " << c.t1r_ns << "\n";
  os << "lossless = " << (c.lossless ? "true" : "false") << "\n";
  os << "spurious_loading = " << (c.spurious_loading ? "true" : "false") << "\n";
  os << "spurious_detuning_mhz = " << c.spurious_detuning_mhz << "\n";
  os << "dephasing_model = " << c.dephasing_model << "\n";
  os << "dephasing_basis = " << c.dephasing_basis << "\n";
  os << "ramp_off_ns = " << c.ramp_off_ns << "\n";
  os << "idle_after_ns = " << c.idle_after_ns << "\n";
  os << "n_side_modes = " << c.n_side_modes << "\n";
  os << "subspace = " << (c.subspace ? "true" : "false") << "\n";
  os << "step_ns = " << c.step_ns << "\n";
  os << "sample_dt_ns = " << c.sample_dt_ns << "\n";
  os << "shots = " << c.shots << "\n";
  os << "seed = " << c.seed << "\n";
  os << "simulate_readout_error = " << (c.simulate_readout_error ? "true" : "false")
     << "\n";
  if (!c.phi_q2_auto) os << "phi_q2_rad = " << c.phi_q2_rad << "\n";
  os << "out_dir = " << c.out_dir << "\n";
  os << "workers = " << c.workers << "\n";
  if (!c.sweep_parameter.empty()) {
    os << "\n[sweep]\n";
    os << "parameter = " << c.sweep_parameter << "\n";
    os << "values = ";
    for (std::size_t i = 0; i < c.sweep_values.size(); ++i) {
      if (i) os << ", ";
      os << c.sweep_values[i];
    }
    os << "\n";
    os << "metric = " << c.sweep_metric << "\n";
    os << "scaled_tf = " << (c.sweep_scaled_tf ? "true" : "false") << "\n";
  }
  os << "\n" << device_to_config_text(c.device);
  return os.str();
}

const std::vector<double>& standard_loss_ladder() {
  static const std::vector<double> ladder = {28.7, 49.8, 101.1, 336.0, 503.0, 3410.0};
  return ladder;
}

double parse_loss_setting(const std::string& text) {
  const std::string v = lower(trim(text));
  if (v == "intrinsic") return standard_loss_ladder().back();
  if (v == "maximum" || v == "max") return standard_loss_ladder().front();
  try {
    return std::stod(v);
  } catch (const std::exception&) {
    throw ConfigError("loss must be 'intrinsic', 'maximum', or a T1r value in ns");
  }
}

}  // namespace qlink
