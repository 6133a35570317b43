#include "qlink/io.hpp"

#include "qlink/circuit.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qlink {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("CSV row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          int n_side_modes) {
  std::vector<std::string> header = {"time_ns", "pe_q1", "pe_q2"};
  for (int n = -n_side_modes; n <= n_side_modes; ++n)
    header.push_back(n < 0 ? "p_mode_m" + std::to_string(-n)
                           : "p_mode_p" + std::to_string(n));
  header.push_back("trace_error");

  std::vector<std::vector<double>> rows;
  rows.reserve(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    std::vector<double> row = {traj.times[k], traj.pe_q1[k], traj.pe_q2[k]};
    for (const auto& mode : traj.mode_populations) row.push_back(mode[k]);
    row.push_back(traj.trace_error[k]);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Json j;
  in >> j;
  return j;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

namespace {

Json complex_matrix_part(const Matrix& m, bool imag) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

Json density_to_json(const DensityMatrix& dm, const std::string& basis) {
  Json j;
  j["type"] = "density_matrix";
  j["basis"] = basis;
  j["dim"] = dm.rho.rows();
  j["real"] = complex_matrix_part(dm.rho, false);
  j["imag"] = complex_matrix_part(dm.rho, true);
  return j;
}

Matrix matrix_from_json(const Json& j) {
  const auto& re = j.at("real");
  const auto& im = j.at("imag");
  const std::size_t n = re.size();
  Matrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      m(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
  return m;
}

Json chi_to_json(const ProcessMatrix& chi) {
  Json j;
  j["type"] = "process_matrix";
  j["basis"] = "pauli_IXYZ";
  j["dim"] = 4;
  j["real"] = complex_matrix_part(chi.chi, false);
  j["imag"] = complex_matrix_part(chi.chi, true);
  return j;
}

ProcessMatrix chi_from_json(const Json& j) {
  if (j.value("type", "") != "process_matrix")
    throw std::runtime_error("not a process_matrix document");
  return {matrix_from_json(j)};
}

void write_t1_table_csv(const std::filesystem::path& path, const T1Table& table) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < table.g1_grid().size(); ++i)
    for (std::size_t j = 0; j < table.dw_grid().size(); ++j)
      rows.push_back({table.g1_grid()[i] / (kTwoPi * 1e6),
                      table.dw_grid()[j] / (kTwoPi * 1e6), table.at(i, j)});
  write_csv(path, {"g1_mhz", "detuning_mhz", "t1_ns"}, rows);
}

T1Table read_t1_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("g1_mhz,detuning_mhz,t1_ns", 0) != 0)
    throw std::runtime_error("unexpected T1 table header in " + path.string());
  std::vector<double> g1, dw, t1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    double v[3];
    for (int k = 0; k < 3; ++k) {
      if (!std::getline(ss, field, ',')) throw std::runtime_error("short T1 table row");
      v[k] = std::stod(field);
    }
    const double g = v[0] * kTwoPi * 1e6;
    const double d = v[1] * kTwoPi * 1e6;
    if (g1.empty() || g > g1.back()) g1.push_back(g);
    if (g1.size() == 1) dw.push_back(d);
    t1.push_back(v[2]);
  }
  return T1Table(std::move(g1), std::move(dw), std::move(t1));
}

}  // namespace qlink
