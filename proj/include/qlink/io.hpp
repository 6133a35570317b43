#pragma once

#include "qlink/integrator.hpp"
#include "qlink/statespace.hpp"
#include "qlink/tomography.hpp"

#include "json.hpp"  // vendored nlohmann/json

#include <filesystem>
#include <string>
#include <vector>

// File formats: CSV with a header row, '.' decimal separator and no quoting
// (all fields are numeric or simple identifiers), and JSON documents with a
// stable key order so repeated runs are byte-identical.

namespace qlink {

using Json = nlohmann::ordered_json;

std::string format_double(double v);

// Writes a CSV table; every row must match the header width.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Trajectory CSV: time_ns, pe_q1, pe_q2, one p_mode_* column per mode
// (m<k> for mode -k, p<k> for +k), trace_error.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          int n_side_modes);

void write_json_file(const std::filesystem::path& path, const Json& j);
Json read_json_file(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

// Matrix serialization: {"type", "basis", "dim", "real", "imag"}.
Json density_to_json(const DensityMatrix& dm, const std::string& basis);
Matrix matrix_from_json(const Json& j);
Json chi_to_json(const ProcessMatrix& chi);
ProcessMatrix chi_from_json(const Json& j);

// Loaded-lifetime tables round-trip as CSV with columns
// g1_mhz, detuning_mhz, t1_ns (one row per grid cell).
class T1Table;
void write_t1_table_csv(const std::filesystem::path& path, const T1Table& table);
T1Table read_t1_table_csv(const std::filesystem::path& path);

}  // namespace qlink
