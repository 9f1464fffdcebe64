#pragma once

#include <json.hpp>
#include <string>

#include "schatten/harness.hpp"
#include "schatten/spectra.hpp"

namespace schatten {

inline constexpr const char* kToolVersion = "0.1.0";

struct OutputStamp {
  std::string version = kToolVersion;
  std::string config_hash;
};

/// Writes to path + ".tmp" then renames over path.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Rows ordered by key; value columns are the sorted union of row value names.
std::string report_csv(const RatioReport& report, const OutputStamp& stamp);
nlohmann::json report_json(const RatioReport& report, const OutputStamp& stamp, const nlohmann::json& config_echo);

std::string spectrum_csv(const SingularSpectrum& s, const OutputStamp& stamp);

/// Log-log SVG of k -> s_k with the line s_1 k^{-exponent}; zeros are not drawn.
std::string spectrum_svg(const SingularSpectrum& s, double reference_exponent, const OutputStamp& stamp);
/// Writes the SVG at path and the CSV next to it (extension replaced by .csv).
void emit_plot(const SingularSpectrum& s, double reference_exponent, const std::string& path, const OutputStamp& stamp);

/// Least-squares slope of log s_k against log k over nonzero values.
double loglog_slope(const SingularSpectrum& s);

/// Binary dense matrix with a 32-byte header: "OPMX", u64 rows, u64 cols,
/// u32 type (1 real, 2 complex), 8 reserved bytes; then column-major little-endian doubles.
void write_opmx(const std::string& path, const Eigen::MatrixXd& A);
void write_opmx(const std::string& path, const Eigen::MatrixXcd& A);
/// Reads either type; real files come back with zero imaginary parts.
Eigen::MatrixXcd read_opmx(const std::string& path, bool* is_complex = nullptr);

}  // namespace schatten
