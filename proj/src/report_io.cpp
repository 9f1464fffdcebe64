#include "schatten/report_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "schatten/csv.hpp"

namespace schatten {

namespace {

static_assert(std::endian::native == std::endian::little, "OPMX assumes a little-endian host");

nlohmann::json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

template <typename Matrix>
void write_opmx_impl(const std::string& path, const Matrix& A, std::uint32_t type) {
  std::string buf = "OPMX";
  auto put = [&](const void* p, std::size_t n) { buf.append(static_cast<const char*>(p), n); };
  const std::uint64_t rows = static_cast<std::uint64_t>(A.rows()), cols = static_cast<std::uint64_t>(A.cols());
  const std::uint64_t reserved = 0;
  put(&rows, 8);
  put(&cols, 8);
  put(&type, 4);
  put(&reserved, 8);
  put(A.data(), static_cast<std::size_t>(A.size()) * sizeof(typename Matrix::Scalar));
  write_file_atomic(path, buf);
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("rename failed for " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string report_csv(const RatioReport& report, const OutputStamp& stamp) {
  std::set<std::string> names;
  for (const auto& row : report.rows)
    for (const auto& [k, v] : row.values) names.insert(k);
  std::ostringstream os;
  os << "key,symbol,weight,N,degenerate,exploratory";
  for (const auto& k : names) os << ',' << csv_field(k);
  os << ",ratio,tool_version,config_hash\n";
  for (const auto& row : report.rows) {
    os << csv_field(row.key) << ',' << csv_field(row.symbol) << ',' << csv_field(row.weight) << ',' << row.N << ','
       << (row.degenerate ? "true" : "false") << ',' << (row.exploratory ? "true" : "false");
    for (const auto& k : names) {
      os << ',';
      const auto it = row.values.find(k);
      if (it != row.values.end()) os << format_g17(it->second);
    }
    os << ',' << format_g17(row.ratio) << ',' << stamp.version << ',' << stamp.config_hash << '\n';
  }
  return os.str();
}

nlohmann::json report_json(const RatioReport& report, const OutputStamp& stamp, const nlohmann::json& config_echo) {
  nlohmann::json j;
  j["tool_version"] = stamp.version;
  j["config_hash"] = stamp.config_hash;
  j["config"] = config_echo;
  j["experiment"] = report.experiment;
  j["summary"] = {{"min_ratio", number(report.min_ratio)},
                  {"max_ratio", number(report.max_ratio)},
                  {"spread", number(report.spread)},
                  {"rows", report.rows.size()}};
  nlohmann::json constants = nlohmann::json::object();
  for (const auto& [k, v] : report.constants) constants[k] = number(v);
  j["constants"] = constants;
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& [k, v] : report.checks) checks[k] = v;
  j["checks"] = checks;
  return j;
}

std::string spectrum_csv(const SingularSpectrum& s, const OutputStamp& stamp) {
  std::ostringstream os;
  os << "k,s_k,tool_version,config_hash\n";
  for (std::size_t i = 0; i < s.values.size(); ++i)
    os << (i + 1) << ',' << format_g17(s.values[i]) << ',' << stamp.version << ',' << stamp.config_hash << '\n';
  return os.str();
}

double loglog_slope(const SingularSpectrum& s) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (!(s.values[i] > 0.0)) continue;
    const double x = std::log(static_cast<double>(i + 1)), y = std::log(s.values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("slope needs two positive values");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::string spectrum_svg(const SingularSpectrum& s, double reference_exponent, const OutputStamp& stamp) {
  if (s.values.empty()) throw std::invalid_argument("cannot plot an empty spectrum");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < s.values.size(); ++i)
    if (s.values[i] > 0.0) pts.emplace_back(std::log10(double(i + 1)), std::log10(s.values[i]));
  if (pts.empty()) throw std::invalid_argument("spectrum has no positive values");
  const double s1 = s.values.front();
  const double kmax = static_cast<double>(s.values.size());
  double xmax = std::max(std::log10(kmax), 1e-9);
  double ymin = pts.front().second, ymax = pts.front().second;
  for (const auto& [x, y] : pts) {
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  const double yref_end = std::log10(s1) - reference_exponent * std::log10(kmax);
  ymin = std::min(ymin, yref_end);
  ymax = std::max(ymax, std::log10(s1));
  if (ymax - ymin < 1e-9) {
    ymax += 0.5;
    ymin -= 0.5;
  }
  const double W = 640, H = 480, L = 70, R = 20, T = 20, B = 50;
  auto px = [&](double x) { return L + (W - L - R) * x / xmax; };
  auto py = [&](double y) { return T + (H - T - B) * (ymax - y) / (ymax - ymin); };
  char buf[256];
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<!-- schatten-lab " << stamp.version << " config_hash=" << stamp.config_hash << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
  os << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" stroke=\"#c0392b\" stroke-dasharray=\"6,4\"/>\n",
                px(0.0), py(std::log10(s1)), px(std::log10(kmax)), py(yref_end));
  os << buf;
  for (const auto& [x, y] : pts) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"2\" fill=\"#1f4e79\"/>\n", px(x), py(y));
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"13\" text-anchor=\"middle\">log10 k</text>\n",
                L + (W - L - R) / 2, H - 12);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"16\" y=\"%g\" font-size=\"13\" transform=\"rotate(-90 16 %g)\" text-anchor=\"middle\">log10 s_k</text>\n",
                T + (H - T - B) / 2, T + (H - T - B) / 2);
  os << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"12\">reference k^-%g through s_1</text>\n",
                L + 10, T + 16, reference_exponent);
  os << buf;
  os << "</svg>\n";
  return os.str();
}

void emit_plot(const SingularSpectrum& s, double reference_exponent, const std::string& path, const OutputStamp& stamp) {
  const std::string svg = spectrum_svg(s, reference_exponent, stamp);
  write_file_atomic(path, svg);
  write_file_atomic(std::filesystem::path(path).replace_extension(".csv").string(), spectrum_csv(s, stamp));
}

void write_opmx(const std::string& path, const Eigen::MatrixXd& A) { write_opmx_impl(path, A, 1); }
void write_opmx(const std::string& path, const Eigen::MatrixXcd& A) { write_opmx_impl(path, A, 2); }

Eigen::MatrixXcd read_opmx(const std::string& path, bool* is_complex) {
  const std::string buf = read_file(path);
  if (buf.size() < 32 || buf.compare(0, 4, "OPMX") != 0) throw std::runtime_error("not an OPMX file: " + path);
  std::uint64_t rows = 0, cols = 0;
  std::uint32_t type = 0;
  std::memcpy(&rows, buf.data() + 4, 8);
  std::memcpy(&cols, buf.data() + 12, 8);
  std::memcpy(&type, buf.data() + 20, 4);
  if (type != 1 && type != 2) throw std::runtime_error("unknown OPMX element type");
  const std::size_t elem = type == 1 ? 8 : 16;
  if (rows > (1ull << 20) || cols > (1ull << 20) || buf.size() != 32 + rows * cols * elem)
    throw std::runtime_error("OPMX size mismatch: " + path);
  if (is_complex) *is_complex = type == 2;
  const auto r = static_cast<Eigen::Index>(rows), c = static_cast<Eigen::Index>(cols);
  if (type == 2) {
    Eigen::MatrixXcd A(r, c);
    std::memcpy(A.data(), buf.data() + 32, rows * cols * elem);
    return A;
  }
  Eigen::MatrixXd A(r, c);
  std::memcpy(A.data(), buf.data() + 32, rows * cols * elem);
  return A.cast<std::complex<double>>();
}

}  // namespace schatten
