#include "schatten/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <json.hpp>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "schatten/csv.hpp"

namespace schatten {

namespace {

SingularSpectrum finish(std::vector<double> s, std::size_t dim) {
  std::sort(s.begin(), s.end(), std::greater<>());
  SingularSpectrum out;
  out.source_dim = dim;
  const double cut = s.empty() ? 0.0 : 1e-13 * s.front();
  for (auto& v : s) {
    if (v <= cut) v = 0.0;
    else ++out.numerical_rank;
  }
  out.values = std::move(s);
  return out;
}

}  // namespace

SingularSpectrum singular_values(const Eigen::MatrixXd& A) {
  if (!A.allFinite()) throw std::invalid_argument("singular_values: non-finite entries");
  const auto m = static_cast<lapack_int>(A.rows()), n = static_cast<lapack_int>(A.cols());
  if (m == 0 || n == 0) return finish({}, 0);
  Eigen::MatrixXd work = A;
  std::vector<double> s(static_cast<std::size_t>(std::min(m, n)));
  const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("dgesdd failed with info " + std::to_string(info));
  return finish(std::move(s), static_cast<std::size_t>(std::max(m, n)));
}

SingularSpectrum singular_values(const Eigen::MatrixXcd& A) {
  if (!A.allFinite()) throw std::invalid_argument("singular_values: non-finite entries");
  const auto m = static_cast<lapack_int>(A.rows()), n = static_cast<lapack_int>(A.cols());
  if (m == 0 || n == 0) return finish({}, 0);
  Eigen::MatrixXcd work = A;
  std::vector<double> s(static_cast<std::size_t>(std::min(m, n)));
  const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("zgesdd failed with info " + std::to_string(info));
  return finish(std::move(s), static_cast<std::size_t>(std::max(m, n)));
}

SingularSpectrum merge_spectra(const SingularSpectrum& a, const SingularSpectrum& b) {
  std::vector<double> v = a.values;
  v.insert(v.end(), b.values.begin(), b.values.end());
  return finish(std::move(v), a.source_dim + b.source_dim);
}

SchattenValue schatten_functional(const SingularSpectrum& s, double p, double q) {
  const LorentzValue v = lorentz_functional(s.values, {p, q});
  return {v.value, v.argmax_k};
}

double schatten_norm(const SingularSpectrum& s, double p, double q) { return schatten_functional(s, p, q).value; }

double operator_norm(const Eigen::MatrixXd& A, int max_iter, double tol) {
  if (A.size() == 0) return 0.0;
  Eigen::VectorXd v(A.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = 1.0 + 0.01 * std::sin(1.0 + static_cast<double>(i));
  v.normalize();
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd u = A.transpose() * (A * v);
    const double nrm = u.norm();
    if (nrm == 0.0) return 0.0;
    const double next = std::sqrt(nrm);
    v = u / nrm;
    if (std::abs(next - est) <= tol * next) return next;
    est = next;
  }
  return est;
}

double nwo_size(const SampledFunction& e, const CubeId& q, double r) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < e.size(); ++k) sum += std::pow(std::abs(e.values[k]), r);
  const double norm = std::pow(sum * e.window.cell_volume(), 1.0 / r);
  return norm / std::pow(q.volume(), 1.0 / r - 0.5);
}

RsLowerResult rs_lower_functional(const RealOperator& T, const CubeFamily& e, const CubeFamily& f, double p, double r) {
  if (!(p > 1.0)) throw std::invalid_argument("rs_lower_functional needs p > 1");
  RsLowerResult res;
  const double hn = T.window.cell_volume();
  double sum = 0.0;
  for (const auto& [q, eq] : e) {
    const auto it = f.find(q);
    if (it == f.end()) continue;
    res.e_size = std::max(res.e_size, nwo_size(eq, q, r));
    res.f_size = std::max(res.f_size, nwo_size(it->second, q, r));
    const double ip = it->second.values.dot(T.entries * eq.values) * hn;
    sum += std::pow(std::abs(ip), p);
  }
  res.value = std::pow(sum, 1.0 / p);
  return res;
}

RsUpperResult rs_upper_assembly(const std::vector<RsTerm>& terms, double p, double q) {
  if (terms.empty()) throw std::invalid_argument("rs_upper_assembly needs at least one term");
  const Eigen::Index M = terms.front().e.size();
  const double hn = terms.front().e.window.cell_volume();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(M, M);
  std::vector<double> lambdas;
  for (const auto& t : terms) {
    if (t.e.size() != M || t.f.size() != M) throw std::invalid_argument("rs_upper_assembly: size mismatch");
    T += t.lambda * hn * t.f.values * t.e.values.transpose();
    lambdas.push_back(t.lambda);
  }
  RsUpperResult res;
  res.schatten = schatten_norm(singular_values(T), p, q);
  res.lorentz = lorentz_functional(lambdas, {p, q}).value;
  res.ratio = res.lorentz > 0.0 ? res.schatten / res.lorentz : 0.0;
  return res;
}

void write_spectrum_csv(const SingularSpectrum& s, std::ostream& os) {
  os << "k,s_k\n";
  for (std::size_t i = 0; i < s.values.size(); ++i) os << (i + 1) << ',' << format_g17(s.values[i]) << '\n';
}

std::string functional_json(const SingularSpectrum& s, double p, double q) {
  const SchattenValue v = schatten_functional(s, p, q);
  nlohmann::json j;
  j["p"] = p;
  if (std::isinf(q)) j["q"] = "inf";
  else j["q"] = q;
  j["value"] = v.value;
  j["argmax_k"] = v.argmax_k;
  return j.dump(2);
}

}  // namespace schatten
