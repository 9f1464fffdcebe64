#pragma once

#include <Eigen/Dense>
#include <complex>
#include <ostream>
#include <vector>

#include "schatten/function_spaces.hpp"
#include "schatten/haar.hpp"
#include "schatten/operators.hpp"

namespace schatten {

struct SingularSpectrum {
  /// Nonincreasing; values below 1e-13 s_1 are set to zero.
  std::vector<double> values;
  std::size_t source_dim = 0;
  std::size_t numerical_rank = 0;
};

/// Dense divide-and-conquer SVD, values only.
SingularSpectrum singular_values(const Eigen::MatrixXd& A);
SingularSpectrum singular_values(const Eigen::MatrixXcd& A);

template <typename Scalar>
SingularSpectrum singular_values(const OperatorMatrix<Scalar>& T) {
  if (!T.entries.allFinite()) throw std::invalid_argument("singular_values: non-finite entries");
  if (T.ip_weight) return singular_values(conjugate_by_weight(T, *T.ip_weight).entries);
  return singular_values(T.entries);
}

SingularSpectrum merge_spectra(const SingularSpectrum& a, const SingularSpectrum& b);

struct SchattenValue {
  double value = 0.0;
  std::size_t argmax_k = 0;
};

SchattenValue schatten_functional(const SingularSpectrum& s, double p, double q);
double schatten_norm(const SingularSpectrum& s, double p, double q);

/// Largest singular value by power iteration on T^T T.
double operator_norm(const Eigen::MatrixXd& A, int max_iter = 500, double tol = 1e-12);

struct RsLowerResult {
  double value = 0.0;
  /// max over the family of ||e_Q||_r / |Q|^{1/r-1/2}, and the same for f.
  double e_size = 0.0;
  double f_size = 0.0;
};

/// (sum_Q |<T e_Q, f_Q>|^p)^{1/p} over cubes present in both families.
RsLowerResult rs_lower_functional(const RealOperator& T, const CubeFamily& e, const CubeFamily& f, double p, double r = 4.0);
double nwo_size(const SampledFunction& e, const CubeId& q, double r);

struct RsTerm {
  double lambda = 0.0;
  SampledFunction e;
  SampledFunction f;
};

struct RsUpperResult {
  double schatten = 0.0;
  double lorentz = 0.0;
  double ratio = 0.0;
};

/// T = sum lambda <., e> f; ratio of its S^{p,q} norm to the l^{p,q} norm of lambda.
RsUpperResult rs_upper_assembly(const std::vector<RsTerm>& terms, double p, double q);

void write_spectrum_csv(const SingularSpectrum& s, std::ostream& os);
std::string functional_json(const SingularSpectrum& s, double p, double q);

}  // namespace schatten
