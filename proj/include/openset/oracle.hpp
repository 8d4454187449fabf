#ifndef OPENSET_ORACLE_HPP_
#define OPENSET_ORACLE_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

#include "openset/inference.hpp"
#include "openset/matkernel.hpp"

namespace openset {

// Portable random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard. The distributions below are
// implemented here (standard library distributions are not portable):
//   uniform  (u >> 11) * 2^-53 from one 64-bit draw, in [0, 1)
//   normal   Marsaglia polar method, second deviate cached
//   gamma    Marsaglia-Tsang squeeze; shape < 1 via the U^(1/shape) boost
class SeededGenerator {
 public:
  static constexpr std::string_view kAlgorithm =
      "mt19937_64/uniform53/marsaglia-polar/marsaglia-tsang";

  explicit SeededGenerator(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::string_view algorithm() const { return kAlgorithm; }

  double uniform();
  double normal();
  // Gamma(shape, scale = 1).
  double gamma(double shape);
  double chi_square(double dof) { return 2.0 * gamma(dof / 2.0); }
  Vector normal_vector(std::size_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

// Draw from W(Lambda | a, B) with density proportional to
// |Lambda|^{(a-N-1)/2} exp(-tr(B Lambda)/2), so E[Lambda] = a B^{-1}.
// Bartlett decomposition: Lambda = G A A' G' with G G' = B^{-1},
// A lower triangular, A(i,i)^2 ~ chi^2(a - i) (i from 0), A(i,j) ~ N(0,1).
SymMatrix sample_wishart(SeededGenerator& gen, double a, const SymMatrix& b);

// Same draw, returned as its Cholesky factor together with log|Lambda|.
struct WishartDraw {
  Matrix lower;  // L with L L' = Lambda, lower triangular
  double log_det = 0.0;
};
WishartDraw sample_wishart_factor(SeededGenerator& gen, double a, const CholeskyFactor& b_chol);

// Column k = location_k + L^{-T} z / sqrt(r_diag[k]), z ~ N(0, I), where
// L L' = Lambda. Column covariance is Lambda^{-1} / r_diag[k].
Matrix sample_matrix_normal(SeededGenerator& gen, const Matrix& location,
                            const Vector& r_diag, const CholeskyFactor& lambda_chol);

struct McEstimate {
  double estimate = 0.0;   // linear domain
  double std_error = 0.0;  // jackknife, linear domain
  double log_estimate = 0.0;
  std::size_t samples = 0;
};

// Monte-Carlo estimate of p(x | k, D) = E[N(x | mu_k, Lambda^{-1})] under
// the posterior: Lambda ~ W(a*, B*), then mu_k ~ N(mu*_k, c*_k Lambda^{-1}).
McEstimate mc_predictive(SeededGenerator& gen, const PosteriorMNW& post, const Vector& x,
                         std::size_t k, std::size_t n_samples);

// Jackknife estimate of the mean of exp(log_values) and its standard error,
// computed with a common scale factor so that no term overflows.
McEstimate jackknife_mean_exp(const std::vector<double>& log_values);

}  // namespace openset

#endif  // OPENSET_ORACLE_HPP_
