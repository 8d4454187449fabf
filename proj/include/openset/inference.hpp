#ifndef OPENSET_INFERENCE_HPP_
#define OPENSET_INFERENCE_HPP_

#include <cstddef>
#include <optional>

#include "openset/data.hpp"
#include "openset/matkernel.hpp"

namespace openset {

// Hyperparameters of the matrix-normal-Wishart prior with zero location
// and mean precision R = r I:
//   r  shrinkage of the class means towards the origin, r > 0
//   a  Wishart degrees of freedom, a >= 0
//   B  Wishart scale (parametrized so that E[Lambda] = a B^{-1}); an empty
//      B stands for the zero matrix of whatever dimension the data has.
// a = 0, B = 0 is the non-informative limit.
class PriorHyper {
 public:
  PriorHyper(double r, double a, std::optional<SymMatrix> b);

  static PriorHyper noninformative(double r) { return PriorHyper(r, 0.0, std::nullopt); }

  double r() const { return r_; }
  double a() const { return a_; }
  const std::optional<SymMatrix>& b() const { return b_; }
  bool b_is_zero() const { return !b_.has_value(); }

  // a > N - 1 and B positive definite.
  bool is_proper() const { return proper_; }

  // B as a dense matrix of dimension n (zero when b() is empty).
  SymMatrix b_or_zero(std::size_t n) const;

 private:
  double r_;
  double a_;
  std::optional<SymMatrix> b_;
  bool proper_ = false;
};

// Matrix-normal-Wishart posterior MNW(M, Lambda | M*, R*, a*, B*), with
// diagonal R*.
struct PosteriorMNW {
  Matrix m_star;       // N x K, column k is mu*_k
  Vector r_star_diag;  // r + T_k
  double a_star = 0.0;
  SymMatrix b_star = SymMatrix::zero(1);
  double source_r = 0.0;

  std::size_t dim() const { return static_cast<std::size_t>(m_star.rows()); }
  std::size_t num_classes() const { return static_cast<std::size_t>(m_star.cols()); }
};

PosteriorMNW posterior(const SufficientStats& stats, const PriorHyper& prior);

// Appends a class without training data: mu* = 0, R* entry = r; a* and B*
// are untouched.
PosteriorMNW add_empty_class(const PosteriorMNW& post);

struct ColumnMarginal {
  Vector mean;  // mu*_k
  double c;     // k-th diagonal element of (R*)^{-1}
};

// mu_k | Lambda ~ N(mean, c Lambda^{-1}).
ColumnMarginal column_marginal(const PosteriorMNW& post, std::size_t k);

namespace detail {

// Conjugate prior with arbitrary location and diagonal mean precision.
// Only used to express an intermediate posterior as the prior of a second
// update.
struct GeneralPrior {
  Matrix location;        // N x K
  Vector precision_diag;  // K
  double a = 0.0;
  SymMatrix b = SymMatrix::zero(1);
};

GeneralPrior as_prior(const PosteriorMNW& post);

PosteriorMNW update(const GeneralPrior& prior, const SufficientStats& stats,
                    double source_r);

}  // namespace detail

}  // namespace openset

#endif  // OPENSET_INFERENCE_HPP_
