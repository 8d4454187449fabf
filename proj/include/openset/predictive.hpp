#ifndef OPENSET_PREDICTIVE_HPP_
#define OPENSET_PREDICTIVE_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "openset/inference.hpp"
#include "openset/matkernel.hpp"

namespace openset {

// Everything the scorer needs, in the form stored in model files.
struct ModelParams {
  std::size_t dim = 0;
  std::vector<std::string> class_names;
  double r = 0.0;
  double a_star = 0.0;
  std::vector<Vector> mu_star;
  std::vector<double> c_star;
  SymMatrix b_star = SymMatrix::zero(1);
};

// Names default to "class1", "class2", ... when class_names is empty.
ModelParams to_params(const PosteriorMNW& post,
                      std::vector<std::string> class_names = {});

// Recovers the posterior container from stored parameters (R* = 1 / c*).
PosteriorMNW to_posterior(const ModelParams& params);

// Prior probabilities over the K classes.
class ClassPrior {
 public:
  // Entries must be non-negative and sum to 1 within 1e-12.
  explicit ClassPrior(std::vector<double> probs);
  static ClassPrior uniform(std::size_t k);

  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }

 private:
  std::vector<double> probs_;
};

// costs(k, alpha) is the cost of action alpha when the true class is k.
class CostMatrix {
 public:
  explicit CostMatrix(Matrix costs);
  // 1 - I: action alpha means "decide class alpha".
  static CostMatrix zero_one(std::size_t k);

  const Matrix& costs() const { return costs_; }
  std::size_t num_classes() const { return static_cast<std::size_t>(costs_.rows()); }
  std::size_t num_actions() const { return static_cast<std::size_t>(costs_.cols()); }

 private:
  Matrix costs_;
};

// Closed-form predictive scorer. For class k the predictive density is the
// multivariate T
//
//   p(x | k) = Gamma((a*+1)/2) / Gamma((a*+1-N)/2)
//              * |pi (c*_k + 1) B*|^{-1/2}
//              * (1 + d' B*^{-1} d / (c*_k + 1))^{-(a*+1)/2},   d = x - mu*_k.
//
// Everything is kept in the log domain.
class PredictiveModel {
 public:
  // Throws DegenerateScatter when B* has no Cholesky factor and
  // InsufficientDof when a* + 1 - N <= 0.
  explicit PredictiveModel(ModelParams params);

  std::size_t dim() const { return params_.dim; }
  std::size_t num_classes() const { return params_.c_star.size(); }
  const ModelParams& params() const { return params_; }
  const std::vector<std::string>& class_names() const { return params_.class_names; }
  const CholeskyFactor& chol_b_star() const { return chol_; }
  double logdet_b_star() const { return logdet_b_star_; }
  double log_norm(std::size_t k) const;

  double log_predictive(const Vector& x, std::size_t k) const;

  // log_predictive without the class-independent constants:
  //   -(N/2) log(c*_k + 1) - ((a*+1)/2) log(1 + q_k / (c*_k + 1)).
  double log_predictive_unnormalized(const Vector& x, std::size_t k) const;

  std::vector<double> class_posterior(const Vector& x, const ClassPrior& prior) const;

 private:
  void check(const Vector& x, std::size_t k) const;
  double log_kernel(const Vector& x, std::size_t k) const;

  ModelParams params_;
  CholeskyFactor chol_;
  double logdet_b_star_ = 0.0;
  std::vector<double> log_norm_;
};

PredictiveModel build_model(const PosteriorMNW& post,
                            std::vector<std::string> class_names = {});

// Softmax of log prior + scores with max-subtraction. Classes with zero
// prior get probability exactly 0.
std::vector<double> posterior_from_scores(const std::vector<double>& log_scores,
                                          const ClassPrior& prior);

// argmin_alpha sum_k posterior[k] costs(k, alpha); ties go to the lowest
// action index.
std::size_t decide(const std::vector<double>& posterior, const CostMatrix& costs);

struct ScoredRow {
  std::vector<double> log_scores;  // unnormalized, per class
  std::vector<double> posterior;
  std::size_t action = 0;
};

// Row order of the output equals row order of the input.
std::vector<ScoredRow> score_batch(const PredictiveModel& model,
                                   const std::vector<Vector>& rows,
                                   const ClassPrior& prior, const CostMatrix& costs);

}  // namespace openset

#endif  // OPENSET_PREDICTIVE_HPP_
