#include "openset/synth.hpp"

#include <cmath>

#include <json.hpp>

#include "openset/errors.hpp"

namespace openset {

SynthData generate_synthetic(SeededGenerator& gen, const SynthSpec& spec) {
  if (spec.dim == 0) throw EmptyDimension("synthetic: dimension is zero");
  if (spec.counts.empty()) throw DomainError("synthetic: need at least one class");
  if (!(spec.r_true > 0.0) || !(spec.within_sd > 0.0)) {
    throw DomainError("synthetic: r_true and within_sd must be positive");
  }
  const std::size_t k = spec.counts.size();
  const auto n = static_cast<Eigen::Index>(spec.dim);

  SynthData out;
  out.truth.r_true = spec.r_true;
  out.truth.lambda =
      SymMatrix::scaled_identity(spec.dim, 1.0 / (spec.within_sd * spec.within_sd));
  const CholeskyFactor lambda_chol = cholesky(out.truth.lambda);

  const Matrix means = sample_matrix_normal(gen, Matrix::Zero(n, static_cast<Eigen::Index>(k)),
                                            Vector::Constant(static_cast<Eigen::Index>(k),
                                                             spec.r_true),
                                            lambda_chol);
  LabeledDataset& ds = out.dataset;
  ds.dim = spec.dim;
  for (std::size_t c = 0; c < k; ++c) {
    ds.class_names.push_back("c" + std::to_string(c + 1));
    out.truth.means.push_back(means.col(static_cast<Eigen::Index>(c)));
  }
  const auto upper = lambda_chol.lower().transpose().triangularView<Eigen::Upper>();
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < spec.counts[c]; ++i) {
      ds.patterns.push_back(out.truth.means[c] + upper.solve(gen.normal_vector(spec.dim)));
      ds.labels.push_back(c);
    }
  }
  return out;
}

std::string truth_to_json(const SynthTruth& truth, const LabeledDataset& ds) {
  nlohmann::json j;
  j["r_true"] = truth.r_true;
  j["class_names"] = ds.class_names;
  std::vector<std::size_t> counts(ds.num_classes(), 0);
  for (std::size_t label : ds.labels) ++counts[label];
  j["counts"] = counts;
  nlohmann::json means = nlohmann::json::array();
  for (const Vector& m : truth.means) {
    means.push_back(std::vector<double>(m.data(), m.data() + m.size()));
  }
  j["means"] = std::move(means);
  nlohmann::json lambda = nlohmann::json::array();
  const Matrix& l = truth.lambda.matrix();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(l.cols()));
    for (Eigen::Index c = 0; c < l.cols(); ++c) row[static_cast<std::size_t>(c)] = l(i, c);
    lambda.push_back(std::move(row));
  }
  j["lambda"] = std::move(lambda);
  return j.dump(2);
}

}  // namespace openset
