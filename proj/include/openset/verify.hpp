#ifndef OPENSET_VERIFY_HPP_
#define OPENSET_VERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "openset/data.hpp"
#include "openset/inference.hpp"
#include "openset/oracle.hpp"
#include "openset/predictive.hpp"

namespace openset {

// One oracle comparison. pass == |closed_form - mc_estimate| < tolerance,
// where tolerance is 3 standard errors for Monte-Carlo checks and an
// absolute bound for deterministic ones.
struct CheckResult {
  std::string probe;
  double closed_form = 0.0;
  double mc_estimate = 0.0;
  double std_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;  // set when the check could not be evaluated
};

// Sum over the given order of log p(x_i | label_i, previous points), each
// term from a predictive model fitted to the points before it.
double chain_rule_log_evidence(const LabeledDataset& ds, const PriorHyper& prior,
                               const std::vector<std::size_t>& order);

// Entrywise sample mean of Wishart draws against a B^{-1}.
std::vector<CheckResult> verify_wishart_mean(SeededGenerator& gen, double a,
                                             const SymMatrix& b, std::size_t samples);

// Monte-Carlo predictive against the closed form on num_probes synthetic
// problems with N, K in {1, 2, 3}, T_k in 3..10, a = N + 2, B = I.
std::vector<CheckResult> verify_mc_predictive(SeededGenerator& gen, std::size_t samples,
                                              std::size_t num_probes = 5);

// Same comparison for a stored model, one probe per class (at most
// max_probes). A model that cannot be scored or sampled fails its probes.
std::vector<CheckResult> verify_model(SeededGenerator& gen, const ModelParams& params,
                                      std::size_t samples, std::size_t max_probes = 5);

// log_evidence_proper against the chain rule over random permutations of
// a 12-point, N = 2, K = 2 synthetic dataset.
std::vector<CheckResult> verify_chain_rule(SeededGenerator& gen,
                                           std::size_t permutations = 5);

std::vector<std::size_t> random_permutation(SeededGenerator& gen, std::size_t n);

}  // namespace openset

#endif  // OPENSET_VERIFY_HPP_
