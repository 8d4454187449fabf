#ifndef OPENSET_SYNTH_HPP_
#define OPENSET_SYNTH_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "openset/data.hpp"
#include "openset/oracle.hpp"

namespace openset {

struct SynthSpec {
  std::size_t dim = 2;
  std::vector<std::size_t> counts;  // patterns per class; zeros allowed
  double r_true = 1.0;
  double within_sd = 1.0;  // Lambda = I / within_sd^2
};

struct SynthTruth {
  double r_true = 0.0;
  SymMatrix lambda = SymMatrix::zero(1);
  std::vector<Vector> means;
};

struct SynthData {
  LabeledDataset dataset;
  SynthTruth truth;
};

// Draws data from the generative model itself: class means from
// N(0, Lambda^{-1} / r_true), then counts[k] patterns from N(mu_k, Lambda^{-1})
// for each class. Patterns are emitted class by class.
SynthData generate_synthetic(SeededGenerator& gen, const SynthSpec& spec);

std::string truth_to_json(const SynthTruth& truth, const LabeledDataset& ds);

}  // namespace openset

#endif  // OPENSET_SYNTH_HPP_
