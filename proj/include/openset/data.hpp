#ifndef OPENSET_DATA_HPP_
#define OPENSET_DATA_HPP_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "openset/matkernel.hpp"

namespace openset {

// Supervised training database. Labels are 0-based indices into
// class_names; classes may be declared without any patterns.
struct LabeledDataset {
  std::size_t dim = 0;
  std::vector<Vector> patterns;
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;

  std::size_t size() const { return patterns.size(); }
  std::size_t num_classes() const { return class_names.size(); }

  // Throws ShapeMismatch / IndexOutOfRange / EmptyDimension on a broken
  // invariant.
  void validate() const;

  // Appends a class with no patterns. Returns its index. Re-declaring an
  // existing name is a no-op that returns the existing index.
  std::size_t declare_class(const std::string& name);
};

// Per-class counts T_k, per-class sums F (N x K) and the pooled raw second
// moment S = sum_i x_i x_i'.
class SufficientStats {
 public:
  SufficientStats(std::vector<std::size_t> counts, Matrix f, SymMatrix scatter);

  static SufficientStats zero(std::size_t dim, std::size_t num_classes);

  std::size_t dim() const { return static_cast<std::size_t>(f_.rows()); }
  std::size_t num_classes() const { return counts_.size(); }
  const std::vector<std::size_t>& counts() const { return counts_; }
  const Matrix& f() const { return f_; }
  const SymMatrix& scatter() const { return scatter_; }
  std::size_t total() const { return total_; }

  // S - sum_k f_k f_k' / T_k over classes with T_k > 0.
  SymMatrix within_class_scatter() const;

 private:
  std::vector<std::size_t> counts_;
  Matrix f_;
  SymMatrix scatter_;
  std::size_t total_ = 0;
};

SufficientStats accumulate(const LabeledDataset& ds);

// Statistics of rows [first, last) only; the building block for sharded
// accumulation via merge().
SufficientStats accumulate_rows(const LabeledDataset& ds, std::size_t first,
                                std::size_t last);

SufficientStats merge(const SufficientStats& a, const SufficientStats& b);

// Reads a headered CSV. The column named label_column holds class names;
// every other column is a feature, in header order. Classes are indexed in
// order of first appearance.
LabeledDataset load_csv(const std::filesystem::path& path,
                        const std::string& label_column);

// Unlabelled patterns for scoring. If the header contains label_column it
// is skipped; all other columns are features.
std::vector<Vector> load_features_csv(const std::filesystem::path& path,
                                      const std::string& label_column);

}  // namespace openset

#endif  // OPENSET_DATA_HPP_
