#include "openset/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string_view>
#include <unordered_map>

#include "openset/errors.hpp"

namespace openset {

void LabeledDataset::validate() const {
  if (dim == 0) throw EmptyDimension("dataset: feature dimension is zero");
  if (class_names.empty()) throw ShapeMismatch("dataset: no classes declared");
  if (labels.size() != patterns.size()) {
    throw ShapeMismatch("dataset: " + std::to_string(patterns.size()) +
                        " patterns but " + std::to_string(labels.size()) + " labels");
  }
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (static_cast<std::size_t>(patterns[i].size()) != dim) {
      throw ShapeMismatch("dataset: pattern " + std::to_string(i) + " has length " +
                          std::to_string(patterns[i].size()) + ", expected " +
                          std::to_string(dim));
    }
    if (labels[i] >= class_names.size()) {
      throw IndexOutOfRange("dataset: label " + std::to_string(labels[i]) +
                            " of pattern " + std::to_string(i) + " is out of range");
    }
  }
}

std::size_t LabeledDataset::declare_class(const std::string& name) {
  auto it = std::find(class_names.begin(), class_names.end(), name);
  if (it != class_names.end()) {
    return static_cast<std::size_t>(it - class_names.begin());
  }
  class_names.push_back(name);
  return class_names.size() - 1;
}

SufficientStats::SufficientStats(std::vector<std::size_t> counts, Matrix f,
                                 SymMatrix scatter)
    : counts_(std::move(counts)), f_(std::move(f)), scatter_(std::move(scatter)) {
  if (static_cast<std::size_t>(f_.cols()) != counts_.size() ||
      f_.rows() != static_cast<Eigen::Index>(scatter_.dim())) {
    throw ShapeMismatch("SufficientStats: inconsistent shapes");
  }
  for (std::size_t c : counts_) total_ += c;
}

SufficientStats SufficientStats::zero(std::size_t dim, std::size_t num_classes) {
  if (dim == 0) throw EmptyDimension("SufficientStats: dimension is zero");
  return SufficientStats(std::vector<std::size_t>(num_classes, 0),
                         Matrix::Zero(static_cast<Eigen::Index>(dim),
                                      static_cast<Eigen::Index>(num_classes)),
                         SymMatrix::zero(dim));
}

SymMatrix SufficientStats::within_class_scatter() const {
  Matrix w = scatter_.matrix();
  for (std::size_t k = 0; k < counts_.size(); ++k) {
    if (counts_[k] == 0) continue;
    const auto col = f_.col(static_cast<Eigen::Index>(k));
    w.noalias() -= col * col.transpose() / static_cast<double>(counts_[k]);
  }
  return SymMatrix(w);
}

SufficientStats accumulate_rows(const LabeledDataset& ds, std::size_t first,
                                std::size_t last) {
  if (ds.dim == 0) throw EmptyDimension("accumulate: feature dimension is zero");
  ds.validate();
  last = std::min(last, ds.size());
  const auto n = static_cast<Eigen::Index>(ds.dim);
  std::vector<std::size_t> counts(ds.num_classes(), 0);
  Matrix f = Matrix::Zero(n, static_cast<Eigen::Index>(ds.num_classes()));
  Matrix s = Matrix::Zero(n, n);
  for (std::size_t i = first; i < last; ++i) {
    const Vector& x = ds.patterns[i];
    const std::size_t k = ds.labels[i];
    ++counts[k];
    f.col(static_cast<Eigen::Index>(k)) += x;
    s.noalias() += x * x.transpose();
  }
  return SufficientStats(std::move(counts), std::move(f), SymMatrix(s));
}

SufficientStats accumulate(const LabeledDataset& ds) {
  return accumulate_rows(ds, 0, ds.size());
}

SufficientStats merge(const SufficientStats& a, const SufficientStats& b) {
  if (a.dim() != b.dim() || a.num_classes() != b.num_classes()) {
    throw ShapeMismatch("merge: stats have shapes (N=" + std::to_string(a.dim()) +
                        ", K=" + std::to_string(a.num_classes()) + ") and (N=" +
                        std::to_string(b.dim()) + ", K=" +
                        std::to_string(b.num_classes()) + ")");
  }
  std::vector<std::size_t> counts(a.num_classes());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    counts[k] = a.counts()[k] + b.counts()[k];
  }
  return SufficientStats(std::move(counts), a.f() + b.f(),
                         SymMatrix(a.scatter().matrix() + b.scatter().matrix()));
}

namespace {

std::string trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(std::string_view(line).substr(start)));
      break;
    }
    cells.push_back(trim(std::string_view(line).substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::string location(const std::filesystem::path& path, std::size_t row,
                     std::size_t col) {
  return path.string() + ": row " + std::to_string(row) + ", column " +
         std::to_string(col);
}

double parse_cell(const std::string& cell, const std::filesystem::path& path,
                  std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  // from_chars rejects a leading '+', which strtod would accept.
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec == std::errc::result_out_of_range) {
    throw NonFiniteValue(location(path, row, col) + ": value '" + cell +
                         "' overflows");
  }
  if (ec != std::errc() || ptr != end || cell.empty()) {
    throw ParseError(location(path, row, col) + ": cannot parse '" + cell +
                     "' as a real number");
  }
  if (!std::isfinite(value)) {
    throw NonFiniteValue(location(path, row, col) + ": value '" + cell +
                         "' is not finite");
  }
  return value;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, cells)
};

CsvTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    if (!have_header) {
      // Strip a UTF-8 byte order mark.
      if (cells[0].size() >= 3 && cells[0].compare(0, 3, "\xEF\xBB\xBF") == 0) {
        cells[0].erase(0, 3);
      }
      table.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw ParseError(path.string() + ": row " + std::to_string(line_no) + " has " +
                       std::to_string(cells.size()) + " cells, header has " +
                       std::to_string(table.header.size()));
    }
    table.rows.emplace_back(line_no, std::move(cells));
  }
  if (!have_header) throw ParseError(path.string() + ": missing header row");
  return table;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header,
                                       const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

LabeledDataset load_csv(const std::filesystem::path& path,
                        const std::string& label_column) {
  const CsvTable table = read_table(path);
  const auto label_col = find_column(table.header, label_column);
  if (!label_col) {
    throw ParseError(path.string() + ": no column named '" + label_column + "'");
  }
  LabeledDataset ds;
  ds.dim = table.header.size() - 1;
  if (ds.dim == 0) throw EmptyDimension(path.string() + ": no feature columns");

  std::unordered_map<std::string, std::size_t> index;
  for (const auto& [line_no, cells] : table.rows) {
    Vector x(static_cast<Eigen::Index>(ds.dim));
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == *label_col) continue;
      x(j++) = parse_cell(cells[c], path, line_no, c + 1);
    }
    const std::string& name = cells[*label_col];
    if (name.empty()) {
      throw UnknownLabel(location(path, line_no, *label_col + 1) + ": empty label");
    }
    auto [it, inserted] = index.try_emplace(name, ds.class_names.size());
    if (inserted) ds.class_names.push_back(name);
    ds.patterns.push_back(std::move(x));
    ds.labels.push_back(it->second);
  }
  return ds;
}

std::vector<Vector> load_features_csv(const std::filesystem::path& path,
                                      const std::string& label_column) {
  const CsvTable table = read_table(path);
  const auto label_col = find_column(table.header, label_column);
  const std::size_t dim = table.header.size() - (label_col ? 1 : 0);
  if (dim == 0) throw EmptyDimension(path.string() + ": no feature columns");
  std::vector<Vector> rows;
  rows.reserve(table.rows.size());
  for (const auto& [line_no, cells] : table.rows) {
    Vector x(static_cast<Eigen::Index>(dim));
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (label_col && c == *label_col) continue;
      x(j++) = parse_cell(cells[c], path, line_no, c + 1);
    }
    rows.push_back(std::move(x));
  }
  return rows;
}

}  // namespace openset
