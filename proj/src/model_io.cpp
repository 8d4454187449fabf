#include "openset/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "openset/errors.hpp"

namespace openset {

using nlohmann::json;

std::string model_to_json(const ModelParams& params) {
  json j;
  j["version"] = kModelFormatVersion;
  j["dim"] = params.dim;
  j["class_names"] = params.class_names;
  j["r"] = params.r;
  j["a_star"] = params.a_star;
  json mu = json::array();
  for (const Vector& m : params.mu_star) {
    mu.push_back(std::vector<double>(m.data(), m.data() + m.size()));
  }
  j["mu_star"] = std::move(mu);
  j["c_star"] = params.c_star;
  json b = json::array();
  const Matrix& bm = params.b_star.matrix();
  for (Eigen::Index i = 0; i < bm.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(bm.cols()));
    for (Eigen::Index c = 0; c < bm.cols(); ++c) row[static_cast<std::size_t>(c)] = bm(i, c);
    b.push_back(std::move(row));
  }
  j["b_star"] = std::move(b);
  return j.dump(2);
}

ModelParams model_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ParseError("model: unsupported format version " + std::to_string(version));
    }
    ModelParams p;
    p.dim = j.at("dim").get<std::size_t>();
    p.class_names = j.at("class_names").get<std::vector<std::string>>();
    p.r = j.at("r").get<double>();
    p.a_star = j.at("a_star").get<double>();
    for (const auto& m : j.at("mu_star")) {
      const auto v = m.get<std::vector<double>>();
      p.mu_star.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    p.c_star = j.at("c_star").get<std::vector<double>>();
    const auto rows = j.at("b_star").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix b(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (static_cast<Eigen::Index>(row.size()) != n) {
        throw ParseError("model: b_star is not square");
      }
      for (Eigen::Index c = 0; c < n; ++c) b(i, c) = row[static_cast<std::size_t>(c)];
    }
    if (n == 0 || static_cast<std::size_t>(n) != p.dim) {
      throw ParseError("model: b_star dimension does not match dim");
    }
    p.b_star = SymMatrix(b);
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: malformed file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelParams& params) {
  std::ofstream out(path);
  if (!out) throw InputError(path.string() + ": cannot open for writing");
  out << model_to_json(params) << '\n';
  if (!out) throw InputError(path.string() + ": write failed");
}

ModelParams load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open model file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace openset
