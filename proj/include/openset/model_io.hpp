#ifndef OPENSET_MODEL_IO_HPP_
#define OPENSET_MODEL_IO_HPP_

#include <filesystem>
#include <string>

#include "openset/predictive.hpp"

namespace openset {

inline constexpr int kModelFormatVersion = 1;

// JSON model file:
//   {"version": 1, "dim": N, "class_names": [...], "r": r, "a_star": a*,
//    "mu_star": [[...K vectors of length N...]], "c_star": [...K reals...],
//    "b_star": [[...N rows of length N...]]}
// Reals are written in shortest round-trip decimal form (at most 17
// significant digits), so a read reproduces every value bit for bit.
std::string model_to_json(const ModelParams& params);
ModelParams model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_model(const std::filesystem::path& path);

}  // namespace openset

#endif  // OPENSET_MODEL_IO_HPP_
