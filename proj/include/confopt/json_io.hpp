#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include "json.hpp"
#endif

#include "confopt/cpe.hpp"
#include "confopt/distribution.hpp"
#include "confopt/matrix.hpp"
#include "confopt/rule.hpp"
#include "confopt/synth.hpp"

namespace confopt {

using Json = nlohmann::json;

/// {"n": n, "entries": row-major n*n}.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

/// {"n", "d", "weights": row-major n x (d+1), bias last}.
Json cpe_to_json(const CpeModel& model);
CpeModel cpe_from_json(const Json& j);

/// {"n", "d", "points": [{"x", "q", "eta"}, ...]}.
Json distribution_to_json(const FiniteDistribution& dist);
FiniteDistribution distribution_from_json(const Json& j);

/// {"n", "d", "priors", "means", "covariances" (diagonals), "seed"}.
Json gaussian_spec_to_json(const GaussianMixtureSpec& spec);
GaussianMixtureSpec gaussian_spec_from_json(const Json& j);

/// Provenance attached to a learned ensemble.
struct EnsembleMeta {
  int T = 0;
  double rho = 0.0;
  std::string metric;
  std::uint64_t seed = 0;
};

/// Scorers are written inline: {"cpe": ...} for trained models, {"eta_oracle": {"finite": ...}}
/// or {"eta_oracle": {"gaussian": ...}} for exact conditionals. Other scorer types throw.
Json rule_to_json(const ClassifierRule& rule, const std::optional<EnsembleMeta>& meta = std::nullopt);

/// Identical scorer documents are loaded once and shared between components.
ClassifierRule rule_from_json(const Json& j);
std::optional<EnsembleMeta> ensemble_meta_from_json(const Json& j);

/// Throws IoError when the file cannot be read or is not valid JSON.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace confopt
