#pragma once

#include <string_view>
#include <vector>

#include "confopt/distribution.hpp"
#include "confopt/metrics.hpp"

namespace confopt {

enum class OracleMethod { Grid, ExhaustiveVertex, LongRunCg };

std::string_view oracle_method_name(OracleMethod m);

/// Best metric value found over a family of classifiers, with its confusion matrix.
struct OracleResult {
  double optimum_value = 0.0;
  ConfusionMatrix optimum_conf;
  std::vector<ClassDistribution> optimum_outputs;  // h(x_k) per support point, when known
  OracleMethod method = OracleMethod::Grid;
  int levels = 0;
  double spacing = 0.0;  // grid spacing (0 for vertex enumeration)
  double search_size = 0.0;
};

inline constexpr double kMaxGridSearch = 1e8;
inline constexpr double kMaxVertexSearch = 1e7;

/// levels^{(n-1) K}, the bound the grid search is checked against.
double grid_search_size(int n, std::size_t k, int levels);

/// Exhaustive search over per-point outputs on the simplex grid {c / (levels - 1)}. A lower
/// bound on the optimum over randomized classifiers. Ties keep the lexicographically smallest
/// grid index.
OracleResult grid_oracle_optimum(const FiniteDistribution& dist, const Metric& metric, int levels);

/// Best value over all n^K deterministic labelings of the support.
OracleResult vertex_oracle_optimum(const FiniteDistribution& dist, const Metric& metric);

struct Regret {
  double value = 0.0;
  bool truncated = false;  // achieved exceeded the oracle value
};

/// max(optimum - achieved, 0); non-negative, i.e. the sign-flipped P_D[h] - P*_D.
Regret regret(const OracleResult& oracle, double achieved);
Regret regret(double optimum, double achieved);

}  // namespace confopt
