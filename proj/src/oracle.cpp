#include "confopt/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "confopt/error.hpp"

namespace confopt {

namespace {

void reject_zero_prior(const FiniteDistribution& dist, const Metric& metric) {
  if (metric.id != MetricId::HMean && metric.id != MetricId::GMean) return;
  for (double p : dist.priors()) {
    if (p <= 0.0) throw Error("class with zero prior");
  }
}

// All points of the simplex grid {c / steps}, in lexicographic order of c.
std::vector<ClassDistribution> simplex_grid(int n, int steps) {
  std::vector<ClassDistribution> out;
  std::vector<int> c(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == n - 1) {
      c[static_cast<std::size_t>(pos)] = left;
      ClassDistribution p(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = static_cast<double>(c[static_cast<std::size_t>(i)]) / steps;
      out.push_back(std::move(p));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, steps);
  return out;
}

// Best metric over all choices of one output per support point from `outputs`, enumerated
// with the last support point varying fastest (lexicographic order).
OracleResult enumerate(const FiniteDistribution& dist, const Metric& metric,
                       const std::vector<ClassDistribution>& outputs) {
  const int n = dist.n();
  const std::size_t k = dist.size();
  const std::size_t nn = static_cast<std::size_t>(n * n);
  // contrib[point][output] = q_k eta_k h^T, flattened.
  std::vector<std::vector<double>> contrib(k, std::vector<double>(outputs.size() * nn));
  for (std::size_t p = 0; p < k; ++p) {
    const auto& pt = dist.point(p);
    for (std::size_t o = 0; o < outputs.size(); ++o) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          contrib[p][o * nn + static_cast<std::size_t>(i * n + j)] =
              pt.mass * pt.eta[static_cast<std::size_t>(i)] * outputs[o][static_cast<std::size_t>(j)];
        }
      }
    }
  }
  std::vector<std::size_t> idx(k, 0);
  std::vector<std::size_t> best_idx;
  double best = -std::numeric_limits<double>::infinity();
  ConfusionMatrix c(n);
  while (true) {
    auto e = c.entries();
    std::fill(e.begin(), e.end(), 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const double* src = contrib[p].data() + idx[p] * nn;
      for (std::size_t t = 0; t < nn; ++t) e[t] += src[t];
    }
    double v;
    try {
      v = evaluate(metric, c);
    } catch (const Error&) {
      v = -std::numeric_limits<double>::infinity();
    }
    if (v > best) {
      best = v;
      best_idx = idx;
    }
    std::size_t p = k;
    while (p > 0) {
      --p;
      if (++idx[p] < outputs.size()) break;
      idx[p] = 0;
      if (p == 0) {
        p = k;  // wrapped around
        break;
      }
    }
    if (p == k) break;
  }
  if (best_idx.empty()) throw Error("metric is undefined on every candidate classifier");
  OracleResult r;
  r.optimum_value = best;
  r.optimum_conf = ConfusionMatrix(n);
  for (std::size_t p = 0; p < k; ++p) {
    r.optimum_outputs.push_back(outputs[best_idx[p]]);
    const double* src = contrib[p].data() + best_idx[p] * nn;
    for (std::size_t t = 0; t < nn; ++t) r.optimum_conf.entries()[t] += src[t];
  }
  return r;
}

}  // namespace

std::string_view oracle_method_name(OracleMethod m) {
  switch (m) {
    case OracleMethod::Grid:
      return "grid";
    case OracleMethod::ExhaustiveVertex:
      return "exhaustive-vertex";
    case OracleMethod::LongRunCg:
      return "long-run-cg";
  }
  return "unknown";
}

double grid_search_size(int n, std::size_t k, int levels) {
  return std::pow(static_cast<double>(levels), static_cast<double>((n - 1) * static_cast<int>(k)));
}

OracleResult grid_oracle_optimum(const FiniteDistribution& dist, const Metric& metric, int levels) {
  if (levels < 2) throw Error("grid oracle needs at least 2 levels");
  if (is_binary_only(metric.id) && dist.n() != 2) throw Error("metric requires n=2");
  const double size = grid_search_size(dist.n(), dist.size(), levels);
  if (size > kMaxGridSearch) {
    throw Error("grid search size " + std::to_string(size) + " exceeds the limit of 1e8");
  }
  reject_zero_prior(dist, metric);
  auto r = enumerate(dist, metric, simplex_grid(dist.n(), levels - 1));
  r.method = OracleMethod::Grid;
  r.levels = levels;
  r.spacing = 1.0 / (levels - 1);
  r.search_size = size;
  return r;
}

OracleResult vertex_oracle_optimum(const FiniteDistribution& dist, const Metric& metric) {
  if (is_binary_only(metric.id) && dist.n() != 2) throw Error("metric requires n=2");
  const double size = std::pow(static_cast<double>(dist.n()), static_cast<double>(dist.size()));
  if (size > kMaxVertexSearch) {
    throw Error("vertex search size " + std::to_string(size) + " exceeds the limit of 1e7");
  }
  reject_zero_prior(dist, metric);
  std::vector<ClassDistribution> vertices;
  for (int y = 0; y < dist.n(); ++y) {
    ClassDistribution e(static_cast<std::size_t>(dist.n()), 0.0);
    e[static_cast<std::size_t>(y)] = 1.0;
    vertices.push_back(std::move(e));
  }
  auto r = enumerate(dist, metric, vertices);
  r.method = OracleMethod::ExhaustiveVertex;
  r.search_size = size;
  return r;
}

Regret regret(double optimum, double achieved) {
  const double gap = optimum - achieved;
  return gap >= 0.0 ? Regret{gap, false} : Regret{0.0, true};
}

Regret regret(const OracleResult& oracle, double achieved) { return regret(oracle.optimum_value, achieved); }

}  // namespace confopt
