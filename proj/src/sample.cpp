#include "confopt/sample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "confopt/error.hpp"
#include "confopt/matrix.hpp"

namespace confopt {

LabeledSample::LabeledSample(int n, int d) : n_(n), d_(d) {
  if (n < 1 || n > kMaxClasses) throw Error("class count must be in [1, 64]");
  if (d < 0) throw Error("negative feature dimension");
}

LabeledSample::LabeledSample(int n, int d, std::vector<double> features, std::vector<int> labels)
    : LabeledSample(n, d) {
  if (features.size() != labels.size() * static_cast<std::size_t>(d)) {
    throw Error("feature buffer does not match row count");
  }
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] < 0 || labels[k] >= n) {
      throw Error("invalid label at row " + std::to_string(k));
    }
  }
  features_ = std::move(features);
  labels_ = std::move(labels);
}

void LabeledSample::add(std::span<const double> x, int label) {
  if (x.size() != static_cast<std::size_t>(d_)) throw Error("row dimension mismatch");
  if (label < 0 || label >= n_) throw Error("invalid label");
  features_.insert(features_.end(), x.begin(), x.end());
  labels_.push_back(label);
}

LabeledSample LabeledSample::subset(std::span<const std::size_t> rows) const {
  LabeledSample out(n_, d_);
  out.features_.reserve(rows.size() * static_cast<std::size_t>(d_));
  out.labels_.reserve(rows.size());
  for (std::size_t r : rows) {
    const auto xr = x(r);
    out.features_.insert(out.features_.end(), xr.begin(), xr.end());
    out.labels_.push_back(labels_[r]);
  }
  return out;
}

std::vector<double> LabeledSample::class_frequencies() const {
  std::vector<double> f(static_cast<std::size_t>(n_), 0.0);
  if (labels_.empty()) return f;
  for (int y : labels_) f[static_cast<std::size_t>(y)] += 1.0;
  for (double& v : f) v /= static_cast<double>(labels_.size());
  return f;
}

std::pair<std::size_t, std::size_t> split_sizes(std::size_t m, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("split fraction alpha must lie in (0, 1)");
  // ceil(alpha m) with a guard against alpha*m landing a hair above an integer.
  const double am = alpha * static_cast<double>(m);
  const auto m2 = static_cast<std::size_t>(std::ceil(am - 1e-9 * std::max(1.0, am)));
  const std::size_t m1 = m - std::min(m2, m);
  if (m1 == 0 || m2 == 0) {
    throw Error("split of " + std::to_string(m) + " rows with alpha " + std::to_string(alpha) +
                " leaves an empty part");
  }
  return {m1, m2};
}

SplitSample split_sample(const LabeledSample& sample, const SplitConfig& config) {
  if (sample.empty()) throw Error("empty sample");
  const auto [m1, m2] = split_sizes(sample.size(), config.alpha);
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::span<const std::size_t> all(order);
  return {sample.subset(all.first(m1)), sample.subset(all.subspan(m1, m2))};
}

}  // namespace confopt
