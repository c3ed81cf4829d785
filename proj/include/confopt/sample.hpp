#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace confopt {

/// m labelled rows with a shared feature dimension. Labels are stored 0-based
/// (class y in files and docs is label y-1 here).
class LabeledSample {
 public:
  LabeledSample(int n, int d);
  LabeledSample(int n, int d, std::vector<double> features, std::vector<int> labels);

  int n() const { return n_; }
  int d() const { return d_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  std::span<const double> x(std::size_t k) const {
    return {features_.data() + k * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  int y(std::size_t k) const { return labels_[k]; }

  const std::vector<double>& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }

  void add(std::span<const double> x, int label);

  LabeledSample subset(std::span<const std::size_t> rows) const;

  /// Empirical class frequencies.
  std::vector<double> class_frequencies() const;

 private:
  int n_;
  int d_;
  std::vector<double> features_;
  std::vector<int> labels_;
};

struct SplitConfig {
  double alpha = 0.5;  // fraction sent to the tuning split S''
  std::uint64_t seed = 0;
};

struct SplitSample {
  LabeledSample train;  // S', floor((1-alpha) m) rows
  LabeledSample tune;   // S'', ceil(alpha m) rows
};

/// Sizes (m1, m2) = (floor((1-alpha) m), ceil(alpha m)); throws if either is zero.
std::pair<std::size_t, std::size_t> split_sizes(std::size_t m, double alpha);

/// Seeded random partition of `sample` into S' and S''.
SplitSample split_sample(const LabeledSample& sample, const SplitConfig& config);

}  // namespace confopt
