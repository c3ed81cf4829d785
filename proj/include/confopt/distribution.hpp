#pragma once

#include <map>
#include <memory>
#include <vector>

#include "confopt/matrix.hpp"
#include "confopt/scorer.hpp"

namespace confopt {

struct SupportPoint {
  std::vector<double> x;
  double mass = 0.0;  // q_k, the marginal P(X = x_k)
  ClassDistribution eta;
};

/// Joint distribution over (X, Y) with finitely many X values.
class FiniteDistribution {
 public:
  FiniteDistribution(int n, int d, std::vector<SupportPoint> points);

  /// Support point k gets feature vector e_k (one-hot over support indices).
  static FiniteDistribution one_hot(std::vector<double> masses, std::vector<ClassDistribution> etas);

  int n() const { return n_; }
  int d() const { return d_; }
  std::size_t size() const { return points_.size(); }
  const SupportPoint& point(std::size_t k) const { return points_[k]; }
  const std::vector<SupportPoint>& points() const { return points_; }

  /// pi_i = sum_k q_k eta_k[i].
  ClassDistribution priors() const;
  double pi_min() const;

 private:
  int n_;
  int d_;
  std::vector<SupportPoint> points_;
};

/// Exact eta of a finite distribution, looked up by feature vector. Unknown inputs throw.
class FiniteEtaOracle final : public Scorer {
 public:
  explicit FiniteEtaOracle(FiniteDistribution dist);

  int num_classes() const override { return dist_.n(); }
  int dim() const override { return dist_.d(); }
  void predict_into(std::span<const double> x, std::span<double> out) const override;

  const FiniteDistribution& distribution() const { return dist_; }

 private:
  FiniteDistribution dist_;
  std::map<std::vector<double>, std::size_t> index_;
};

}  // namespace confopt
