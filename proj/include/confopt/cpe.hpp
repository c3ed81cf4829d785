#pragma once

#include <span>
#include <vector>

#include "confopt/distribution.hpp"
#include "confopt/sample.hpp"
#include "confopt/scorer.hpp"

namespace confopt {

/// Multinomial logistic model: eta(x) = softmax(W [x; 1]). Weights are n x (d + 1), row-major,
/// with the bias in the last column.
class CpeModel final : public Scorer {
 public:
  CpeModel(int n, int d);
  CpeModel(int n, int d, std::vector<double> weights);

  int num_classes() const override { return n_; }
  int dim() const override { return d_; }
  void predict_into(std::span<const double> x, std::span<double> out) const override;

  const std::vector<double>& weights() const { return w_; }
  std::vector<double>& weights() { return w_; }
  double weight(int cls, int j) const { return w_[static_cast<std::size_t>(cls * (d_ + 1) + j)]; }

 private:
  int n_;
  int d_;
  std::vector<double> w_;
};

struct CpeTrainConfig {
  double l2_penalty = 1e-4;  // applied to feature weights, not to the bias
  int max_iters = 5000;
  double grad_tol = 1e-6;
  // Backtracking line search. Each iteration starts from twice the last accepted step,
  // capped at initial_step * 1e6.
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  bool standardize = false;  // fit on standardized features, then fold the scaling into W

  void validate() const;
};

struct CpeFit {
  CpeModel model;
  int iterations = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
};

/// Mean negative log-likelihood plus (l2/2) ||W_features||^2.
double cpe_objective(const CpeModel& model, const LabeledSample& sample, double l2_penalty);

/// Full-batch gradient descent with backtracking. Deterministic.
CpeFit train_cpe(const LabeledSample& sample, const CpeTrainConfig& config);

/// sum_k q_k || eta_hat(x_k) - eta_k ||_1.
double l1_calibration_error(const Scorer& model, const FiniteDistribution& dist);

/// (1/m) sum_k || eta_hat(x_k) - eta(x_k) ||_1 over given feature rows.
double l1_calibration_error(const Scorer& model, const Scorer& eta,
                            std::span<const double> features, int d);

}  // namespace confopt
