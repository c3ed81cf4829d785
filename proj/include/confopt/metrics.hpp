#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "confopt/matrix.hpp"

namespace confopt {

enum class MetricId {
  Accuracy,
  AM,
  BinaryF1,
  Jaccard,
  AMS,
  MicroF1,
  MacroF1,
  HMean,
  QMean,
  GMean,
  MinMax,
};

inline constexpr MetricId kAllMetrics[] = {
    MetricId::Accuracy, MetricId::AM,     MetricId::BinaryF1, MetricId::Jaccard,
    MetricId::AMS,      MetricId::MicroF1, MetricId::MacroF1, MetricId::HMean,
    MetricId::QMean,    MetricId::GMean,  MetricId::MinMax,
};

std::string_view metric_name(MetricId id);
MetricId parse_metric_id(std::string_view name);

/// BinaryF1, Jaccard and AMS are defined for n = 2 only.
bool is_binary_only(MetricId id);
bool has_smoothed_form(MetricId id);
/// Strictly increasing in the diagonal, non-increasing off the diagonal (all but MinMax).
bool is_monotone(MetricId id);

/// Base metric plus smoothing parameter rho.
struct SmoothedMetric {
  MetricId base = MetricId::HMean;
  double rho = 0.01;

  SmoothedMetric() = default;
  /// Throws unless base is HMean, QMean or GMean and rho is in [0, 1).
  SmoothedMetric(MetricId base, double rho);
};

/// What learners optimise: a plain metric, or a smoothed one when `rho` is set.
/// Parses "gmean", "gmean:rho=0.05", ...
struct Metric {
  MetricId id = MetricId::Accuracy;
  std::optional<double> rho;

  static Metric parse(std::string_view text);
  std::string to_string() const;
  bool smoothed() const { return rho.has_value(); }
  SmoothedMetric as_smoothed() const;
};

/// psi(C). Ratios with zero numerator and denominator evaluate to 0, and TPR-based means use
/// TPR_y = C_yy / pi_y under that convention.
double eval_metric(MetricId id, const ConfusionMatrix& c);

/// psi_rho(C).
double eval_smoothed(const SmoothedMetric& sm, const ConfusionMatrix& c);

/// grad psi_rho(C), entrywise (d psi_rho / d C_{u,u'}). With rho = 0 this is the gradient of the
/// unsmoothed metric at interior points.
GainMatrix grad_smoothed(const SmoothedMetric& sm, const ConfusionMatrix& c);

/// Dispatches to eval_smoothed or eval_metric.
double evaluate(const Metric& metric, const ConfusionMatrix& c);

struct SmoothingConstants {
  double theta = 0.0;       // sup |psi - psi_rho| over feasible confusions
  double lipschitz = 0.0;   // L_rho, l1 Lipschitz constant
  double smoothness = 0.0;  // beta_rho, l1 smoothness parameter
};

SmoothingConstants smoothing_constants(const SmoothedMetric& sm, double pi_min, int n);

/// xi with psi(C) - psi(C') <= xi <grad psi(C), C - C'>, for AMS, BinaryF1 and MicroF1.
double xi_constant(MetricId id, std::span<const double> priors);

}  // namespace confopt
