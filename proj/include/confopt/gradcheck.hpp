#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "confopt/metrics.hpp"

namespace confopt {

struct GradcheckConfig {
  std::vector<MetricId> metrics{MetricId::HMean, MetricId::QMean, MetricId::GMean};
  std::vector<double> rhos{0.1, 0.01};
  std::vector<int> sizes{2, 4};
  int cases = 100;  // random interior confusions per (metric, rho, n)
  double step = 1e-6;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
  bool inject_sign_flip = false;  // negate the analytic gradient, to check the check
};

struct GradcheckRow {
  MetricId metric = MetricId::HMean;
  double rho = 0.0;
  int n = 0;
  int cases = 0;
  double max_rel_error = 0.0;  // max over cases of ||analytic - fd||_inf / ||fd||_inf
  bool pass = false;
};

/// Central differences against grad_smoothed, one row per (metric, rho, n).
std::vector<GradcheckRow> run_gradcheck(const GradcheckConfig& config);

/// CSV table: metric,rho,n,cases,max_rel_error,tolerance,pass.
std::string format_gradcheck(const std::vector<GradcheckRow>& rows, double tolerance);

}  // namespace confopt
