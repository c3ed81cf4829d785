#include "confopt/gradcheck.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "confopt/error.hpp"
#include "confopt/synth.hpp"

namespace confopt {

namespace {

double max_rel_error(const SmoothedMetric& sm, const ConfusionMatrix& c, double h, bool flip) {
  const GainMatrix analytic = grad_smoothed(sm, c);
  const int n = c.n();
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      ConfusionMatrix up = c, dn = c;
      up(i, j) += h;
      dn(i, j) -= h;
      const double fd = (eval_smoothed(sm, up) - eval_smoothed(sm, dn)) / (2.0 * h);
      const double a = flip ? -analytic(i, j) : analytic(i, j);
      num = std::max(num, std::abs(a - fd));
      den = std::max(den, std::abs(fd));
    }
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace

std::vector<GradcheckRow> run_gradcheck(const GradcheckConfig& config) {
  if (config.cases < 1) throw Error("gradcheck needs at least one case");
  if (!(config.step > 0.0)) throw Error("finite-difference step must be positive");
  std::vector<GradcheckRow> rows;
  std::mt19937_64 rng(config.seed);
  for (MetricId id : config.metrics) {
    if (!has_smoothed_form(id)) throw Error("metric '" + std::string(metric_name(id)) + "' has no smoothed form");
    for (double rho : config.rhos) {
      const SmoothedMetric sm(id, rho);
      for (int n : config.sizes) {
        GradcheckRow row{id, rho, n, config.cases, 0.0, false};
        for (int t = 0; t < config.cases; ++t) {
          const auto c = random_interior_confusion(n, rng, 0.05, 0.02);
          row.max_rel_error = std::max(row.max_rel_error, max_rel_error(sm, c, config.step, config.inject_sign_flip));
        }
        row.pass = row.max_rel_error <= config.tolerance;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string format_gradcheck(const std::vector<GradcheckRow>& rows, double tolerance) {
  std::ostringstream out;
  out << "metric,rho,n,cases,max_rel_error,tolerance,pass\n";
  for (const auto& r : rows) {
    out << metric_name(r.metric) << ',' << r.rho << ',' << r.n << ',' << r.cases << ',' << r.max_rel_error << ','
        << tolerance << ',' << (r.pass ? "yes" : "no") << '\n';
  }
  return out.str();
}

}  // namespace confopt
