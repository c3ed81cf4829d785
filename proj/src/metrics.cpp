#include "confopt/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "confopt/error.hpp"

namespace confopt {

namespace {

constexpr std::pair<MetricId, std::string_view> kNames[] = {
    {MetricId::Accuracy, "accuracy"}, {MetricId::AM, "am"},          {MetricId::BinaryF1, "binary-f1"},
    {MetricId::Jaccard, "jaccard"},   {MetricId::AMS, "ams"},        {MetricId::MicroF1, "micro-f1"},
    {MetricId::MacroF1, "macro-f1"},  {MetricId::HMean, "hmean"},    {MetricId::QMean, "qmean"},
    {MetricId::GMean, "gmean"},       {MetricId::MinMax, "minmax"},
};

double safe_ratio(double num, double den) {
  if (num == 0.0 && den == 0.0) return 0.0;
  return num / den;
}

std::vector<double> tprs(const ConfusionMatrix& c) {
  std::vector<double> t(static_cast<std::size_t>(c.n()));
  for (int y = 0; y < c.n(); ++y) t[static_cast<std::size_t>(y)] = safe_ratio(c(y, y), c.row_sum(y));
  return t;
}

double off_row(const ConfusionMatrix& c, int y) { return c.row_sum(y) - c(y, y); }

void require_binary(MetricId id, int n) {
  if (is_binary_only(id) && n != 2) throw Error("metric requires n=2");
}

[[noreturn]] void singular() { throw Error("singular at rho=0"); }

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string_view metric_name(MetricId id) {
  for (const auto& [k, name] : kNames) {
    if (k == id) return name;
  }
  throw Error("unknown metric id");
}

MetricId parse_metric_id(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  throw Error("unknown metric '" + std::string(name) + "'");
}

bool is_binary_only(MetricId id) {
  return id == MetricId::BinaryF1 || id == MetricId::Jaccard || id == MetricId::AMS;
}

bool has_smoothed_form(MetricId id) {
  return id == MetricId::HMean || id == MetricId::QMean || id == MetricId::GMean;
}

bool is_monotone(MetricId id) { return id != MetricId::MinMax; }

SmoothedMetric::SmoothedMetric(MetricId base_id, double rho_value) : base(base_id), rho(rho_value) {
  if (!has_smoothed_form(base)) {
    throw Error("no smoothed form for metric '" + std::string(metric_name(base)) + "'");
  }
  if (!(rho >= 0.0 && rho < 1.0)) throw Error("rho must lie in [0, 1)");
}

Metric Metric::parse(std::string_view text) {
  Metric m;
  const auto colon = text.find(':');
  m.id = parse_metric_id(text.substr(0, colon));
  if (colon != std::string_view::npos) {
    const auto opt = text.substr(colon + 1);
    if (opt.substr(0, 4) != "rho=") throw Error("expected 'rho=<value>' after ':' in '" + std::string(text) + "'");
    const double rho = parse_double(opt.substr(4));
    (void)SmoothedMetric(m.id, rho);
    m.rho = rho;
  }
  return m;
}

std::string Metric::to_string() const {
  std::string s(metric_name(id));
  if (rho) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, *rho);
    s += ":rho=" + std::string(buf, res.ptr);
  }
  return s;
}

SmoothedMetric Metric::as_smoothed() const {
  if (!rho) throw Error("metric '" + to_string() + "' has no smoothing parameter");
  return SmoothedMetric(id, *rho);
}

double eval_metric(MetricId id, const ConfusionMatrix& c) {
  const int n = c.n();
  require_binary(id, n);
  switch (id) {
    case MetricId::Accuracy: {
      double s = 0.0;
      for (int y = 0; y < n; ++y) s += c(y, y);
      return s;
    }
    case MetricId::AM: {
      double s = 0.0;
      for (double t : tprs(c)) s += t;
      return s / n;
    }
    case MetricId::BinaryF1:
      return safe_ratio(2 * c(1, 1), 2 * c(1, 1) + c(0, 1) + c(1, 0));
    case MetricId::Jaccard:
      return safe_ratio(c(1, 1), c(1, 1) + c(1, 0) + c(0, 1));
    case MetricId::AMS: {
      const double fp = c(0, 1);
      const double tp = c(1, 1);
      if (fp <= 0.0) throw Error("AMS undefined when C_12 = 0");
      return std::sqrt(std::max(0.0, 2 * ((fp + tp) * std::log1p(tp / fp) - tp)));
    }
    case MetricId::MicroF1: {
      double diag = 0.0;
      for (int y = 1; y < n; ++y) diag += c(y, y);
      double off = 0.0;
      for (int i = 0; i < n; ++i) off += off_row(c, i);
      return safe_ratio(2 * diag, 2 * diag + off);
    }
    case MetricId::MacroF1: {
      double s = 0.0;
      for (int y = 0; y < n; ++y) s += safe_ratio(2 * c(y, y), c.row_sum(y) + c.col_sum(y));
      return s / n;
    }
    case MetricId::HMean: {
      double s = 0.0;
      for (double t : tprs(c)) {
        if (t == 0.0) return 0.0;
        s += 1.0 / t;
      }
      return n / s;
    }
    case MetricId::QMean: {
      double s = 0.0;
      for (double t : tprs(c)) s += (1 - t) * (1 - t);
      return 1.0 - std::sqrt(s / n);
    }
    case MetricId::GMean: {
      double p = 1.0;
      for (double t : tprs(c)) p *= t;
      return std::pow(p, 1.0 / n);
    }
    case MetricId::MinMax: {
      const auto t = tprs(c);
      return *std::min_element(t.begin(), t.end());
    }
  }
  throw Error("unknown metric id");
}

double eval_smoothed(const SmoothedMetric& sm, const ConfusionMatrix& c) {
  const int n = c.n();
  const double rho = sm.rho;
  switch (sm.base) {
    case MetricId::HMean: {
      double s = 0.0;
      for (int y = 0; y < n; ++y) {
        if (c(y, y) + rho <= 0.0) singular();
        s += (c.row_sum(y) + rho) / (c(y, y) + rho);
      }
      return n / s;
    }
    case MetricId::QMean: {
      double s = 0.0;
      for (int y = 0; y < n; ++y) {
        if (c.row_sum(y) + rho <= 0.0) singular();
        const double a = (off_row(c, y) + rho) / (c.row_sum(y) + rho);
        s += a * a;
      }
      return 1.0 - std::sqrt(s / n);
    }
    case MetricId::GMean: {
      double logsum = 0.0;
      for (int y = 0; y < n; ++y) {
        if (c(y, y) + rho <= 0.0) singular();
        logsum += std::log((c(y, y) + rho) / (c.row_sum(y) + rho));
      }
      return std::exp(logsum / n);
    }
    default:
      throw Error("no smoothed form for this metric");
  }
}

GainMatrix grad_smoothed(const SmoothedMetric& sm, const ConfusionMatrix& c) {
  const int n = c.n();
  const double rho = sm.rho;
  GainMatrix g(n);
  switch (sm.base) {
    case MetricId::HMean: {
      double s = 0.0;
      for (int y = 0; y < n; ++y) {
        if (c(y, y) + rho <= 0.0) singular();
        s += (c.row_sum(y) + rho) / (c(y, y) + rho);
      }
      const double scale = n / (s * s);
      for (int u = 0; u < n; ++u) {
        const double d = c(u, u) + rho;
        for (int v = 0; v < n; ++v) {
          g(u, v) = (u == v) ? scale * off_row(c, u) / (d * d) : -scale / d;
        }
      }
      return g;
    }
    case MetricId::QMean: {
      std::vector<double> a(static_cast<std::size_t>(n));
      double s = 0.0;
      for (int y = 0; y < n; ++y) {
        if (c.row_sum(y) + rho <= 0.0) singular();
        a[static_cast<std::size_t>(y)] = (off_row(c, y) + rho) / (c.row_sum(y) + rho);
        s += a[static_cast<std::size_t>(y)] * a[static_cast<std::size_t>(y)];
      }
      if (s <= 0.0) singular();
      const double scale = 1.0 / (std::sqrt(static_cast<double>(n)) * std::sqrt(s));
      for (int u = 0; u < n; ++u) {
        const double r = c.row_sum(u) + rho;
        const double r3 = r * r * r;
        const double o = off_row(c, u) + rho;
        for (int v = 0; v < n; ++v) {
          g(u, v) = (u == v) ? scale * o * o / r3 : -scale * o * c(u, u) / r3;
        }
      }
      return g;
    }
    case MetricId::GMean: {
      const double psi = eval_smoothed(sm, c);
      for (int u = 0; u < n; ++u) {
        const double d = c(u, u) + rho;
        const double r = c.row_sum(u) + rho;
        // d psi / d b_u = psi / (n b_u), with b_u = d / r.
        const double outer = psi * r / (n * d);
        for (int v = 0; v < n; ++v) {
          g(u, v) = (u == v) ? outer * off_row(c, u) / (r * r) : -outer * d / (r * r);
        }
      }
      return g;
    }
    default:
      throw Error("no smoothed form for this metric");
  }
}

double evaluate(const Metric& metric, const ConfusionMatrix& c) {
  return metric.rho ? eval_smoothed(metric.as_smoothed(), c) : eval_metric(metric.id, c);
}

SmoothingConstants smoothing_constants(const SmoothedMetric& sm, double pi_min, int n) {
  if (!(pi_min > 0.0 && pi_min <= 1.0)) throw Error("pi_min must lie in (0, 1]");
  if (!(sm.rho > 0.0 && sm.rho < 1.0)) throw Error("smoothing constants need rho in (0, 1)");
  if (n < 2) throw Error("smoothing constants need n >= 2");
  const double rho = sm.rho;
  const double nn = n;
  SmoothingConstants k;
  switch (sm.base) {
    case MetricId::HMean:
      k.theta = nn / pi_min * rho;
      k.lipschitz = nn / rho;
      k.smoothness = 2 * nn / (rho * rho);
      break;
    case MetricId::QMean:
      k.theta = rho / (pi_min * std::sqrt(nn));
      k.lipschitz = 1.0 / (std::sqrt(nn) * rho);
      k.smoothness = 2.0 / std::sqrt(nn) / (rho * rho) * (1 + 1 / rho);
      break;
    case MetricId::GMean:
      k.theta = 2 * std::pow(rho, 1 / nn);
      k.lipschitz = 1 / nn / rho * std::pow(1 + 1 / rho, 1 - 1 / nn);
      k.smoothness = 1 / (nn * nn) / (rho * rho * rho) * std::pow(1 + 1 / rho, 1 - 2 / nn);
      break;
    default:
      throw Error("no smoothed form for this metric");
  }
  return k;
}

double xi_constant(MetricId id, std::span<const double> priors) {
  switch (id) {
    case MetricId::AMS:
      return 1.0;
    case MetricId::BinaryF1:
      if (priors.empty() || !(priors[0] > 0.0)) throw Error("xi needs pi_1 > 0");
      return 1.0 / priors[0];
    case MetricId::MicroF1:
      if (priors.empty() || !(priors[0] < 1.0)) throw Error("xi needs pi_1 < 1");
      return 1.0 / (1.0 - priors[0]);
    default:
      throw Error("no published ξ for metric '" + std::string(metric_name(id)) + "'");
  }
}

}  // namespace confopt
