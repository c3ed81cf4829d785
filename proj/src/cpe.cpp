#include "confopt/cpe.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "confopt/error.hpp"

namespace confopt {

namespace {

// Writes softmax(W [x; 1]) into p and returns log-sum-exp of the scores.
double softmax_into(const std::vector<double>& w, int n, int d, std::span<const double> x,
                    std::span<double> p) {
  const std::size_t stride = static_cast<std::size_t>(d + 1);
  double mx = -INFINITY;
  for (int c = 0; c < n; ++c) {
    const double* row = w.data() + static_cast<std::size_t>(c) * stride;
    double s = row[d];
    for (int j = 0; j < d; ++j) s += row[j] * x[static_cast<std::size_t>(j)];
    p[static_cast<std::size_t>(c)] = s;
    mx = std::max(mx, s);
  }
  double z = 0.0;
  for (int c = 0; c < n; ++c) z += (p[static_cast<std::size_t>(c)] = std::exp(p[static_cast<std::size_t>(c)] - mx));
  for (int c = 0; c < n; ++c) p[static_cast<std::size_t>(c)] /= z;
  return mx + std::log(z);
}

double penalty(const std::vector<double>& w, int n, int d, double l2) {
  double s = 0.0;
  for (int c = 0; c < n; ++c) {
    for (int j = 0; j < d; ++j) {
      const double v = w[static_cast<std::size_t>(c * (d + 1) + j)];
      s += v * v;
    }
  }
  return 0.5 * l2 * s;
}

// Objective value; when `g` is non-null also writes the gradient and returns its norm in *gnorm.
// Training rows with identical (x, y) merged; count[k] is the multiplicity of row k.
struct Rows {
  std::vector<double> x;
  std::vector<int> y;
  std::vector<double> count;
  double total = 0.0;
};

Rows merge_rows(const std::vector<double>& x, const std::vector<int>& y, int d) {
  std::map<std::pair<std::vector<double>, int>, double> groups;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const auto first = x.begin() + static_cast<std::ptrdiff_t>(k * static_cast<std::size_t>(d));
    groups[{std::vector<double>(first, first + d), y[k]}] += 1.0;
  }
  Rows r;
  r.total = static_cast<double>(y.size());
  // Merging only pays off when rows repeat; otherwise keep the original order.
  if (groups.size() * 2 > y.size()) {
    r.x = x;
    r.y = y;
    r.count.assign(y.size(), 1.0);
    return r;
  }
  for (const auto& [key, c] : groups) {
    r.x.insert(r.x.end(), key.first.begin(), key.first.end());
    r.y.push_back(key.second);
    r.count.push_back(c);
  }
  return r;
}

double evaluate_objective(const std::vector<double>& w, int n, int d, const Rows& rows, double l2,
                          std::vector<double>* g, double* gnorm) {
  std::vector<double> p(static_cast<std::size_t>(n));
  const auto& x = rows.x;
  const auto& y = rows.y;
  const std::size_t m = y.size();
  const std::size_t stride = static_cast<std::size_t>(d + 1);
  if (g) std::fill(g->begin(), g->end(), 0.0);
  double loss = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::span<const double> xk(x.data() + k * static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    const double lse = softmax_into(w, n, d, xk, p);
    const double* row = w.data() + static_cast<std::size_t>(y[k]) * stride;
    double score = row[d];
    for (int j = 0; j < d; ++j) score += row[j] * xk[static_cast<std::size_t>(j)];
    const double cnt = rows.count[k];
    loss += cnt * (lse - score);
    if (!g) continue;
    p[static_cast<std::size_t>(y[k])] -= 1.0;
    for (int c = 0; c < n; ++c) {
      double* grow = g->data() + static_cast<std::size_t>(c) * stride;
      const double r = cnt * p[static_cast<std::size_t>(c)];
      for (int j = 0; j < d; ++j) grow[j] += r * xk[static_cast<std::size_t>(j)];
      grow[d] += r;
    }
  }
  if (g) {
    double norm2 = 0.0;
    for (int c = 0; c < n; ++c) {
      for (int j = 0; j <= d; ++j) {
        const std::size_t idx = static_cast<std::size_t>(c) * stride + static_cast<std::size_t>(j);
        double& gi = (*g)[idx];
        gi /= rows.total;
        if (j < d) gi += l2 * w[idx];
        norm2 += gi * gi;
      }
    }
    *gnorm = std::sqrt(norm2);
  }
  return loss / rows.total + penalty(w, n, d, l2);
}

}  // namespace

CpeModel::CpeModel(int n, int d)
    : n_(n), d_(d), w_(static_cast<std::size_t>(n) * static_cast<std::size_t>(d + 1), 0.0) {
  if (n < 1 || n > kMaxClasses) throw Error("class count must be in [1, 64]");
  if (d < 0) throw Error("negative feature dimension");
}

CpeModel::CpeModel(int n, int d, std::vector<double> weights) : CpeModel(n, d) {
  if (weights.size() != w_.size()) {
    throw Error("CPE weights need " + std::to_string(w_.size()) + " entries, got " +
                std::to_string(weights.size()));
  }
  for (double v : weights) {
    if (!std::isfinite(v)) throw Error("CPE weights must be finite");
  }
  w_ = std::move(weights);
}

void CpeModel::predict_into(std::span<const double> x, std::span<double> out) const {
  if (x.size() != static_cast<std::size_t>(d_)) {
    throw Error("feature dimension " + std::to_string(x.size()) + " does not match model dimension " +
                std::to_string(d_));
  }
  softmax_into(w_, n_, d_, x, out);
}

void CpeTrainConfig::validate() const {
  if (!(l2_penalty >= 0.0)) throw Error("l2 penalty must be nonnegative");
  if (max_iters < 1) throw Error("max_iters must be at least 1");
  if (!(grad_tol > 0.0)) throw Error("grad_tol must be positive");
  if (!(initial_step > 0.0)) throw Error("initial step must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw Error("shrink factor must lie in (0, 1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 1.0)) {
    throw Error("sufficient-decrease constant must lie in (0, 1)");
  }
}

double cpe_objective(const CpeModel& model, const LabeledSample& sample, double l2_penalty) {
  if (sample.empty()) throw Error("empty sample");
  if (sample.d() != model.dim() || sample.n() != model.num_classes()) {
    throw Error("model and sample dimensions differ");
  }
  const Rows rows{sample.features(), sample.labels(), std::vector<double>(sample.size(), 1.0),
                  static_cast<double>(sample.size())};
  return evaluate_objective(model.weights(), model.num_classes(), model.dim(), rows, l2_penalty, nullptr, nullptr);
}

CpeFit train_cpe(const LabeledSample& sample, const CpeTrainConfig& config) {
  config.validate();
  if (sample.empty()) throw Error("empty sample");
  const int n = sample.n();
  const int d = sample.d();
  if (d < 1) throw Error("CPE training needs at least one feature");
  for (double v : sample.features()) {
    if (!std::isfinite(v)) throw Error("non-finite feature value");
  }

  std::vector<double> mean(static_cast<std::size_t>(d), 0.0);
  std::vector<double> scale(static_cast<std::size_t>(d), 1.0);
  std::vector<double> x = sample.features();
  const std::size_t m = sample.size();
  if (config.standardize) {
    for (std::size_t k = 0; k < m; ++k) {
      for (int j = 0; j < d; ++j) mean[static_cast<std::size_t>(j)] += x[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
    }
    for (double& v : mean) v /= static_cast<double>(m);
    std::vector<double> var(static_cast<std::size_t>(d), 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      for (int j = 0; j < d; ++j) {
        const double c = x[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] - mean[static_cast<std::size_t>(j)];
        var[static_cast<std::size_t>(j)] += c * c;
      }
    }
    for (int j = 0; j < d; ++j) {
      const double sd = std::sqrt(var[static_cast<std::size_t>(j)] / static_cast<double>(m));
      scale[static_cast<std::size_t>(j)] = sd > 0.0 ? sd : 1.0;
    }
    for (std::size_t k = 0; k < m; ++k) {
      for (int j = 0; j < d; ++j) {
        double& v = x[k * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
        v = (v - mean[static_cast<std::size_t>(j)]) / scale[static_cast<std::size_t>(j)];
      }
    }
  }

  const Rows rows = merge_rows(x, sample.labels(), d);
  const double l2 = config.l2_penalty;
  std::vector<double> w(static_cast<std::size_t>(n) * static_cast<std::size_t>(d + 1), 0.0);
  std::vector<double> g(w.size());
  std::vector<double> trial(w.size());
  std::vector<double> trial_g(w.size());
  double gnorm = 0.0;
  double f = evaluate_objective(w, n, d, rows, l2, &g, &gnorm);
  double step = config.initial_step;
  const double max_step = config.initial_step * 1e6;
  int iter = 0;
  while (iter < config.max_iters && gnorm > config.grad_tol) {
    bool accepted = false;
    double s = step;
    for (int tries = 0; tries < 80; ++tries) {
      for (std::size_t i = 0; i < w.size(); ++i) trial[i] = w[i] - s * g[i];
      double trial_norm = 0.0;
      const double ft = evaluate_objective(trial, n, d, rows, l2, &trial_g, &trial_norm);
      if (ft <= f - config.sufficient_decrease * s * gnorm * gnorm) {
        w.swap(trial);
        g.swap(trial_g);
        f = ft;
        gnorm = trial_norm;
        accepted = true;
        break;
      }
      s *= config.shrink;
    }
    if (!accepted) break;  // no representable descent step left
    ++iter;
    step = std::min(2.0 * s, max_step);
  }

  if (config.standardize) {
    const std::size_t stride = static_cast<std::size_t>(d + 1);
    for (int c = 0; c < n; ++c) {
      double* row = w.data() + static_cast<std::size_t>(c) * stride;
      for (int j = 0; j < d; ++j) {
        row[j] /= scale[static_cast<std::size_t>(j)];
        row[d] -= row[j] * mean[static_cast<std::size_t>(j)];
      }
    }
  }
  return CpeFit{CpeModel(n, d, std::move(w)), iter, f, gnorm};
}

double l1_calibration_error(const Scorer& model, const FiniteDistribution& dist) {
  if (model.num_classes() != dist.n() || model.dim() != dist.d()) {
    throw Error("model and distribution dimensions differ");
  }
  ClassDistribution p(static_cast<std::size_t>(dist.n()));
  double err = 0.0;
  for (const auto& pt : dist.points()) {
    model.predict_into(pt.x, p);
    double e = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) e += std::abs(p[i] - pt.eta[i]);
    err += pt.mass * e;
  }
  return err;
}

double l1_calibration_error(const Scorer& model, const Scorer& eta, std::span<const double> features,
                            int d) {
  if (model.num_classes() != eta.num_classes()) throw Error("model and eta disagree on class count");
  if (d <= 0 || features.empty() || features.size() % static_cast<std::size_t>(d) != 0) {
    throw Error("feature buffer is empty or not a multiple of the dimension");
  }
  const std::size_t m = features.size() / static_cast<std::size_t>(d);
  ClassDistribution p(static_cast<std::size_t>(model.num_classes()));
  ClassDistribution q(p.size());
  double err = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const auto x = features.subspan(k * static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    model.predict_into(x, p);
    eta.predict_into(x, q);
    for (std::size_t i = 0; i < p.size(); ++i) err += std::abs(p[i] - q[i]);
  }
  return err / static_cast<double>(m);
}

}  // namespace confopt
