// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
// Reference values are computed here from first principles wherever possible, so the
// library routines are checked against code that does not share their implementation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "confopt/cg.hpp"
#include "confopt/confusion.hpp"
#include "confopt/experiment.hpp"
#include "confopt/metrics.hpp"
#include "confopt/oracle.hpp"
#include "confopt/plugin.hpp"
#include "confopt/synth.hpp"

using namespace confopt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::vector<double> dirichlet(int n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  double s = 0.0;
  for (auto& x : v) s += (x = e(rng));
  for (auto& x : v) x /= s;
  return v;
}

FiniteDistribution coin_flip() { return FiniteDistribution::one_hot({1.0}, {{0.5, 0.5}}); }

// conf_ij = sum_k q_k eta_k[i] h_k[j], written out directly.
Matrix direct_conf(const FiniteDistribution& d, const std::vector<std::vector<double>>& outputs) {
  Matrix c(d.n());
  for (std::size_t k = 0; k < d.size(); ++k) {
    for (int i = 0; i < d.n(); ++i) {
      for (int j = 0; j < d.n(); ++j) c(i, j) += d.point(k).mass * d.point(k).eta[i] * outputs[k][j];
    }
  }
  return c;
}

double max_abs(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k) m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
  return m;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

Outcome criterion1() {
  const auto t0 = Clock::now();
  const auto dist = coin_flip();
  const auto rule = ClassifierRule::constant({0.5, 0.5});
  const auto conf = exact_conf(rule, dist);
  double conf_err = 0.0;
  for (double v : conf.entries()) conf_err = std::max(conf_err, std::abs(v - 0.25));

  const auto g = grad_smoothed(SmoothedMetric(MetricId::HMean, 1e-8), conf);
  const double expect[2][2] = {{0.5, -0.5}, {-0.5, 0.5}};
  double grad_err = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) grad_err = std::max(grad_err, std::abs(g(i, j) - expect[i][j]));
  }
  const Metric hm{MetricId::HMean, std::nullopt};
  const double grid = grid_oracle_optimum(dist, hm, 1001).optimum_value;
  const double vertex = vertex_oracle_optimum(dist, hm).optimum_value;
  const double secs = seconds_since(t0);
  const bool ok = conf_err <= 1e-15 && grad_err <= 1e-6 && std::abs(grid - 0.5) <= 1e-3 && vertex == 0.0 && secs < 1.0;
  return {ok, fmt("conf err %.1e, grad err %.1e, grid HM %.6f, vertex HM %g, %.2fs", conf_err, grad_err, grid,
                  vertex, secs)};
}

Outcome criterion2() {
  const auto t0 = Clock::now();
  const auto dist = coin_flip();
  const ScorerSource oracle_cpe{CpeTrainConfig{}, std::make_shared<const FiniteEtaOracle>(dist)};
  const auto sample = sample_from(dist, 4000, 7);
  CgConfig cg;
  cg.iterations = 2000;
  cg.seed = 7;
  cg.record_trace = false;
  const auto learned = bayescg(sample, SmoothedMetric(MetricId::HMean, 1e-3), cg, oracle_cpe);
  const double cg_hm = eval_metric(MetricId::HMean, exact_conf(learned.ensemble, dist));
  const auto brute = brute_force_plugin(sample, Metric{MetricId::HMean, std::nullopt}, SplitConfig{0.5, 7},
                                        GainGridConfig{}, oracle_cpe);
  const double brute_hm = eval_metric(MetricId::HMean, exact_conf(brute.rule, dist));
  const double secs = seconds_since(t0);
  const bool ok = cg_hm >= 0.45 && brute_hm == 0.0 && secs < 10.0;
  return {ok, fmt("BayesCG H-mean %.6f, brute-force plug-in H-mean %g, %.2fs", cg_hm, brute_hm, secs)};
}

Outcome criterion3() {
  const auto t0 = Clock::now();
  constexpr double rho = 0.05;
  constexpr int levels = 1001;
  std::mt19937_64 rng(3);
  int checks = 0, violations = 0;
  double worst_margin = -1e300, worst_gap = 0.0;
  for (int inst = 0; inst < 3; ++inst) {
    const auto dist = random_finite_distribution(2, 2, rng);
    for (MetricId id : {MetricId::HMean, MetricId::QMean, MetricId::GMean}) {
      const SmoothedMetric sm(id, rho);
      const auto k = smoothing_constants(sm, dist.pi_min(), 2);
      const auto oracle = grid_oracle_optimum(dist, Metric{id, rho}, levels);
      const double slack = k.lipschitz * oracle.spacing * static_cast<double>(dist.size());
      for (int T : {10, 100, 1000}) {
        CgConfig cg;
        cg.iterations = T;
        cg.record_trace = false;
        const auto r = idealized_cg(dist, sm, cg);
        const double achieved = eval_smoothed(sm, exact_conf(r.ensemble, dist));
        const double gap = oracle.optimum_value - achieved;
        const double bound = 8.0 * k.smoothness / (T + 2.0) + slack;
        ++checks;
        if (gap > bound) ++violations;
        worst_margin = std::max(worst_margin, gap - bound);
        worst_gap = std::max(worst_gap, gap);
      }
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 30.0,
          fmt("%d checks (3 instances x hmean/qmean/gmean x T in {10,100,1000}), %d violations, "
              "max gap %.3e, max(gap - bound) %.3e, %.2fs",
              checks, violations, worst_gap, worst_margin, secs)};
}

// Random interior feasible confusion: row i is pi_i times a floored Dirichlet draw.
ConfusionMatrix interior_conf(int n, std::mt19937_64& rng) {
  auto pi = dirichlet(n, rng);
  for (double& p : pi) p = 0.1 / n + 0.9 * p;
  ConfusionMatrix c(n);
  for (int i = 0; i < n; ++i) {
    const auto row = dirichlet(n, rng);
    for (int j = 0; j < n; ++j) c(i, j) = pi[i] * (0.05 / n + 0.95 * row[j]);
  }
  return c;
}

Outcome criterion4() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  double worst = 0.0;
  constexpr double h = 1e-6;
  for (MetricId id : {MetricId::HMean, MetricId::QMean, MetricId::GMean}) {
    for (double rho : {0.1, 0.01}) {
      const SmoothedMetric sm(id, rho);
      for (int n : {2, 4}) {
        for (int t = 0; t < 100; ++t) {
          const auto c = interior_conf(n, rng);
          const auto g = grad_smoothed(sm, c);
          double num = 0.0, den = 0.0;
          for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
              ConfusionMatrix up = c, dn = c;
              up(i, j) += h;
              dn(i, j) -= h;
              const double fd = (eval_smoothed(sm, up) - eval_smoothed(sm, dn)) / (2 * h);
              num = std::max(num, std::abs(g(i, j) - fd));
              den = std::max(den, std::abs(fd));
            }
          }
          worst = std::max(worst, num / den);
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-4 && secs < 10.0, fmt("1200 matrices, max relative error %.2e, %.2fs", worst, secs)};
}

Outcome criterion5() {
  // Fixed distribution: n = 3, K = 6, masses and eta_k from seeded Dirichlet draws.
  std::mt19937_64 rng(5);
  std::vector<double> masses = dirichlet(6, rng);
  std::vector<ClassDistribution> etas;
  for (int k = 0; k < 6; ++k) etas.push_back(dirichlet(3, rng));
  const auto dist = FiniteDistribution::one_hot(masses, etas);
  const double pi_min = dist.pi_min();

  std::string detail;
  int total_violations = 0;
  for (MetricId id : {MetricId::HMean, MetricId::QMean, MetricId::GMean}) {
    int violations = 0;
    double worst_ratio = 0.0;
    for (double rho : {0.1, 0.01}) {
      const SmoothedMetric sm(id, rho);
      const double theta = smoothing_constants(sm, pi_min, 3).theta;
      std::mt19937_64 draw(50 + static_cast<int>(id));
      std::uniform_int_distribution<int> label(0, 2);
      for (int s = 0; s < 1000; ++s) {
        std::vector<std::vector<double>> outputs;
        for (int k = 0; k < 6; ++k) {
          if (s % 3 == 0) {
            std::vector<double> v(3, 0.0);
            v[static_cast<std::size_t>(label(draw))] = 1.0;
            outputs.push_back(v);
          } else {
            outputs.push_back(dirichlet(3, draw));
          }
        }
        const ConfusionMatrix c(direct_conf(dist, outputs));
        const double diff = std::abs(eval_metric(id, c) - eval_smoothed(sm, c));
        if (diff > theta) ++violations;
        worst_ratio = std::max(worst_ratio, diff / theta);
      }
    }
    total_violations += violations;
    detail += fmt("%s %d violations (max |gap|/theta %.3f); ", std::string(metric_name(id)).c_str(), violations,
                  worst_ratio);
  }
  return {total_violations == 0, detail + fmt("pi_min %.4f", pi_min)};
}

Outcome criterion6() {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const int n = 2 + c % 2;
    const int K = 1 + c % 8;
    const auto dist = random_finite_distribution(n, K, rng);
    GainMatrix g(n);
    for (double& v : g.entries()) v = unit(rng);

    // All n^K deterministic labelings.
    double best = -1e300;
    std::vector<int> lab(static_cast<std::size_t>(K), 0);
    while (true) {
      double v = 0.0;
      for (int k = 0; k < K; ++k) {
        const auto& p = dist.point(static_cast<std::size_t>(k));
        for (int i = 0; i < n; ++i) v += p.mass * p.eta[i] * g(i, lab[static_cast<std::size_t>(k)]);
      }
      best = std::max(best, v);
      int pos = K - 1;
      while (pos >= 0 && ++lab[static_cast<std::size_t>(pos)] == n) lab[static_cast<std::size_t>(pos--)] = 0;
      if (pos < 0) break;
    }
    const double got = inner(g, exact_conf(exact_linear_max(g, dist), dist));
    worst = std::max(worst, std::abs(got - best));
  }
  return {worst <= 1e-12, fmt("20 cases, max |linear max - vertex max| %.2e", worst)};
}

Outcome criterion7() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    const int n = 2 + c % 3;
    const auto dist = random_finite_distribution(n, 3 + c % 5, rng);
    const auto eta = std::make_shared<const FiniteEtaOracle>(dist);
    const int parts = 2 + c % 4;
    std::vector<ClassifierRule> rules;
    for (int p = 0; p < parts; ++p) {
      if (p % 3 == 2) {
        rules.push_back(ClassifierRule::constant(dirichlet(n, rng)));
      } else if (n == 2 && p % 3 == 1) {
        rules.push_back(ClassifierRule::threshold(0.5 * (unit(rng) + 1.0), eta));
      } else {
        GainMatrix g(n);
        for (double& v : g.entries()) v = unit(rng);
        rules.push_back(ClassifierRule::weighted_argmax(g, eta));
      }
    }
    const auto w = dirichlet(parts, rng);
    Matrix mixed(n);
    for (int p = 0; p < parts; ++p) {
      const auto cp = exact_conf(rules[static_cast<std::size_t>(p)], dist);
      for (std::size_t e = 0; e < cp.entries().size(); ++e) mixed.entries()[e] += w[static_cast<std::size_t>(p)] * cp.entries()[e];
    }
    const auto got = exact_conf(ClassifierRule::mixture(w, rules), dist);
    worst = std::max(worst, max_abs(got, mixed));
  }
  return {worst <= 1e-12, fmt("50 cases, max entry difference %.2e", worst)};
}

Outcome criterion8() {
  const auto spec = GaussianMixtureSpec::default_spec();
  const auto sample = sample_from(spec, 400, 8);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> gauss(0.0, 2.0);
  double weight_err = 0.0, sum_err = 0.0, pred_err = 0.0;
  for (int T : {1, 2, 7, 50}) {
    CgConfig cg;
    cg.iterations = T;
    cg.seed = 8;
    cg.record_trace = false;
    const auto r = bayescg(sample, SmoothedMetric(MetricId::GMean, 0.05), cg);
    const auto& mix = std::get<MixtureRule>(r.ensemble.variant());
    if (mix.weights.size() != static_cast<std::size_t>(T) + 1) return {false, fmt("T=%d: %zu components", T, mix.weights.size())};
    double sum = 0.0;
    for (int j = 0; j <= T; ++j) {
      const double expect = 2.0 * j / (static_cast<double>(T) * (T + 1));
      weight_err = std::max(weight_err, std::abs(mix.weights[static_cast<std::size_t>(j)] - expect));
      sum += mix.weights[static_cast<std::size_t>(j)];
    }
    sum_err = std::max(sum_err, std::abs(sum - 1.0));

    for (int p = 0; p < 100; ++p) {
      const std::vector<double> x{gauss(rng), gauss(rng)};
      // h^0, then h^j = (1 - 2/(j+1)) h^{j-1} + 2/(j+1) u^j.
      auto h = mix.components[0].predict(x);
      for (int j = 1; j <= T; ++j) {
        const double gamma = 2.0 / (j + 1.0);
        const auto u = mix.components[static_cast<std::size_t>(j)].predict(x);
        for (std::size_t y = 0; y < h.size(); ++y) h[y] = (1.0 - gamma) * h[y] + gamma * u[y];
      }
      const auto flat = r.ensemble.predict(x);
      double l1 = 0.0;
      for (std::size_t y = 0; y < h.size(); ++y) l1 += std::abs(h[y] - flat[y]);
      pred_err = std::max(pred_err, l1);
    }
  }
  return {weight_err <= 1e-12 && sum_err <= 1e-12 && pred_err <= 1e-12,
          fmt("T in {1,2,7,50}: weight err %.1e, sum err %.1e, prediction l1 err %.1e", weight_err, sum_err,
              pred_err)};
}

Outcome criterion9() {
  const auto t0 = Clock::now();
  ExperimentConfig c;
  c.distribution = builtin_distribution("gaussian-default");
  c.metric = Metric{MetricId::QMean, std::nullopt};
  c.algorithm = Algorithm::BayesCg;
  c.sample_sizes = {500, 2000, 8000};
  for (std::uint64_t s = 1; s <= 10; ++s) c.seeds.push_back(s);
  c.rho_power = -0.25;
  c.t_cap = 1000;
  c.oracle.kind = OracleKind::LongRunCg;
  c.oracle.iterations = 3000;
  c.oracle.rho = 1e-3;
  const auto report = run_experiment(c);
  if (!report.oracle_value) return {false, "optimum estimate unavailable: " + report.oracle_note};

  std::vector<double> med_value, med_regret;
  for (std::size_t m : c.sample_sizes) {
    std::vector<double> v, r;
    for (const auto& rec : report.records) {
      if (rec.m != m) continue;
      v.push_back(rec.value);
      r.push_back(rec.regret.value_or(0.0));
    }
    med_value.push_back(median(v));
    med_regret.push_back(median(r));
  }
  const bool trend = med_value[0] <= med_value[1] && med_value[1] <= med_value[2];
  const double reduction = 1.0 - med_regret[2] / med_regret[0];
  const double secs = seconds_since(t0);
  return {trend && reduction >= 0.30 && secs < 300.0,
          fmt("median Q-mean %.5f / %.5f / %.5f, median regret %.2e -> %.2e (%.0f%% lower), %.0fs", med_value[0],
              med_value[1], med_value[2], med_regret[0], med_regret[2], 100.0 * reduction, secs)};
}

double min_gap(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  double g = 1.0;
  for (std::size_t i = 1; i < v.size(); ++i) g = std::min(g, v[i] - v[i - 1]);
  return g;
}

// Counts-based binary metrics, written independently of the library.
double reference_metric(MetricId id, std::span<const double> eta2, std::span<const int> y, double t) {
  double tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const bool pos = eta2[k] > t;
    if (y[k] == 1) (pos ? tp : fn) += 1;
    else (pos ? fp : tn) += 1;
  }
  const double m = static_cast<double>(y.size());
  switch (id) {
    case MetricId::Accuracy: return (tp + tn) / m;
    case MetricId::BinaryF1: return 2 * tp + fp + fn == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
    default: {
      const double tpr = tp + fn == 0 ? 0.0 : tp / (tp + fn);
      const double tnr = tn + fp == 0 ? 0.0 : tn / (tn + fp);
      return 0.5 * (tpr + tnr);
    }
  }
}

Outcome criterion10() {
  std::mt19937_64 rng(10);
  int matches = 0, total = 0;
  double ref_err = 0.0;
  std::string first_mismatch;
  for (int p = 0; p < 10; ++p) {
    // Finite support with eta_2 levels at least 1e-3 apart, so each gap holds a grid point.
    auto dist = random_finite_distribution(2, 8, rng);
    auto levels = [](const FiniteDistribution& d) {
      std::vector<double> v;
      for (const auto& pt : d.points()) v.push_back(pt.eta[1]);
      return v;
    };
    while (min_gap(levels(dist)) < 1e-3) dist = random_finite_distribution(2, 8, rng);
    const auto sample = sample_from(dist, 1000, 100 + p);
    const FiniteEtaOracle eta(dist);
    std::vector<double> eta2(sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k) eta2[k] = eta.predict(sample.x(k))[1];

    for (MetricId id : {MetricId::Accuracy, MetricId::BinaryF1, MetricId::AM}) {
      const Metric metric{id, std::nullopt};
      const double midpoint_best = best_threshold(eta2, sample.labels(), metric).second;
      double grid_best = -1.0;
      for (int i = 0; i <= 10000; ++i) {
        const double t = i / 10000.0;
        const double v = threshold_metric(eta2, sample.labels(), metric, t);
        grid_best = std::max(grid_best, v);
        if (i % 97 == 0) ref_err = std::max(ref_err, std::abs(v - reference_metric(id, eta2, sample.labels(), t)));
      }
      ++total;
      if (midpoint_best == grid_best) {
        ++matches;
      } else if (first_mismatch.empty()) {
        first_mismatch = fmt(" first mismatch: problem %d %s %.17g vs %.17g", p, std::string(metric_name(id)).c_str(),
                             midpoint_best, grid_best);
      }
    }
  }
  return {matches == total && ref_err <= 1e-12,
          fmt("%d/%d exact matches, metric vs counts reference %.1e", matches, total, ref_err) + first_mismatch};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"coin-flip worked example", criterion1},
      {"randomization beats determinism", criterion2},
      {"conditional gradient rate bound", criterion3},
      {"smoothed-metric gradients", criterion4},
      {"smoothing approximation bound", criterion5},
      {"linear-metric optimality", criterion6},
      {"mixture confusion law", criterion7},
      {"ensemble algebra", criterion8},
      {"consistency trend", criterion9},
      {"threshold search exactness", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] criterion %zu: %s | %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
