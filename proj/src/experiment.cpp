#include "confopt/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include "confopt/confusion.hpp"
#include "confopt/error.hpp"
#include "confopt/format.hpp"
#include "confopt/oracle.hpp"

namespace confopt {

namespace {

bool uses_cg(Algorithm a) { return a == Algorithm::BayesCg || a == Algorithm::IdealizedCg; }

Metric resolve_cg_metric(const Metric& metric, std::optional<double> rho_override) {
  Metric out = metric;
  if (rho_override) {
    out.rho = *rho_override;
  } else if (!out.rho) {
    out.rho = default_rho(metric.id);
  }
  (void)out.as_smoothed();
  return out;
}

CgConfig cg_config(const LearnerConfig& c) {
  CgConfig cg;
  cg.iterations = c.iterations;
  cg.kappa = c.kappa;
  cg.t_cap = c.t_cap;
  cg.alpha = c.alpha;
  cg.seed = c.seed;
  cg.record_trace = c.record_trace;
  return cg;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(std::string("config field '") + key + "' has the wrong type");
  }
}

OracleKind parse_oracle_kind(const std::string& s) {
  if (s == "auto") return OracleKind::Auto;
  if (s == "grid") return OracleKind::Grid;
  if (s == "vertex") return OracleKind::Vertex;
  if (s == "long-run-cg") return OracleKind::LongRunCg;
  if (s == "none") return OracleKind::None;
  throw Error("unknown oracle kind '" + s + "'");
}

std::string optional_number(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Held-out points: features drawn from the distribution, label mass eta(x_k)/m.
ScoredPoints heldout_points(const DistributionSource& src, std::size_t size, std::uint64_t seed) {
  const auto draw = src.sample(size, seed);
  const auto eta = src.exact_eta();
  return score_points_with_eta(draw.features(), draw.d(), *eta, eta);
}

ScoredPoints rescore(const ScoredPoints& base, ScorerPtr scorer) {
  ScoredPoints p = base;
  p.scorer = scorer;
  for (std::size_t k = 0; k < p.size(); ++k) {
    scorer->predict_into(p.x(k), std::span<double>(p.scores.data() + k * static_cast<std::size_t>(p.n),
                                                   static_cast<std::size_t>(p.n)));
  }
  return p;
}

void write_trace(const std::filesystem::path& path, const std::vector<CgTraceRecord>& trace) {
  std::ostringstream out;
  out << "iter,objective,grad_linf\n";
  for (const auto& r : trace) out << r.iter << ',' << format_double(r.objective) << ',' << format_double(r.grad_linf) << '\n';
  write_text_file(path, out.str());
}

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::BinaryPlugin: return "binary-plugin";
    case Algorithm::BrutePlugin: return "brute-plugin";
    case Algorithm::BayesCg: return "bayescg";
    case Algorithm::IdealizedCg: return "idealized-cg";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::BinaryPlugin, Algorithm::BrutePlugin, Algorithm::BayesCg, Algorithm::IdealizedCg}) {
    if (algorithm_name(a) == name) return a;
  }
  throw Error("unknown algorithm '" + std::string(name) +
              "' (expected binary-plugin, brute-plugin, bayescg or idealized-cg)");
}

double default_rho(MetricId id) { return id == MetricId::GMean ? 0.05 : 0.01; }

void check_compatibility(Algorithm algorithm, const Metric& metric, int n) {
  if (algorithm == Algorithm::BinaryPlugin && n != 2) {
    throw Error("binary-plugin requires n=2, got n=" + std::to_string(n));
  }
  if (is_binary_only(metric.id) && n != 2) {
    throw Error("metric '" + std::string(metric_name(metric.id)) + "' requires n=2, got n=" + std::to_string(n));
  }
  if (uses_cg(algorithm) && !has_smoothed_form(metric.id)) {
    throw Error(std::string(algorithm_name(algorithm)) + " needs hmean, qmean or gmean, got '" +
                std::string(metric_name(metric.id)) + "'");
  }
  if (metric.rho && !has_smoothed_form(metric.id)) throw Error("metric '" + metric.to_string() + "' cannot be smoothed");
}

TrainedRule train_rule(const LabeledSample& sample, const LearnerConfig& config) {
  check_compatibility(config.algorithm, config.metric, sample.n());
  const SplitConfig split{config.alpha, config.seed};
  switch (config.algorithm) {
    case Algorithm::BinaryPlugin: {
      auto r = binary_threshold_plugin(sample, config.metric, split, config.scorer);
      auto scorer = std::get<ThresholdRule>(r.rule.variant()).scorer;
      return TrainedRule{std::move(r.rule), std::move(scorer), config.metric, r.tune_value, 0, {}};
    }
    case Algorithm::BrutePlugin: {
      auto r = brute_force_plugin(sample, config.metric, split, config.grid, config.scorer);
      auto scorer = std::get<WeightedArgmaxRule>(r.rule.variant()).scorer;
      return TrainedRule{std::move(r.rule), std::move(scorer), config.metric, r.tune_value, 0, {}};
    }
    case Algorithm::BayesCg: {
      const Metric metric = resolve_cg_metric(config.metric, std::nullopt);
      auto r = bayescg(sample, metric.as_smoothed(), cg_config(config), config.scorer);
      const auto& mix = std::get<MixtureRule>(r.ensemble.variant());
      ScorerPtr scorer = std::get<WeightedArgmaxRule>(mix.components.back().variant()).scorer;
      const double tune = eval_smoothed(metric.as_smoothed(), r.final_conf);
      return TrainedRule{std::move(r.ensemble), std::move(scorer), metric, tune, r.iterations, std::move(r.trace)};
    }
    case Algorithm::IdealizedCg:
      throw Error("idealized-cg runs on a finite distribution, not a dataset; use it from an experiment config");
  }
  throw Error("unknown algorithm");
}

int DistributionSource::n() const { return finite ? finite->n() : gaussian->n; }
int DistributionSource::d() const { return finite ? finite->d() : gaussian->d; }

LabeledSample DistributionSource::sample(std::size_t m, std::uint64_t seed) const {
  if (finite) return sample_from(*finite, m, seed);
  return sample_from(*gaussian, m, seed);
}

ScorerPtr DistributionSource::exact_eta() const {
  if (finite) return std::make_shared<const FiniteEtaOracle>(*finite);
  return std::make_shared<const GaussianEta>(*gaussian);
}

DistributionSource distribution_from_config(const Json& j, const std::filesystem::path& base_dir) {
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    if (text == "coin-flip" || text == "gaussian-default") return builtin_distribution(text);
    auto path = std::filesystem::path(text);
    if (path.is_relative()) path = base_dir / path;
    return distribution_from_config(read_json_file(path), base_dir);
  }
  if (!j.is_object()) throw Error("'distribution' must be a name, a path or an object");
  DistributionSource src;
  if (j.contains("points")) {
    src.finite = distribution_from_json(j);
  } else if (j.contains("priors")) {
    src.gaussian = gaussian_spec_from_json(j);
  } else {
    throw Error("'distribution' object needs 'points' (finite) or 'priors' (Gaussian)");
  }
  return src;
}

DistributionSource builtin_distribution(std::string_view name) {
  DistributionSource src;
  if (name == "coin-flip") {
    src.finite = FiniteDistribution::one_hot({1.0}, {{0.5, 0.5}});
  } else if (name == "gaussian-default") {
    src.gaussian = GaussianMixtureSpec::default_spec();
  } else {
    throw Error("unknown built-in distribution '" + std::string(name) + "'");
  }
  return src;
}

void ExperimentConfig::validate() const {
  if (!distribution.finite && !distribution.gaussian) throw Error("experiment needs a distribution");
  if (sample_sizes.empty()) throw Error("experiment needs at least one sample size");
  if (seeds.empty()) throw Error("experiment needs at least one seed");
  for (auto m : sample_sizes) {
    if (m < 2) throw Error("sample sizes must be at least 2");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  if (iterations < 0 || kappa < 1 || t_cap < 1) throw Error("iterations must be >= 0, kappa and t_cap >= 1");
  check_compatibility(algorithm, metric, distribution.n());
  if (algorithm == Algorithm::IdealizedCg && !distribution.finite) {
    throw Error("idealized-cg needs a finite-support distribution");
  }
  if (rho_power && !(*rho_power < 0.0)) throw Error("rho_power must be negative so that rho shrinks with m");
  if (distribution.gaussian && heldout_size < 1) throw Error("held-out size must be positive");
  if (oracle.kind == OracleKind::Grid && oracle.levels < 2) throw Error("oracle levels must be at least 2");
  if (oracle.kind == OracleKind::LongRunCg && !(oracle.iterations >= 1 && oracle.rho > 0.0)) {
    throw Error("long-run CG oracle needs iterations >= 1 and rho > 0");
  }
  cpe.validate();
}

ExperimentConfig experiment_config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error("experiment config must be a JSON object");
  ExperimentConfig c;
  if (!j.contains("distribution")) throw Error("config needs 'distribution'");
  c.distribution = distribution_from_config(j.at("distribution"), base_dir);
  if (!j.contains("metric") || !j.contains("algorithm")) throw Error("config needs 'metric' and 'algorithm'");
  c.metric = Metric::parse(get_or<std::string>(j, "metric", ""));
  c.algorithm = parse_algorithm(get_or<std::string>(j, "algorithm", ""));
  c.sample_sizes = get_or<std::vector<std::size_t>>(j, "sample_sizes", {});
  c.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", {});
  c.alpha = get_or(j, "alpha", c.alpha);
  c.iterations = get_or(j, "iterations", c.iterations);
  c.kappa = get_or(j, "kappa", c.kappa);
  c.t_cap = get_or(j, "t_cap", c.t_cap);
  if (j.contains("rho_power") && !j.at("rho_power").is_null()) c.rho_power = get_or(j, "rho_power", 0.0);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    c.grid.per_entry_levels = get_or(g, "per_entry_levels", c.grid.per_entry_levels);
    c.grid.max_candidates = get_or(g, "max_candidates", c.grid.max_candidates);
    c.grid.seed = get_or(g, "seed", c.grid.seed);
  }
  if (j.contains("cpe")) {
    const auto& p = j.at("cpe");
    c.cpe.l2_penalty = get_or(p, "l2_penalty", c.cpe.l2_penalty);
    c.cpe.max_iters = get_or(p, "max_iters", c.cpe.max_iters);
    c.cpe.grad_tol = get_or(p, "grad_tol", c.cpe.grad_tol);
    c.cpe.standardize = get_or(p, "standardize", c.cpe.standardize);
  }
  const auto scorer = get_or<std::string>(j, "scorer", "cpe");
  if (scorer != "cpe" && scorer != "eta-oracle") throw Error("'scorer' must be 'cpe' or 'eta-oracle'");
  c.eta_oracle_scorer = scorer == "eta-oracle";
  if (j.contains("oracle")) {
    const auto& o = j.at("oracle");
    c.oracle.kind = parse_oracle_kind(get_or<std::string>(o, "kind", "auto"));
    c.oracle.levels = get_or(o, "levels", c.oracle.levels);
    c.oracle.iterations = get_or(o, "iterations", c.oracle.iterations);
    c.oracle.rho = get_or(o, "rho", c.oracle.rho);
  }
  c.heldout_size = get_or(j, "heldout_size", c.heldout_size);
  c.heldout_seed = get_or(j, "heldout_seed", c.heldout_seed);
  c.traces = get_or(j, "traces", c.traces);
  c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir.string());
  if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = (base_dir / c.output_dir).lexically_normal();
  c.validate();
  return c;
}

RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto& src = config.distribution;
  const MetricId base = config.metric.id;
  RunReport report;
  report.algorithm = std::string(algorithm_name(config.algorithm));
  report.metric = std::string(metric_name(base));
  report.value_kind = src.finite ? "exact" : "heldout-estimate";

  std::optional<ScoredPoints> heldout;
  if (src.gaussian) heldout = heldout_points(src, config.heldout_size, config.heldout_seed);

  // Oracle: once per experiment, independent of (m, seed).
  OracleKind kind = config.oracle.kind;
  if (kind == OracleKind::Auto) kind = src.finite ? OracleKind::Grid : OracleKind::LongRunCg;
  report.oracle_method = "oracle:skipped";
  try {
    if (kind == OracleKind::Grid || kind == OracleKind::Vertex) {
      if (!src.finite) throw Error("grid and vertex oracles need a finite-support distribution");
      const Metric plain{base, std::nullopt};
      const auto r = kind == OracleKind::Grid ? grid_oracle_optimum(*src.finite, plain, config.oracle.levels)
                                              : vertex_oracle_optimum(*src.finite, plain);
      report.oracle_value = r.optimum_value;
      report.oracle_method = std::string(oracle_method_name(r.method));
    } else if (kind == OracleKind::LongRunCg) {
      if (!has_smoothed_form(base)) throw Error("long-run CG oracle needs hmean, qmean or gmean");
      const ScoredPoints pts = heldout ? *heldout : score_distribution(*src.finite, src.exact_eta());
      CgConfig cg;
      cg.record_trace = false;
      const auto r = conditional_gradient(pts, SmoothedMetric(base, config.oracle.rho), config.oracle.iterations, cg);
      report.oracle_value = eval_metric(base, r.final_conf);
      report.oracle_method = std::string(oracle_method_name(OracleMethod::LongRunCg));
    } else {
      report.oracle_note = "no oracle requested";
    }
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    report.oracle_value.reset();
    report.oracle_method = "oracle:skipped";
    report.oracle_note = e.what();
  }

  auto sizes = config.sample_sizes;
  auto seeds = config.seeds;
  std::stable_sort(sizes.begin(), sizes.end());
  std::stable_sort(seeds.begin(), seeds.end());
  if (config.traces) std::filesystem::create_directories(config.output_dir / "traces");

  for (std::size_t m : sizes) {
    for (std::uint64_t seed : seeds) {
      const auto start = std::chrono::steady_clock::now();
      const auto sample = src.sample(m, seed);
      std::optional<double> rho_override;
      if (config.rho_power) rho_override = std::pow(static_cast<double>(m), *config.rho_power);

      LearnerConfig lc;
      lc.algorithm = config.algorithm;
      lc.metric = config.metric;
      if (rho_override && uses_cg(config.algorithm)) lc.metric.rho = *rho_override;
      lc.alpha = config.alpha;
      lc.iterations = config.iterations;
      lc.kappa = config.kappa;
      lc.t_cap = config.t_cap;
      lc.grid = config.grid;
      lc.scorer.cpe = config.cpe;
      if (config.eta_oracle_scorer) lc.scorer.fixed = src.exact_eta();
      lc.seed = seed;
      lc.record_trace = config.traces;

      RunRecord rec;
      rec.m = m;
      rec.seed = seed;
      std::optional<ClassifierRule> rule;
      ScorerPtr scorer;
      std::vector<CgTraceRecord> trace;
      if (config.algorithm == Algorithm::IdealizedCg) {
        const Metric metric = resolve_cg_metric(lc.metric, std::nullopt);
        CgConfig cg;
        cg.iterations = config.iterations;
        cg.kappa = config.kappa;
        cg.t_cap = config.t_cap;
        cg.seed = seed;
        cg.record_trace = config.traces;
        // T is resolved against m as if a sample had been drawn.
        cg.iterations = cg.resolve_iterations(m);
        auto r = idealized_cg(*src.finite, metric.as_smoothed(), cg);
        rec.rho = *metric.rho;
        rec.iterations = r.iterations;
        rule = std::move(r.ensemble);
        trace = std::move(r.trace);
      } else {
        auto t = train_rule(sample, lc);
        rec.rho = t.metric.rho.value_or(0.0);
        rec.iterations = t.iterations;
        rule = std::move(t.rule);
        scorer = std::move(t.scorer);
        trace = std::move(t.trace);
      }

      rec.train_value = eval_metric(base, empirical_conf(*rule, sample));
      if (src.finite) {
        rec.value = eval_metric(base, exact_conf(*rule, *src.finite));
      } else {
        const ScoredPoints pts = scorer ? rescore(*heldout, scorer) : *heldout;
        rec.value = eval_metric(base, conf_on_points(*rule, pts));
      }
      if (report.oracle_value) {
        const auto r = regret(*report.oracle_value, rec.value);
        rec.regret = r.value;
        rec.regret_truncated = r.truncated;
      }
      if (config.traces && !trace.empty()) {
        const auto path = config.output_dir / "traces" /
                          ("trace_m" + std::to_string(m) + "_seed" + std::to_string(seed) + ".csv");
        write_trace(path, trace);
        rec.trace_path = path.string();
      }
      rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      report.records.push_back(std::move(rec));
    }
  }
  return report;
}

std::string format_report(const RunReport& report, bool timestamp) {
  std::ostringstream out;
  if (timestamp) out << "# generated " << iso_timestamp() << '\n';
  out << "# algorithm=" << report.algorithm << " metric=" << report.metric << " value=" << report.value_kind
      << " oracle=" << report.oracle_method;
  if (report.oracle_value) out << " oracle_value=" << format_double(*report.oracle_value);
  if (!report.oracle_note.empty()) out << " note=\"" << report.oracle_note << '"';
  out << '\n';
  out << "m,seed,algorithm,metric,rho,iterations,train_value,value,value_kind,oracle_value,oracle_method,regret,"
         "regret_truncated,wall_ms,trace_path\n";
  for (const auto& r : report.records) {
    out << r.m << ',' << r.seed << ',' << report.algorithm << ',' << report.metric << ',' << format_double(r.rho)
        << ',' << r.iterations << ',' << format_double(r.train_value) << ',' << format_double(r.value) << ','
        << report.value_kind << ',' << optional_number(report.oracle_value) << ',' << report.oracle_method << ','
        << optional_number(r.regret) << ',' << (r.regret_truncated ? "yes" : "no") << ','
        << (timestamp ? format_double(std::round(r.wall_ms * 1000.0) / 1000.0) : std::string("-")) << ','
        << r.trace_path << '\n';
  }
  return out.str();
}

}  // namespace confopt
