// confopt command-line tool: train, eval, experiment, gradcheck, oracle, synth.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "confopt/confusion.hpp"
#include "confopt/dataset_io.hpp"
#include "confopt/error.hpp"
#include "confopt/experiment.hpp"
#include "confopt/format.hpp"
#include "confopt/gradcheck.hpp"
#include "confopt/json_io.hpp"
#include "confopt/oracle.hpp"

namespace {

using namespace confopt;

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

ScorerPtr first_scorer(const ClassifierRule& rule) {
  const auto& v = rule.variant();
  if (const auto* r = std::get_if<WeightedArgmaxRule>(&v)) return r->scorer;
  if (const auto* r = std::get_if<ThresholdRule>(&v)) return r->scorer;
  if (const auto* r = std::get_if<MixtureRule>(&v)) {
    for (const auto& c : r->components) {
      if (auto s = first_scorer(c)) return s;
    }
  }
  return nullptr;
}

Json matrix_rows(const Matrix& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.n(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.n(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

struct TrainArgs {
  std::string algo = "bayescg";
  std::string metric;
  std::string data;
  std::string out;
  std::optional<int> classes;
  double alpha = 0.5;
  int iterations = 0;
  int kappa = 1;
  int t_cap = 5000;
  std::uint64_t seed = 0;
  int grid_levels = 5;
  std::size_t max_candidates = 20000;
  double l2 = CpeTrainConfig{}.l2_penalty;
  bool standardize = false;
  std::string trace;
};

int cmd_train(const TrainArgs& a) {
  LearnerConfig lc;
  lc.algorithm = parse_algorithm(a.algo);
  lc.metric = Metric::parse(a.metric);
  const auto sample = read_dataset_csv(a.data, a.classes);
  check_compatibility(lc.algorithm, lc.metric, sample.n());
  lc.alpha = a.alpha;
  lc.iterations = a.iterations;
  lc.kappa = a.kappa;
  lc.t_cap = a.t_cap;
  lc.seed = a.seed;
  lc.grid = GainGridConfig{a.grid_levels, a.max_candidates, a.seed};
  lc.scorer.cpe.l2_penalty = a.l2;
  lc.scorer.cpe.standardize = a.standardize;
  lc.record_trace = !a.trace.empty();

  const auto trained = train_rule(sample, lc);
  std::optional<EnsembleMeta> meta;
  if (trained.iterations > 0) {
    meta = EnsembleMeta{trained.iterations, trained.metric.rho.value_or(0.0), trained.metric.to_string(), a.seed};
  }
  write_text_file(a.out, rule_to_json(trained.rule, meta).dump(2) + "\n");
  if (!a.trace.empty()) {
    std::ostringstream t;
    t << "iter,objective,grad_linf\n";
    for (const auto& r : trained.trace) t << r.iter << ',' << format_double(r.objective) << ',' << format_double(r.grad_linf) << '\n';
    write_text_file(a.trace, t.str());
  }
  std::cout << "algorithm=" << a.algo << " metric=" << trained.metric.to_string() << " n=" << sample.n()
            << " m=" << sample.size() << " tune_value=" << format_double(trained.tune_value) << " out=" << a.out
            << '\n';
  return kExitOk;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, const std::vector<std::string>& metrics) {
  const auto rule = rule_from_json(read_json_file(model_path));
  auto sample = read_dataset_csv(data_path);
  const int n = rule.num_classes();
  if (sample.n() > n) {
    throw Error("dataset has labels up to " + std::to_string(sample.n()) + " but the model has n=" + std::to_string(n));
  }
  if (sample.n() < n) sample = LabeledSample(n, sample.d(), sample.features(), sample.labels());
  if (const auto s = first_scorer(rule); s && s->dim() != sample.d()) {
    throw Error("dataset has d=" + std::to_string(sample.d()) + " features but the model expects d=" +
                std::to_string(s->dim()));
  }
  const auto conf = empirical_conf(rule, sample);

  std::vector<Metric> wanted;
  if (metrics.empty()) {
    for (MetricId id : kAllMetrics) {
      if (!is_binary_only(id) || n == 2) wanted.push_back(Metric{id, std::nullopt});
    }
  } else {
    for (const auto& m : metrics) wanted.push_back(Metric::parse(m));
  }
  Json values = Json::object();
  for (const auto& m : wanted) {
    try {
      values[m.to_string()] = evaluate(m, conf);
    } catch (const Error&) {
      values[m.to_string()] = nullptr;
    }
  }
  Json out{{"n", n}, {"m", sample.size()}, {"confusion", matrix_rows(conf)}, {"metrics", values}};
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir, bool no_timestamp) {
  const std::filesystem::path path(config_path);
  auto config = experiment_config_from_json(read_json_file(path), path.parent_path());
  if (!out_dir.empty()) config.output_dir = out_dir;
  std::filesystem::create_directories(config.output_dir);
  const auto report = run_experiment(config);
  const auto report_path = config.output_dir / "report.csv";
  write_text_file(report_path, format_report(report, !no_timestamp));
  std::cout << "wrote " << report_path.string() << " (" << report.records.size() << " runs, oracle "
            << report.oracle_method << ")\n";
  return kExitOk;
}

int cmd_gradcheck(const GradcheckConfig& config) {
  const auto rows = run_gradcheck(config);
  std::cout << format_gradcheck(rows, config.tolerance);
  for (const auto& r : rows) {
    if (!r.pass) return kExitVerify;
  }
  return kExitOk;
}

int cmd_oracle(const std::string& dist_arg, const std::string& metric_text, const std::string& method, int levels) {
  const auto src = distribution_from_config(Json(dist_arg));
  if (!src.finite) throw Error("oracles need a finite-support distribution");
  const auto metric = Metric::parse(metric_text);
  OracleResult r;
  if (method == "grid") {
    r = grid_oracle_optimum(*src.finite, metric, levels);
  } else if (method == "vertex") {
    r = vertex_oracle_optimum(*src.finite, metric);
  } else {
    throw Error("unknown oracle method '" + method + "' (expected grid or vertex)");
  }
  Json out{{"method", std::string(oracle_method_name(r.method))},
           {"metric", metric.to_string()},
           {"optimum_value", r.optimum_value},
           {"confusion", matrix_rows(r.optimum_conf)},
           {"search_size", r.search_size}};
  if (r.method == OracleMethod::Grid) {
    out["levels"] = r.levels;
    out["spacing"] = r.spacing;
  }
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

int cmd_synth(const std::string& dist_arg, std::size_t m, std::uint64_t seed, const std::string& out) {
  if (m < 1) throw Error("--m must be at least 1");
  const auto src = distribution_from_config(Json(dist_arg));
  write_dataset_csv(out, src.sample(m, seed));
  std::cout << "wrote " << m << " rows (n=" << src.n() << ", d=" << src.d() << ") to " << out << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learning with non-decomposable confusion-matrix metrics"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Fit a classifier to a labelled CSV and write it as JSON");
  t->add_option("--algo", train.algo, "binary-plugin, brute-plugin or bayescg")->capture_default_str();
  t->add_option("--metric", train.metric, "Metric, e.g. hmean or gmean:rho=0.05")->required();
  t->add_option("--data", train.data, "CSV with header f1,...,fd,label")->required();
  t->add_option("--out", train.out, "Output model JSON")->required();
  t->add_option("--classes", train.classes, "Number of classes (default: largest label)");
  t->add_option("--alpha", train.alpha, "Fraction of rows used for tuning")->capture_default_str();
  t->add_option("--iterations", train.iterations, "CG iterations T (0: min(kappa m, t-cap))")->capture_default_str();
  t->add_option("--kappa", train.kappa)->capture_default_str();
  t->add_option("--t-cap", train.t_cap)->capture_default_str();
  t->add_option("--seed", train.seed)->capture_default_str();
  t->add_option("--grid-levels", train.grid_levels, "brute-plugin: levels per gain entry")->capture_default_str();
  t->add_option("--max-candidates", train.max_candidates, "brute-plugin: gain candidates")->capture_default_str();
  t->add_option("--l2", train.l2, "CPE L2 penalty")->capture_default_str();
  t->add_flag("--standardize", train.standardize, "Standardize features for CPE fitting");
  t->add_option("--trace", train.trace, "Write the CG trace CSV here");

  std::string eval_model, eval_data;
  std::vector<std::string> eval_metrics;
  auto* e = app.add_subcommand("eval", "Print the confusion matrix and metrics of a model on a CSV");
  e->add_option("--model", eval_model)->required();
  e->add_option("--data", eval_data)->required();
  e->add_option("--metric", eval_metrics, "Metrics to report (default: all valid for n)");

  std::string exp_config, exp_out;
  bool no_timestamp = false;
  auto* x = app.add_subcommand("experiment", "Run an experiment config and write report.csv");
  x->add_option("--config", exp_config)->required();
  x->add_option("--out", exp_out, "Output directory (overrides the config)");
  x->add_flag("--no-timestamp", no_timestamp, "Omit the timestamp line and wall times");

  GradcheckConfig gc;
  auto* g = app.add_subcommand("gradcheck", "Finite-difference check of the smoothed-metric gradients");
  g->add_option("--cases", gc.cases)->capture_default_str();
  g->add_option("--seed", gc.seed)->capture_default_str();
  g->add_option("--tolerance", gc.tolerance)->capture_default_str();
  g->add_flag("--inject-sign-flip", gc.inject_sign_flip)->group("");

  std::string oracle_dist, oracle_metric, oracle_method = "grid";
  int oracle_levels = 101;
  auto* o = app.add_subcommand("oracle", "Brute-force optimum over a finite distribution");
  o->add_option("--dist", oracle_dist, "coin-flip or a finite distribution JSON file")->required();
  o->add_option("--metric", oracle_metric)->required();
  o->add_option("--method", oracle_method, "grid or vertex")->capture_default_str();
  o->add_option("--levels", oracle_levels)->capture_default_str();

  std::string synth_dist, synth_out;
  std::size_t synth_m = 1000;
  std::uint64_t synth_seed = 0;
  auto* s = app.add_subcommand("synth", "Sample a labelled CSV from a synthetic distribution");
  s->add_option("--dist", synth_dist, "coin-flip, gaussian-default or a distribution JSON file")->required();
  s->add_option("--m", synth_m)->capture_default_str();
  s->add_option("--seed", synth_seed)->capture_default_str();
  s->add_option("--out", synth_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (t->parsed()) return cmd_train(train);
    if (e->parsed()) return cmd_eval(eval_model, eval_data, eval_metrics);
    if (x->parsed()) return cmd_experiment(exp_config, exp_out, no_timestamp);
    if (g->parsed()) return cmd_gradcheck(gc);
    if (o->parsed()) return cmd_oracle(oracle_dist, oracle_metric, oracle_method, oracle_levels);
    if (s->parsed()) return cmd_synth(synth_dist, synth_m, synth_seed, synth_out);
  } catch (const IoError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitIo;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
