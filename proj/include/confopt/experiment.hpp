#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "confopt/cg.hpp"
#include "confopt/cpe.hpp"
#include "confopt/distribution.hpp"
#include "confopt/json_io.hpp"
#include "confopt/metrics.hpp"
#include "confopt/plugin.hpp"
#include "confopt/rule.hpp"
#include "confopt/synth.hpp"

namespace confopt {

enum class Algorithm { BinaryPlugin, BrutePlugin, BayesCg, IdealizedCg };

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

/// rho used when a CG learner is given an unsmoothed metric name: 0.05 for gmean, 0.01 otherwise.
double default_rho(MetricId id);

/// Throws Error before any work when the algorithm cannot handle the metric or class count.
void check_compatibility(Algorithm algorithm, const Metric& metric, int n);

/// Settings shared by the dataset-driven learners.
struct LearnerConfig {
  Algorithm algorithm = Algorithm::BayesCg;
  Metric metric;
  double alpha = 0.5;
  int iterations = 0;  // CG: T, or min(kappa m, t_cap) when 0
  int kappa = 1;
  int t_cap = 5000;
  GainGridConfig grid;
  ScorerSource scorer;  // CPE settings, or a fixed exact-eta scorer
  std::uint64_t seed = 0;
  bool record_trace = false;
};

struct TrainedRule {
  ClassifierRule rule;
  ScorerPtr scorer;
  Metric metric;             // what was optimised, with rho resolved for CG learners
  double tune_value = 0.0;   // that metric on the tuning split S''
  int iterations = 0;        // CG iterations, 0 for plug-ins
  std::vector<CgTraceRecord> trace;
};

/// binary-plugin, brute-plugin or bayescg on a labelled sample.
TrainedRule train_rule(const LabeledSample& sample, const LearnerConfig& config);

/// Where samples come from.
struct DistributionSource {
  std::optional<FiniteDistribution> finite;
  std::optional<GaussianMixtureSpec> gaussian;

  int n() const;
  int d() const;
  LabeledSample sample(std::size_t m, std::uint64_t seed) const;
  ScorerPtr exact_eta() const;
};

/// Built-in names: "coin-flip" (one point, eta = [1/2, 1/2]) and "gaussian-default".
DistributionSource builtin_distribution(std::string_view name);

/// A built-in name, a JSON file path (relative paths resolved against `base_dir`), or an
/// inline object: a finite distribution ("points") or a Gaussian spec ("priors").
DistributionSource distribution_from_config(const Json& j, const std::filesystem::path& base_dir = {});

enum class OracleKind { Auto, Grid, Vertex, LongRunCg, None };

struct OracleSettings {
  OracleKind kind = OracleKind::Auto;  // grid for finite support, long-run CG for Gaussians
  int levels = 101;
  int iterations = 3000;  // long-run CG
  double rho = 1e-3;      // long-run CG
};

struct ExperimentConfig {
  DistributionSource distribution;
  Metric metric;
  Algorithm algorithm = Algorithm::BayesCg;
  std::vector<std::size_t> sample_sizes;
  std::vector<std::uint64_t> seeds;
  double alpha = 0.5;
  int iterations = 0;
  int kappa = 1;
  int t_cap = 5000;
  std::optional<double> rho_power;  // CG rho = m^rho_power, overriding the metric's rho
  GainGridConfig grid;
  CpeTrainConfig cpe;
  bool eta_oracle_scorer = false;  // use the exact eta instead of training a CPE model
  OracleSettings oracle;
  std::size_t heldout_size = 100000;
  std::uint64_t heldout_seed = 20231;
  bool traces = false;
  std::filesystem::path output_dir = "experiment_out";

  void validate() const;
};

/// Parses the JSON config; "distribution" is read with distribution_from_config.
ExperimentConfig experiment_config_from_json(const Json& j, const std::filesystem::path& base_dir = {});

struct RunRecord {
  std::size_t m = 0;
  std::uint64_t seed = 0;
  double rho = 0.0;  // 0 when the learner used no smoothing
  int iterations = 0;
  double train_value = 0.0;  // metric on the full drawn sample
  double value = 0.0;        // exact (finite support) or held-out estimate
  std::optional<double> regret;
  bool regret_truncated = false;
  double wall_ms = 0.0;
  std::string trace_path;
};

struct RunReport {
  std::string algorithm;
  std::string metric;  // base metric every value column is measured in
  std::string value_kind;  // "exact" or "heldout-estimate"
  std::string oracle_method;  // grid / exhaustive-vertex / long-run-cg / oracle:skipped
  std::optional<double> oracle_value;
  std::string oracle_note;
  std::vector<RunRecord> records;  // sorted by (m, seed)
};

/// Runs every (m, seed) pair. Trace CSVs go under output_dir/traces when requested.
RunReport run_experiment(const ExperimentConfig& config);

/// CSV text. With `timestamp` the first line is a "# generated ..." comment and wall_ms is
/// filled in; without it the output depends only on the config.
std::string format_report(const RunReport& report, bool timestamp);

}  // namespace confopt
