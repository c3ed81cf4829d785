#include "confopt/json_io.hpp"

#include <fstream>
#include <sstream>

#include "confopt/error.hpp"

namespace confopt {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(std::string("missing JSON field '") + key + "'");
  return j.at(key);
}

template <class T>
T get_as(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(std::string("JSON field '") + key + "' has the wrong type");
  }
}

Json scorer_to_json(const ScorerPtr& scorer) {
  if (const auto* m = dynamic_cast<const CpeModel*>(scorer.get())) return Json{{"cpe", cpe_to_json(*m)}};
  if (const auto* f = dynamic_cast<const FiniteEtaOracle*>(scorer.get())) {
    return Json{{"eta_oracle", {{"finite", distribution_to_json(f->distribution())}}}};
  }
  if (const auto* g = dynamic_cast<const GaussianEta*>(scorer.get())) {
    return Json{{"eta_oracle", {{"gaussian", gaussian_spec_to_json(g->spec())}}}};
  }
  throw Error("scorer type cannot be serialized");
}

class ScorerCache {
 public:
  ScorerPtr load(const Json& rule) {
    Json key;
    if (rule.contains("cpe")) {
      key = Json{{"cpe", rule.at("cpe")}};
    } else if (rule.contains("eta_oracle")) {
      key = Json{{"eta_oracle", rule.at("eta_oracle")}};
    } else {
      throw Error("plug-in rule needs a 'cpe' or 'eta_oracle' field");
    }
    const std::string text = key.dump();
    if (auto it = cache_.find(text); it != cache_.end()) return it->second;
    ScorerPtr s;
    if (key.contains("cpe")) {
      s = std::make_shared<const CpeModel>(cpe_from_json(key.at("cpe")));
    } else {
      const auto& eo = key.at("eta_oracle");
      if (eo.contains("finite")) {
        s = std::make_shared<const FiniteEtaOracle>(distribution_from_json(eo.at("finite")));
      } else if (eo.contains("gaussian")) {
        s = std::make_shared<const GaussianEta>(gaussian_spec_from_json(eo.at("gaussian")));
      } else {
        throw Error("eta_oracle needs a 'finite' or 'gaussian' distribution");
      }
    }
    cache_.emplace(text, s);
    return s;
  }

 private:
  std::map<std::string, ScorerPtr> cache_;
};

ClassifierRule load_rule(const Json& j, ScorerCache& cache) {
  const auto kind = get_as<std::string>(j, "kind");
  if (kind == "weighted_argmax") {
    return ClassifierRule::weighted_argmax(GainMatrix(matrix_from_json(field(j, "gain"))), cache.load(j));
  }
  if (kind == "binary_threshold") return ClassifierRule::threshold(get_as<double>(j, "t"), cache.load(j));
  if (kind == "constant") return ClassifierRule::constant(get_as<std::vector<double>>(j, "dist"));
  if (kind == "mixture") {
    const auto weights = get_as<std::vector<double>>(j, "weights");
    const auto& comps = field(j, "components");
    if (!comps.is_array()) throw Error("mixture components must be an array");
    std::vector<ClassifierRule> rules;
    rules.reserve(comps.size());
    for (const auto& c : comps) rules.push_back(load_rule(c, cache));
    return ClassifierRule::mixture(weights, std::move(rules));
  }
  throw Error("unknown rule kind '" + kind + "'");
}

Json simple_rule_to_json(const ClassifierRule& rule) {
  const auto& v = rule.variant();
  if (const auto* r = std::get_if<WeightedArgmaxRule>(&v)) {
    Json j{{"kind", "weighted_argmax"}, {"gain", matrix_to_json(r->gain)}};
    j.update(scorer_to_json(r->scorer));
    return j;
  }
  if (const auto* r = std::get_if<ThresholdRule>(&v)) {
    Json j{{"kind", "binary_threshold"}, {"t", r->threshold}};
    j.update(scorer_to_json(r->scorer));
    return j;
  }
  if (const auto* r = std::get_if<ConstantRule>(&v)) return Json{{"kind", "constant"}, {"dist", r->dist}};
  throw Error("nested mixture cannot be serialized");
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  return Json{{"n", m.n()}, {"entries", std::vector<double>(m.entries().begin(), m.entries().end())}};
}

Matrix matrix_from_json(const Json& j) { return Matrix(get_as<int>(j, "n"), get_as<std::vector<double>>(j, "entries")); }

Json cpe_to_json(const CpeModel& model) {
  return Json{{"n", model.num_classes()}, {"d", model.dim()}, {"weights", model.weights()}};
}

CpeModel cpe_from_json(const Json& j) {
  return CpeModel(get_as<int>(j, "n"), get_as<int>(j, "d"), get_as<std::vector<double>>(j, "weights"));
}

Json distribution_to_json(const FiniteDistribution& dist) {
  Json pts = Json::array();
  for (const auto& p : dist.points()) pts.push_back(Json{{"x", p.x}, {"q", p.mass}, {"eta", p.eta}});
  return Json{{"n", dist.n()}, {"d", dist.d()}, {"points", pts}};
}

FiniteDistribution distribution_from_json(const Json& j) {
  const auto& pts = field(j, "points");
  if (!pts.is_array()) throw Error("'points' must be an array");
  std::vector<SupportPoint> out;
  for (const auto& p : pts) {
    out.push_back(SupportPoint{get_as<std::vector<double>>(p, "x"), get_as<double>(p, "q"),
                               get_as<std::vector<double>>(p, "eta")});
  }
  return FiniteDistribution(get_as<int>(j, "n"), get_as<int>(j, "d"), std::move(out));
}

Json gaussian_spec_to_json(const GaussianMixtureSpec& spec) {
  return Json{{"n", spec.n},           {"d", spec.d},
              {"priors", spec.priors}, {"means", spec.means},
              {"covariances", spec.variances}, {"seed", spec.seed}};
}

GaussianMixtureSpec gaussian_spec_from_json(const Json& j) {
  GaussianMixtureSpec s;
  s.n = get_as<int>(j, "n");
  s.d = get_as<int>(j, "d");
  s.priors = get_as<std::vector<double>>(j, "priors");
  s.means = get_as<std::vector<std::vector<double>>>(j, "means");
  s.variances = get_as<std::vector<std::vector<double>>>(j, "covariances");
  if (j.contains("seed")) s.seed = get_as<std::uint64_t>(j, "seed");
  s.validate();
  return s;
}

Json rule_to_json(const ClassifierRule& rule, const std::optional<EnsembleMeta>& meta) {
  Json j;
  if (const auto* mix = std::get_if<MixtureRule>(&rule.variant())) {
    Json comps = Json::array();
    for (const auto& c : mix->components) comps.push_back(simple_rule_to_json(c));
    j = Json{{"kind", "mixture"}, {"weights", mix->weights}, {"components", std::move(comps)}};
  } else {
    j = simple_rule_to_json(rule);
  }
  if (meta) {
    j["meta"] = Json{{"T", meta->T}, {"rho", meta->rho}, {"metric", meta->metric}, {"seed", meta->seed}};
  }
  return j;
}

ClassifierRule rule_from_json(const Json& j) {
  ScorerCache cache;
  return load_rule(j, cache);
}

std::optional<EnsembleMeta> ensemble_meta_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("meta")) return std::nullopt;
  const auto& m = j.at("meta");
  return EnsembleMeta{get_as<int>(m, "T"), get_as<double>(m, "rho"), get_as<std::string>(m, "metric"),
                      get_as<std::uint64_t>(m, "seed")};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

}  // namespace confopt
