#include "simmatch/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simmatch/errors.hpp"

namespace simmatch {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidInput("config: '" + where + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw InvalidInput("config: unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput("config: bad value for " + where + "." + key + ": " + e.what());
  }
}

template <typename T>
T require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw InvalidInput("config: missing key " + where + "." + key);
  return get_or<T>(obj, key, T{}, where);
}

NetworkSpec parse_network(const json& j, std::size_t index) {
  const std::string where = "networks[" + std::to_string(index) + "]";
  reject_unknown(j, {"kind", "alpha", "threshold", "k", "eta", "beta", "tol", "max_iters", "init_seed"}, where);
  NetworkSpec n;
  n.kind = parse_regularizer(require<std::string>(j, "kind", where));
  if (j.contains("alpha")) n.alpha = get_or<double>(j, "alpha", 0.0, where);
  if (j.contains("threshold")) n.threshold = get_or<double>(j, "threshold", 0.0, where);
  n.k = get_or<int>(j, "k", n.k, where);
  n.eta = get_or<double>(j, "eta", n.eta, where);
  n.beta = get_or<double>(j, "beta", n.beta, where);
  n.tol = get_or<double>(j, "tol", n.tol, where);
  n.max_iters = get_or<int>(j, "max_iters", n.max_iters, where);
  n.init_seed = get_or<std::uint64_t>(j, "init_seed", n.init_seed, where);
  return n;
}

}  // namespace

void ExperimentConfig::validate() const {
  stream.validate();
  if (iterations < 0) throw InvalidInput("config: iterations must be >= 0");
  if (window < 0 || snapshot_period < 1) throw InvalidInput("config: need window >= 0 and snapshot_period >= 1");
  if (networks.empty()) throw InvalidInput("config: at least one network is required");
  std::set<RegularizerKind> seen;
  for (const auto& n : networks) {
    if (n.alpha.has_value() == n.threshold.has_value()) {
      throw InvalidInput("config: network '" + std::string(to_string(n.kind)) +
                         "' needs exactly one of alpha or threshold");
    }
    if (n.alpha && !(*n.alpha >= 0.0)) throw InvalidInput("config: alpha must be >= 0");
    if (n.threshold && !(*n.threshold > 0.0)) throw InvalidInput("config: threshold must be > 0");
    if (!seen.insert(n.kind).second) {
      throw InvalidInput("config: regularizer '" + std::string(to_string(n.kind)) + "' listed twice");
    }
    NetworkConfig probe;
    probe.n = stream.dim;
    probe.k = n.k;
    probe.alpha = n.alpha.value_or(0.0);
    probe.eta = n.eta;
    probe.beta = n.beta;
    probe.kind = n.kind;
    probe.dynamics_tol = n.tol;
    probe.dynamics_max_iters = n.max_iters;
    probe.validate();
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config: malformed JSON: ") + e.what());
  }
  reject_unknown(doc, {"name", "stream", "networks", "metrics", "output_dir"}, "config");
  ExperimentConfig cfg;
  cfg.name = get_or<std::string>(doc, "name", cfg.name, "config");
  cfg.output_dir = get_or<std::string>(doc, "output_dir", cfg.output_dir, "config");

  const json& s = doc.contains("stream") ? doc.at("stream") : throw InvalidInput("config: missing 'stream'");
  reject_unknown(s, {"dim", "head", "tail", "segments", "seed", "iterations"}, "stream");
  cfg.stream.dim = require<int>(s, "dim", "stream");
  cfg.stream.base.head = require<std::vector<double>>(s, "head", "stream");
  if (s.contains("tail")) {
    const json& t = s.at("tail");
    reject_unknown(t, {"count", "low", "high"}, "stream.tail");
    cfg.stream.base.tail_count = get_or<int>(t, "count", 0, "stream.tail");
    cfg.stream.base.tail_low = get_or<double>(t, "low", 0.0, "stream.tail");
    cfg.stream.base.tail_high = get_or<double>(t, "high", 0.0, "stream.tail");
  }
  if (s.contains("segments")) {
    cfg.stream.segments.clear();
    const json& segs = s.at("segments");
    if (!segs.is_array()) throw InvalidInput("config: stream.segments must be an array");
    for (std::size_t i = 0; i < segs.size(); ++i) {
      const std::string where = "stream.segments[" + std::to_string(i) + "]";
      reject_unknown(segs[i], {"start", "scale"}, where);
      cfg.stream.segments.push_back(
          {require<std::int64_t>(segs[i], "start", where), require<double>(segs[i], "scale", where)});
    }
  }
  cfg.stream.seed = get_or<std::uint64_t>(s, "seed", 0, "stream");
  cfg.iterations = get_or<std::int64_t>(s, "iterations", cfg.iterations, "stream");

  if (!doc.contains("networks") || !doc.at("networks").is_array()) {
    throw InvalidInput("config: 'networks' must be an array");
  }
  const json& nets = doc.at("networks");
  for (std::size_t i = 0; i < nets.size(); ++i) cfg.networks.push_back(parse_network(nets[i], i));

  if (doc.contains("metrics")) {
    const json& m = doc.at("metrics");
    reject_unknown(m, {"window", "snapshot_period"}, "metrics");
    cfg.window = get_or<std::int64_t>(m, "window", cfg.window, "metrics");
    cfg.snapshot_period = get_or<std::int64_t>(m, "snapshot_period", cfg.snapshot_period, "metrics");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_canonical_json(const ExperimentConfig& cfg) {
  json doc;
  doc["name"] = cfg.name;
  doc["output_dir"] = cfg.output_dir;
  json segs = json::array();
  for (const auto& seg : cfg.stream.segments) segs.push_back({{"start", seg.start}, {"scale", seg.scale}});
  doc["stream"] = {
      {"dim", cfg.stream.dim},
      {"head", cfg.stream.base.head},
      {"tail", {{"count", cfg.stream.base.tail_count}, {"low", cfg.stream.base.tail_low}, {"high", cfg.stream.base.tail_high}}},
      {"segments", segs},
      {"seed", cfg.stream.seed},
      {"iterations", cfg.iterations},
  };
  json nets = json::array();
  for (const auto& n : cfg.networks) {
    json j = {{"kind", std::string(to_string(n.kind))}, {"k", n.k},           {"eta", n.eta},
              {"beta", n.beta},                         {"tol", n.tol},       {"max_iters", n.max_iters},
              {"init_seed", n.init_seed}};
    if (n.alpha) j["alpha"] = *n.alpha;
    if (n.threshold) j["threshold"] = *n.threshold;
    nets.push_back(std::move(j));
  }
  doc["networks"] = nets;
  doc["metrics"] = {{"window", cfg.window}, {"snapshot_period", cfg.snapshot_period}};
  return doc.dump(2) + "\n";
}

ResolvedAlpha resolve_alpha(const NetworkSpec& spec, const Eigen::VectorXd& spectrum) {
  if (spec.alpha) return {*spec.alpha, "alpha given explicitly"};
  if (!spec.threshold) throw InvalidInput("resolve_alpha: neither alpha nor threshold set");
  const double tau = *spec.threshold;
  std::ostringstream why;
  why.precision(12);
  switch (spec.kind) {
    case RegularizerKind::ScaleDependent:
      why << "alpha = threshold = " << tau;
      return {tau, why.str()};
    case RegularizerKind::InputOutput: {
      const double trace = spectrum.sum();
      why << "alpha = threshold / Tr(C) = " << tau << " / " << trace;
      return {tau / trace, why.str()};
    }
    case RegularizerKind::SquaredOutput: {
      int p = 0;
      double top = 0.0;
      while (p < spectrum.size() && p < spec.k && spectrum(p) > tau) top += spectrum(p++);
      if (p == 0) throw InvalidInput("resolve_alpha: no eigenvalue exceeds the threshold");
      why << "alpha = threshold / (S_p - p threshold) with p = " << p << ", S_p = " << top
          << " (shrinkage alpha S_p / (1 + alpha p) = threshold)";
      return {tau / (top - p * tau), why.str()};
    }
  }
  throw InvalidInput("resolve_alpha: unknown regularizer");
}

namespace {

ExperimentConfig protocol_base(std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.stream.dim = 64;
  cfg.stream.base.head = {6.0, 5.0, 4.0, 2.0};
  cfg.stream.base.tail_count = 60;
  cfg.stream.base.tail_low = 0.0;
  cfg.stream.base.tail_high = 0.2;
  cfg.stream.seed = seed;
  cfg.iterations = 10000;
  cfg.window = 1000;
  cfg.snapshot_period = 100;
  for (RegularizerKind kind : kAllRegularizers) {
    NetworkSpec n;
    n.kind = kind;
    n.threshold = 2.0;
    n.init_seed = seed + 1;
    cfg.networks.push_back(n);
  }
  return cfg;
}

}  // namespace

ExperimentConfig stationary_config(std::uint64_t seed) {
  ExperimentConfig cfg = protocol_base(seed);
  cfg.name = "stationary";
  cfg.output_dir = "results/stationary";
  return cfg;
}

ExperimentConfig nonstationary_config(std::uint64_t seed) {
  ExperimentConfig cfg = protocol_base(seed);
  cfg.name = "nonstationary";
  cfg.output_dir = "results/nonstationary";
  cfg.stream.segments = {{0, 1.0}, {1000, 2.0}, {6000, 1.0}};
  for (auto& n : cfg.networks) n.beta = std::exp(-1.0 / 1000.0);
  return cfg;
}

}  // namespace simmatch
