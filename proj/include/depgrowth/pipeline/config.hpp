#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "depgrowth/metrics.hpp"
#include "depgrowth/records.hpp"
#include "depgrowth/semver.hpp"

namespace depgrowth::pipeline {

inline constexpr const char* kToolName = "depgrowth";
inline constexpr const char* kToolVersion = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for unreadable, missing or inconsistent data (exit code 3).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InputConfig {
  std::string repos;     // path or http(s) URL
  std::string releases;
  std::string edges;
  std::int64_t http_timeout_ms = 30'000;
  int http_max_retries = 3;
};

struct FilterConfig {
  std::set<std::string> ecosystems = {kDefaultEcosystems.begin(), kDefaultEcosystems.end()};
  std::int64_t dependent_threshold = 5;
  semver::ZeroRule zero_rule = semver::ZeroRule::PatchSplit;
  bool against_previous = false;
};

struct MetricsConfig {
  std::vector<metrics::LookaheadGrid> grids{metrics::kSixMonths, metrics::kOneYear,
                                            metrics::kTwoYears};
  /// Offsets measured in addition to the grid points.
  std::vector<std::int32_t> extra_offsets{365};
};

struct AnalysisConfig {
  metrics::LookaheadGrid grid = metrics::kOneYear;  // box-plot timepoints
  std::int32_t table_offset = 365;
  double alpha = 0.05;
  bool bonferroni = false;
  std::uint64_t permutations = 0;  // Monte Carlo ANOVA cross-check; 0 disables
  std::uint64_t seed = 1;
};

struct ComplexityConfig {
  bool enabled = false;  // whether "all" runs the complexity stage
  std::string client = "mock";  // mock | http
  std::string endpoint;
  std::string model = "gpt-4";
  double temperature = 0.0;
  std::string token_env = "DEPGROWTH_MODEL_TOKEN";
  int max_attempts = 3;
  std::int64_t initial_backoff_ms = 1000;
  std::size_t max_in_flight = 4;
  double requests_per_second = 0.0;
  double burst = 1.0;
  int repeats = 1;
  std::string human_ratings;  // optional path
  std::int64_t limit = 0;     // rate at most this many releases; 0 means all
};

struct PipelineConfig {
  InputConfig inputs;
  std::string output_dir = "out";
  FilterConfig filter;
  MetricsConfig metrics;
  AnalysisConfig analysis;
  ComplexityConfig complexity;
  unsigned workers = 1;
  std::optional<std::string> timestamp;  // fixed provenance timestamp
};

inline const char* to_string(semver::ZeroRule r) {
  return r == semver::ZeroRule::PatchSplit ? "patch-split" : "minor-split";
}

/// Throws ConfigError on any violated constraint.
inline void validate(const PipelineConfig& c) {
  for (const auto& e : c.filter.ecosystems)
    if (!is_known_ecosystem(e)) throw ConfigError("unknown ecosystem id '" + e + "'");
  if (c.filter.ecosystems.empty()) throw ConfigError("filter.ecosystems is empty");
  if (c.filter.dependent_threshold < 0) throw ConfigError("filter.dependent_threshold must be >= 0");
  if (!(c.analysis.alpha > 0.0 && c.analysis.alpha < 1.0))
    throw ConfigError("analysis.alpha must lie in (0, 1)");
  if (!metrics::is_supported(c.analysis.grid)) throw ConfigError("analysis.grid is not supported");
  for (const auto& g : c.metrics.grids)
    if (!metrics::is_supported(g)) throw ConfigError("metrics.grids holds an unsupported grid");
  for (auto o : c.metrics.extra_offsets)
    if (o < 0) throw ConfigError("metrics.extra_offsets must be non-negative");
  if (c.analysis.table_offset <= 0) throw ConfigError("analysis.table_offset must be positive");
  if (c.workers == 0) throw ConfigError("run.workers must be >= 1");
  if (c.complexity.client != "mock" && c.complexity.client != "http")
    throw ConfigError("complexity.client must be 'mock' or 'http'");
  if (c.complexity.client == "http" && c.complexity.endpoint.empty())
    throw ConfigError("complexity.endpoint is required for the http client");
  if (c.complexity.max_attempts < 1) throw ConfigError("complexity.max_attempts must be >= 1");
  if (c.complexity.repeats < 1) throw ConfigError("complexity.repeats must be >= 1");
  if (c.complexity.max_in_flight < 1) throw ConfigError("complexity.max_in_flight must be >= 1");
}

namespace detail {

template <typename T>
T scalar(const YAML::Node& n, const std::string& path) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for " + path);
  }
}

template <typename T>
void read(const YAML::Node& parent, const char* key, const std::string& section, T& out) {
  if (auto n = parent[key]; n && !n.IsNull()) out = scalar<T>(n, section + "." + key);
}

inline void check_keys(const YAML::Node& node, const std::string& section,
                       std::initializer_list<const char*> allowed) {
  if (!node) return;
  if (!node.IsMap()) throw ConfigError(section + " must be a mapping");
  for (const auto& kv : node) {
    const auto k = kv.first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("unknown key " + (section.empty() ? k : section + "." + k));
  }
}

inline metrics::LookaheadGrid grid(const std::string& name, const std::string& path) {
  auto g = metrics::grid_from_name(name);
  if (!g) throw ConfigError(path + ": unknown grid '" + name + "'");
  return *g;
}

}  // namespace detail

/// Parses YAML text into a config over defaults. Relative input and output
/// paths are resolved against `base_dir` when it is non-empty.
inline PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {}) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  PipelineConfig c;
  if (!root || root.IsNull()) return c;
  detail::check_keys(root, "", {"inputs", "output_dir", "filter", "metrics", "analysis", "complexity", "run"});

  if (auto n = root["inputs"]) {
    detail::check_keys(n, "inputs", {"repos", "releases", "edges", "http_timeout_ms", "http_max_retries"});
    detail::read(n, "repos", "inputs", c.inputs.repos);
    detail::read(n, "releases", "inputs", c.inputs.releases);
    detail::read(n, "edges", "inputs", c.inputs.edges);
    detail::read(n, "http_timeout_ms", "inputs", c.inputs.http_timeout_ms);
    detail::read(n, "http_max_retries", "inputs", c.inputs.http_max_retries);
  }
  detail::read(root, "output_dir", "", c.output_dir);

  if (auto n = root["filter"]) {
    detail::check_keys(n, "filter", {"ecosystems", "dependent_threshold", "zero_rule", "classification"});
    if (auto e = n["ecosystems"]) {
      if (!e.IsSequence()) throw ConfigError("filter.ecosystems must be a list");
      c.filter.ecosystems.clear();
      for (const auto& x : e) c.filter.ecosystems.insert(detail::scalar<std::string>(x, "filter.ecosystems"));
    }
    detail::read(n, "dependent_threshold", "filter", c.filter.dependent_threshold);
    std::string rule, cls;
    detail::read(n, "zero_rule", "filter", rule);
    if (rule == "minor-split") c.filter.zero_rule = semver::ZeroRule::MinorSplit;
    else if (!rule.empty() && rule != "patch-split") throw ConfigError("filter.zero_rule: unknown rule '" + rule + "'");
    detail::read(n, "classification", "filter", cls);
    if (cls == "previous-release") c.filter.against_previous = true;
    else if (!cls.empty() && cls != "version-string")
      throw ConfigError("filter.classification: unknown mode '" + cls + "'");
  }

  if (auto n = root["metrics"]) {
    detail::check_keys(n, "metrics", {"grids", "extra_offsets"});
    if (auto g = n["grids"]) {
      if (!g.IsSequence()) throw ConfigError("metrics.grids must be a list");
      c.metrics.grids.clear();
      for (const auto& x : g) c.metrics.grids.push_back(detail::grid(detail::scalar<std::string>(x, "metrics.grids"), "metrics.grids"));
    }
    if (auto o = n["extra_offsets"]) {
      if (!o.IsSequence()) throw ConfigError("metrics.extra_offsets must be a list");
      c.metrics.extra_offsets.clear();
      for (const auto& x : o) c.metrics.extra_offsets.push_back(detail::scalar<std::int32_t>(x, "metrics.extra_offsets"));
    }
  }

  if (auto n = root["analysis"]) {
    detail::check_keys(n, "analysis", {"grid", "table_offset", "alpha", "bonferroni", "permutations", "seed"});
    std::string g;
    detail::read(n, "grid", "analysis", g);
    if (!g.empty()) c.analysis.grid = detail::grid(g, "analysis.grid");
    detail::read(n, "table_offset", "analysis", c.analysis.table_offset);
    detail::read(n, "alpha", "analysis", c.analysis.alpha);
    detail::read(n, "bonferroni", "analysis", c.analysis.bonferroni);
    detail::read(n, "permutations", "analysis", c.analysis.permutations);
    detail::read(n, "seed", "analysis", c.analysis.seed);
  }

  if (auto n = root["complexity"]) {
    detail::check_keys(n, "complexity",
                       {"enabled", "client", "endpoint", "model", "temperature", "token_env", "max_attempts",
                        "initial_backoff_ms", "max_in_flight", "requests_per_second", "burst", "repeats",
                        "human_ratings", "limit"});
    auto& x = c.complexity;
    detail::read(n, "enabled", "complexity", x.enabled);
    detail::read(n, "client", "complexity", x.client);
    detail::read(n, "endpoint", "complexity", x.endpoint);
    detail::read(n, "model", "complexity", x.model);
    detail::read(n, "temperature", "complexity", x.temperature);
    detail::read(n, "token_env", "complexity", x.token_env);
    detail::read(n, "max_attempts", "complexity", x.max_attempts);
    detail::read(n, "initial_backoff_ms", "complexity", x.initial_backoff_ms);
    detail::read(n, "max_in_flight", "complexity", x.max_in_flight);
    detail::read(n, "requests_per_second", "complexity", x.requests_per_second);
    detail::read(n, "burst", "complexity", x.burst);
    detail::read(n, "repeats", "complexity", x.repeats);
    detail::read(n, "human_ratings", "complexity", x.human_ratings);
    detail::read(n, "limit", "complexity", x.limit);
  }

  if (auto n = root["run"]) {
    detail::check_keys(n, "run", {"workers", "timestamp"});
    detail::read(n, "workers", "run", c.workers);
    std::string ts;
    detail::read(n, "timestamp", "run", ts);
    if (!ts.empty()) c.timestamp = ts;
  }

  if (!base_dir.empty()) {
    auto resolve = [&](std::string& p) {
      if (p.empty() || p.rfind("http://", 0) == 0 || p.rfind("https://", 0) == 0) return;
      std::filesystem::path fp(p);
      if (fp.is_relative()) p = (base_dir / fp).lexically_normal().string();
    };
    resolve(c.inputs.repos);
    resolve(c.inputs.releases);
    resolve(c.inputs.edges);
    resolve(c.output_dir);
    resolve(c.complexity.human_ratings);
  }
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

/// The effective configuration as canonical JSON; hashed into provenance.
/// The auth token never appears here, only the name of its variable.
inline nlohmann::json to_json(const PipelineConfig& c) {
  using nlohmann::json;
  json grids = json::array();
  for (const auto& g : c.metrics.grids) grids.push_back(metrics::grid_name(g));
  return json{
      {"inputs",
       {{"repos", c.inputs.repos},
        {"releases", c.inputs.releases},
        {"edges", c.inputs.edges},
        {"http_timeout_ms", c.inputs.http_timeout_ms},
        {"http_max_retries", c.inputs.http_max_retries}}},
      {"output_dir", c.output_dir},
      {"filter",
       {{"ecosystems", c.filter.ecosystems},
        {"dependent_threshold", c.filter.dependent_threshold},
        {"zero_rule", to_string(c.filter.zero_rule)},
        {"classification", c.filter.against_previous ? "previous-release" : "version-string"}}},
      {"metrics", {{"grids", grids}, {"extra_offsets", c.metrics.extra_offsets}}},
      {"analysis",
       {{"grid", metrics::grid_name(c.analysis.grid)},
        {"table_offset", c.analysis.table_offset},
        {"alpha", c.analysis.alpha},
        {"bonferroni", c.analysis.bonferroni},
        {"permutations", c.analysis.permutations},
        {"seed", c.analysis.seed}}},
      {"complexity",
       {{"enabled", c.complexity.enabled},
        {"client", c.complexity.client},
        {"endpoint", c.complexity.endpoint},
        {"model", c.complexity.model},
        {"temperature", c.complexity.temperature},
        {"token_env", c.complexity.token_env},
        {"max_attempts", c.complexity.max_attempts},
        {"initial_backoff_ms", c.complexity.initial_backoff_ms},
        {"max_in_flight", c.complexity.max_in_flight},
        {"requests_per_second", c.complexity.requests_per_second},
        {"burst", c.complexity.burst},
        {"repeats", c.complexity.repeats},
        {"human_ratings", c.complexity.human_ratings},
        {"limit", c.complexity.limit}}},
      {"run", {{"workers", c.workers}, {"timestamp", c.timestamp ? json(*c.timestamp) : json(nullptr)}}}};
}

}  // namespace depgrowth::pipeline
