// depgrowth: release adoption pipeline (filter, metrics, analyze, complexity).

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "depgrowth/pipeline/config.hpp"
#include "depgrowth/pipeline/stages.hpp"

namespace {

namespace pl = depgrowth::pipeline;

enum ExitCode { kOk = 0, kUsage = 1, kConfigError = 2, kDataError = 3 };

struct Overrides {
  std::string config_path;
  std::string repos, releases, edges, output_dir;
  std::vector<std::string> ecosystems;
  std::optional<std::int64_t> threshold;
  std::string grid;
  std::optional<double> alpha;
  std::optional<unsigned> workers;
  std::string timestamp;
  std::string client, endpoint, model, human_ratings;
  std::optional<std::int64_t> limit;
  bool quiet = false;
};

pl::PipelineConfig effective_config(const Overrides& o) {
  pl::PipelineConfig c = o.config_path.empty() ? pl::PipelineConfig{} : pl::load_config(o.config_path);
  if (!o.repos.empty()) c.inputs.repos = o.repos;
  if (!o.releases.empty()) c.inputs.releases = o.releases;
  if (!o.edges.empty()) c.inputs.edges = o.edges;
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (!o.ecosystems.empty()) c.filter.ecosystems = {o.ecosystems.begin(), o.ecosystems.end()};
  if (o.threshold) c.filter.dependent_threshold = *o.threshold;
  if (!o.grid.empty()) {
    auto g = depgrowth::metrics::grid_from_name(o.grid);
    if (!g) throw pl::ConfigError("unknown grid '" + o.grid + "'");
    c.analysis.grid = *g;
  }
  if (o.alpha) c.analysis.alpha = *o.alpha;
  if (o.workers) c.workers = *o.workers;
  if (!o.timestamp.empty()) c.timestamp = o.timestamp;
  if (!o.client.empty()) c.complexity.client = o.client;
  if (!o.endpoint.empty()) c.complexity.endpoint = o.endpoint;
  if (!o.model.empty()) c.complexity.model = o.model;
  if (!o.human_ratings.empty()) c.complexity.human_ratings = o.human_ratings;
  if (o.limit) c.complexity.limit = *o.limit;
  pl::validate(c);
  return c;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "YAML configuration file");
  cmd->add_option("-o,--output-dir", o.output_dir, "Output directory");
  cmd->add_option("--workers", o.workers, "Worker threads within a stage");
  cmd->add_option("--timestamp", o.timestamp, "Fixed provenance timestamp");
  cmd->add_flag("-q,--quiet", o.quiet, "No progress messages");
}

void add_inputs(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--repos", o.repos, "Repository snapshots (path or URL)");
  cmd->add_option("--releases", o.releases, "Package releases (path or URL)");
  cmd->add_option("--edges", o.edges, "Dependent edges (path or URL)");
}

void add_filter(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--ecosystems", o.ecosystems, "Ecosystems to keep")->delimiter(',');
  cmd->add_option("--threshold", o.threshold, "Minimum dependents the day before release");
}

void add_analysis(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--grid", o.grid, "Box-plot grid: six-month, one-year or two-year");
  cmd->add_option("--alpha", o.alpha, "Significance level");
}

void add_complexity(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--client", o.client, "Model client: mock or http");
  cmd->add_option("--endpoint", o.endpoint, "Chat endpoint URL");
  cmd->add_option("--model", o.model, "Model name");
  cmd->add_option("--human-ratings", o.human_ratings, "Human ratings file for agreement");
  cmd->add_option("--limit", o.limit, "Rate at most this many releases");
}

void print_filter(const depgrowth::filter::CascadeResult& r) {
  for (const auto& s : r.reports) {
    std::printf("%-16s in=%-8llu out=%-8llu", s.stage_name.c_str(), static_cast<unsigned long long>(s.records_in),
                static_cast<unsigned long long>(s.records_out));
    for (const auto& [reason, n] : s.reasons) std::printf(" %s=%llu", reason.c_str(), static_cast<unsigned long long>(n));
    std::printf("\n");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Release adoption pipeline over ecosystem snapshots"};
  app.require_subcommand(1);
  Overrides o;

  auto* filter = app.add_subcommand("filter", "Run the filter cascade");
  auto* metrics = app.add_subcommand("metrics", "Build release records and log-difference samples");
  auto* analyze = app.add_subcommand("analyze", "Tables, heatmaps, distributions and tests");
  auto* complexity = app.add_subcommand("complexity", "Rate release-note complexity");
  auto* all = app.add_subcommand("all", "Run every stage in order");
  for (auto* cmd : {filter, metrics, analyze, complexity, all}) add_common(cmd, o);
  for (auto* cmd : {filter, metrics, complexity, all}) add_inputs(cmd, o);
  for (auto* cmd : {filter, all}) add_filter(cmd, o);
  for (auto* cmd : {analyze, all}) add_analysis(cmd, o);
  for (auto* cmd : {complexity, all}) add_complexity(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    const auto config = effective_config(o);
    pl::Logger log;
    if (!o.quiet) log = [](const std::string& m) { std::cerr << "depgrowth: " << m << "\n"; };
    if (filter->parsed()) {
      print_filter(pl::cmd_filter(config, log));
    } else if (metrics->parsed()) {
      auto r = pl::cmd_metrics(config, log);
      std::printf("records=%zu samples=%zu skipped=%llu\n", r.records.size(), r.samples.size(),
                  static_cast<unsigned long long>(r.skipped_unclassified));
    } else if (analyze->parsed()) {
      auto r = pl::cmd_analyze(config, log);
      std::fputs(depgrowth::report::render_summary_text(r.by_size).c_str(), stdout);
      std::fputs(depgrowth::report::render_summary_text(r.by_series).c_str(), stdout);
    } else if (complexity->parsed()) {
      auto r = pl::cmd_complexity(config, log);
      std::printf("eligible=%zu already=%zu rated=%zu failed=%zu\n", r.eligible, r.already_rated, r.rated_now,
                  r.failures.size());
      if (r.agreement)
        std::printf("agreement n=%zu spearman=%.4f pearson=%.4f within_one=%.1f%%\n", r.agreement->n,
                    r.agreement->spearman_rho, r.agreement->pearson_r, r.agreement->within_one_rank_pct);
    } else if (all->parsed()) {
      auto r = pl::cmd_all(config, log);
      print_filter(r.filter);
      std::printf("records=%zu samples=%zu\n", r.metrics.records.size(), r.metrics.samples.size());
    }
    return kOk;
  } catch (const pl::ConfigError& e) {
    std::cerr << "depgrowth: config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const pl::DataError& e) {
    std::cerr << "depgrowth: data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "depgrowth: data error: " << e.what() << "\n";
    return kDataError;
  }
}
