#pragma once

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "depgrowth/complexity/agreement.hpp"
#include "depgrowth/complexity/client.hpp"
#include "depgrowth/complexity/rating.hpp"
#include "depgrowth/filter.hpp"
#include "depgrowth/ingest/dependent_index.hpp"
#include "depgrowth/ingest/reader.hpp"
#include "depgrowth/ingest/repo_index.hpp"
#include "depgrowth/metrics.hpp"
#include "depgrowth/pipeline/config.hpp"
#include "depgrowth/pipeline/io.hpp"
#include "depgrowth/pipeline/provenance.hpp"
#include "depgrowth/report/writers.hpp"
#include "depgrowth/stats/permutation.hpp"

namespace depgrowth::pipeline {

namespace fs = std::filesystem;

using Logger = std::function<void(const std::string&)>;

/// File names inside the output directory.
namespace files {
inline constexpr const char* kFilteredReleases = "filtered_releases.ndjson";
inline constexpr const char* kFilterReport = "filter_report.json";
inline constexpr const char* kReleaseRecords = "release_records.ndjson";
inline constexpr const char* kSamples = "samples.ndjson";
inline constexpr const char* kMetricsReport = "metrics_report.json";
inline constexpr const char* kAnalysis = "analysis.json";
inline constexpr const char* kTableSizeText = "table_size.txt";
inline constexpr const char* kTableSizeCsv = "table_size.csv";
inline constexpr const char* kTableSeriesText = "table_series.txt";
inline constexpr const char* kTableSeriesCsv = "table_series.csv";
inline constexpr const char* kHeatmapSizeSvg = "heatmap_size.svg";
inline constexpr const char* kHeatmapSeriesSvg = "heatmap_series.svg";
inline constexpr const char* kHeatmaps = "heatmaps.ndjson";
inline constexpr const char* kTimepoints = "timepoints.ndjson";
inline constexpr const char* kDemographics = "demographics.csv";
inline constexpr const char* kRatings = "ratings.ndjson";
inline constexpr const char* kComplexityReport = "complexity_report.json";
inline constexpr const char* kComplexityDescriptives = "complexity_descriptives.csv";
inline constexpr const char* kComplexityTypeTests = "complexity_type_tests.csv";
}  // namespace files

inline std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
  }
  return h.hex();
}

// ---- loading --------------------------------------------------------------

struct InputIssues {
  std::uint64_t violations = 0;
  std::vector<ingest::SchemaViolation> first;  // at most kKeptViolations
};

inline constexpr std::size_t kKeptViolations = 20;

struct LoadedData {
  std::unique_ptr<ingest::RepoIndex> repos;
  std::unique_ptr<ingest::DependentIndex> edges;
  std::vector<PackageRelease> releases;
  std::map<std::string, std::string> digests;
  std::map<std::string, InputIssues> issues;

  json ingest_json() const {
    json issues_json = json::object();
    for (const auto& [name, i] : issues) {
      json first = json::array();
      for (const auto& v : i.first) first.push_back(json{{"line", v.line}, {"record", v.record_index}, {"reason", v.reason}});
      issues_json[name] = json{{"violations", i.violations}, {"first", first}};
    }
    json j{{"schema_violations", issues_json}};
    if (repos)
      j["repos"] = json{{"repositories", repos->repo_count()},
                        {"snapshots", repos->snapshot_count()},
                        {"duplicate_snapshots", repos->duplicate_snapshots()}};
    if (edges) {
      const auto& s = edges->stats();
      j["edges"] = json{{"edges", s.edges},
                        {"duplicate_edges", s.duplicate_edges},
                        {"unknown_dependents", s.unknown_dependents},
                        {"packages", edges->package_count()},
                        {"first_date", edges->first_date() ? edges->first_date()->iso() : ""},
                        {"last_date", edges->last_date() ? edges->last_date()->iso() : ""}};
    }
    j["releases"] = releases.size();
    return j;
  }
};

namespace detail {

template <typename T>
ingest::RecordReader<T> reader_for(std::unique_ptr<ingest::LineSource> src);
template <>
inline ingest::RecordReader<RepoSnapshot> reader_for(std::unique_ptr<ingest::LineSource> src) {
  return ingest::read_repo_snapshots(std::move(src));
}
template <>
inline ingest::RecordReader<PackageRelease> reader_for(std::unique_ptr<ingest::LineSource> src) {
  return ingest::read_releases(std::move(src));
}
template <>
inline ingest::RecordReader<DependentEdge> reader_for(std::unique_ptr<ingest::LineSource> src) {
  return ingest::read_dependent_edges(std::move(src));
}

/// Streams one input, feeding records to `sink`, and records its digest and
/// schema violations in `data`.
template <typename T, typename Sink>
void stream_input(const std::string& name, const std::string& location, const InputConfig& inputs,
                  LoadedData& data, Sink&& sink) {
  try {
    auto hashing = std::make_unique<HashingLineSource>(open_source(location, inputs));
    auto* h = hashing.get();
    auto reader = reader_for<T>(std::move(hashing));
    auto& issues = data.issues[name];
    reader.for_each(sink, [&](const ingest::SchemaViolation& v) {
      ++issues.violations;
      if (issues.first.size() < kKeptViolations) issues.first.push_back(v);
    });
    data.digests[name] = h->digest();
  } catch (const ingest::IngestError& e) {
    throw DataError(name + ": " + e.what());
  }
}

}  // namespace detail

struct LoadWhat {
  bool repos = true;
  bool edges = true;
  bool releases = true;
};

inline LoadedData load_inputs(const PipelineConfig& c, LoadWhat what = {}, const Logger& log = {}) {
  LoadedData d;
  if (what.repos || what.edges) {
    if (log) log("reading repository snapshots from " + c.inputs.repos);
    d.repos = std::make_unique<ingest::RepoIndex>();
    detail::stream_input<RepoSnapshot>("repos", c.inputs.repos, c.inputs, d,
                                       [&](RepoSnapshot&& s) { d.repos->add(std::move(s)); });
    d.repos->finalize();
  }
  if (what.edges) {
    if (log) log("reading dependent edges from " + c.inputs.edges);
    d.edges = std::make_unique<ingest::DependentIndex>(*d.repos);
    detail::stream_input<DependentEdge>("edges", c.inputs.edges, c.inputs, d,
                                        [&](DependentEdge&& e) { d.edges->add(e); });
    d.edges->finalize();
  }
  if (what.releases) {
    if (log) log("reading releases from " + c.inputs.releases);
    detail::stream_input<PackageRelease>("releases", c.inputs.releases, c.inputs, d,
                                         [&](PackageRelease&& r) { d.releases.push_back(std::move(r)); });
  }
  return d;
}

// ---- filter ---------------------------------------------------------------

inline filter::CascadeOptions cascade_options(const PipelineConfig& c) {
  filter::CascadeOptions o;
  o.allowed_ecosystems = c.filter.ecosystems;
  o.dependent_threshold = c.filter.dependent_threshold;
  o.semver.zero_rule = c.filter.zero_rule;
  o.semver.classification = c.filter.against_previous ? filter::Classification::AgainstPrevious
                                                      : filter::Classification::FromVersionString;
  o.workers = c.workers;
  return o;
}

inline json to_json(const filter::FilterReport& r) {
  return json{{"stage", r.stage_name}, {"records_in", r.records_in}, {"records_out", r.records_out}, {"reasons", r.reasons}};
}

/// Runs the cascade over loaded inputs and writes the filtered releases and
/// the per-stage reports.
inline filter::CascadeResult run_filter(const PipelineConfig& c, const LoadedData& d, const Logger& log = {}) {
  if (log) log("filtering " + std::to_string(d.releases.size()) + " releases");
  auto result = filter::run_cascade(d.releases, *d.repos, *d.edges, cascade_options(c));
  auto prov = make_provenance(c, "filter");
  prov.inputs = d.digests;
  const fs::path out(c.output_dir);

  AtomicFile f(out / files::kFilteredReleases);
  f.stream() << ndjson_header(kFilteredSchema, prov);
  for (const auto& r : result.releases) f.stream() << to_json(r).dump() << '\n';
  f.commit();

  json stages = json::array();
  for (const auto& r : result.reports) stages.push_back(to_json(r));
  json report{{"provenance", prov.to_json()}, {"ingest", d.ingest_json()}, {"stages", stages}};
  write_text_file(out / files::kFilterReport, report.dump(2) + "\n");
  if (log) log("kept " + std::to_string(result.releases.size()) + " releases");
  return result;
}

inline filter::CascadeResult cmd_filter(const PipelineConfig& c, const Logger& log = {}) {
  auto d = load_inputs(c, {}, log);
  return run_filter(c, d, log);
}

// ---- metrics --------------------------------------------------------------

struct MetricsResult {
  std::vector<metrics::ReleaseRecord> records;
  std::uint64_t skipped_unclassified = 0;
  std::vector<metrics::LogDiffSample> samples;
  std::map<std::pair<metrics::Metric, std::int32_t>, metrics::Exclusions> exclusions;
};

inline std::vector<std::int32_t> sample_offsets(const PipelineConfig& c) {
  auto all = metrics::measured_offsets(c.metrics.grids, c.metrics.extra_offsets);
  all.erase(std::remove(all.begin(), all.end(), 0), all.end());
  return all;
}

inline MetricsResult run_metrics(const PipelineConfig& c, const std::vector<filter::CandidateRelease>& releases,
                                 const LoadedData& d, std::map<std::string, std::string> input_digests,
                                 const Logger& log = {}) {
  MetricsResult out;
  const auto offsets = metrics::measured_offsets(c.metrics.grids, c.metrics.extra_offsets);
  if (log) log("measuring " + std::to_string(releases.size()) + " releases at " + std::to_string(offsets.size()) + " offsets");
  auto built = metrics::build_release_records(releases, *d.repos, *d.edges, offsets, c.workers);
  out.records = std::move(built.records);
  out.skipped_unclassified = built.skipped_unclassified;
  for (auto m : metrics::kAllMetrics)
    for (auto o : sample_offsets(c)) {
      auto set = metrics::log_diff_samples(out.records, m, o);
      out.exclusions[{m, o}] = set.excluded;
      out.samples.insert(out.samples.end(), std::make_move_iterator(set.samples.begin()),
                         std::make_move_iterator(set.samples.end()));
    }

  auto prov = make_provenance(c, "metrics");
  prov.inputs = std::move(input_digests);
  const fs::path dir(c.output_dir);
  {
    AtomicFile f(dir / files::kReleaseRecords);
    f.stream() << ndjson_header(kRecordSchema, prov);
    for (const auto& r : out.records) f.stream() << to_json(r).dump() << '\n';
    f.commit();
  }
  {
    AtomicFile f(dir / files::kSamples);
    f.stream() << ndjson_header(kSampleSchema, prov);
    for (const auto& s : out.samples) f.stream() << to_json(s).dump() << '\n';
    f.commit();
  }
  json excl = json::array();
  for (const auto& [k, e] : out.exclusions)
    excl.push_back(json{{"metric", metrics::to_string(k.first)},
                        {"offset_days", k.second},
                        {"missing_baseline", e.missing_baseline},
                        {"missing_value", e.missing_value},
                        {"nonpositive", e.nonpositive}});
  json report{{"provenance", prov.to_json()},
              {"records", out.records.size()},
              {"skipped_unclassified", out.skipped_unclassified},
              {"samples", out.samples.size()},
              {"exclusions", excl}};
  write_text_file(dir / files::kMetricsReport, report.dump(2) + "\n");
  return out;
}

inline MetricsResult cmd_metrics(const PipelineConfig& c, const Logger& log = {}) {
  const fs::path filtered = fs::path(c.output_dir) / files::kFilteredReleases;
  auto releases = read_ndjson<filter::CandidateRelease>(filtered, kFilteredSchema, &decode_filtered);
  auto d = load_inputs(c, {true, true, false}, log);
  auto digests = d.digests;
  digests["filtered_releases"] = sha256_file(filtered);
  return run_metrics(c, releases, d, std::move(digests), log);
}

// ---- complexity -----------------------------------------------------------

struct ComplexityResult {
  std::size_t eligible = 0;
  std::size_t already_rated = 0;
  std::size_t rated_now = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // key, error
  std::optional<complexity::AgreementStats> agreement;
  std::map<std::string, complexity::AgreementStats> agreement_by_language;
  std::string agreement_note;
};

inline json to_json(const complexity::AgreementStats& a) {
  return json{{"n", a.n},
              {"spearman_rho", a.spearman_rho},
              {"spearman_p", a.spearman_p},
              {"pearson_r", a.pearson_r},
              {"within_one", a.within_one},
              {"within_one_rank_pct", a.within_one_rank_pct}};
}

inline std::unique_ptr<complexity::ModelClient> make_client(const ComplexityConfig& x) {
  if (x.client == "http") {
    complexity::ChatEndpoint e;
    e.url = x.endpoint;
    e.model = x.model;
    e.temperature = x.temperature;
    e.token_env = x.token_env;
    return std::make_unique<complexity::HttpChatClient>(e);
  }
  return std::make_unique<complexity::MockModelClient>();
}

/// Reads an existing ratings file for resumption. A torn final line (from an
/// interrupted run) is dropped; any other malformed line is a data error.
inline std::vector<RatingRow> read_existing_ratings(const fs::path& path) {
  std::vector<RatingRow> rows;
  if (!fs::exists(path)) return rows;
  ingest::RecordReader<RatingRow> reader(std::make_unique<ingest::FileLineSource>(path.string()), kRatingSchema,
                                         &decode_rating);
  std::optional<ingest::SchemaViolation> pending;
  try {
    reader.for_each(
        [&](RatingRow&& r) {
          if (pending) throw DataError(path.string() + ":" + std::to_string(pending->line) + ": " + pending->reason);
          rows.push_back(std::move(r));
        },
        [&](const ingest::SchemaViolation& v) {
          if (pending) throw DataError(path.string() + ":" + std::to_string(pending->line) + ": " + pending->reason);
          pending = v;
        });
  } catch (const ingest::IngestError& e) {
    throw DataError(e.what());
  }
  return rows;
}

inline ComplexityResult run_complexity(const PipelineConfig& c, complexity::ModelClient& client,
                                       const complexity::Sleeper& sleeper = complexity::real_sleep,
                                       const Logger& log = {}) {
  const fs::path dir(c.output_dir);
  const fs::path filtered = dir / files::kFilteredReleases;
  auto releases = read_ndjson<filter::CandidateRelease>(filtered, kFilteredSchema, &decode_filtered);
  auto d = load_inputs(c, {true, false, false}, log);

  struct Job {
    const filter::CandidateRelease* release;
    RepoSnapshot repo;
  };
  std::vector<Job> jobs;
  ComplexityResult result;
  for (const auto& r : releases) {
    if (!complexity::eligible_for_rating(r.release) || !r.release_type) continue;
    auto snap = d.repos->nearest_snapshot(r.release.owner, r.release.repo_name, r.release.release_date);
    if (!snap) continue;
    ++result.eligible;
    jobs.push_back({&r, std::move(*snap)});
  }
  std::sort(jobs.begin(), jobs.end(),
            [](const Job& a, const Job& b) { return a.release->release.key() < b.release->release.key(); });

  const fs::path ratings_path = dir / files::kRatings;
  auto existing = read_existing_ratings(ratings_path);
  std::set<std::string> done;
  for (const auto& r : existing) done.insert(r.release_key);
  std::vector<const Job*> todo;
  for (const auto& j : jobs) {
    if (done.count(j.release->release.key())) {
      ++result.already_rated;
      continue;
    }
    if (c.complexity.limit > 0 &&
        static_cast<std::int64_t>(todo.size() + result.already_rated) >= c.complexity.limit)
      break;
    todo.push_back(&j);
  }

  auto prov = make_provenance(c, "complexity");
  prov.inputs = d.digests;
  prov.inputs["filtered_releases"] = sha256_file(filtered);
  prov.extra = json{{"model", client.model_id()}, {"temperature", c.complexity.temperature},
                    {"repeats", c.complexity.repeats}};

  // Rewrite the surviving rows (dropping a torn tail), then append new ones.
  fs::create_directories(dir);
  {
    AtomicFile f(ratings_path);
    f.stream() << ndjson_header(kRatingSchema, prov);
    for (const auto& r : existing) f.stream() << to_json(r).dump() << '\n';
    f.commit();
  }
  std::ofstream out(ratings_path, std::ios::app | std::ios::binary);
  if (!out) throw DataError("cannot append to " + ratings_path.string());
  if (log) log("rating " + std::to_string(todo.size()) + " releases (" + std::to_string(result.already_rated) + " already rated)");

  complexity::RetryPolicy policy;
  policy.max_attempts = c.complexity.max_attempts;
  policy.initial_backoff = std::chrono::milliseconds(c.complexity.initial_backoff_ms);
  policy.sleep = sleeper;
  complexity::RateLimits limits{c.complexity.max_in_flight, c.complexity.requests_per_second, c.complexity.burst};
  std::mutex mutex;
  complexity::run_bounded(todo.size(), limits, [&](std::size_t i) {
    const Job& job = *todo[i];
    const auto& rel = job.release->release;
    try {
      const auto prompt = complexity::build_prompt(rel, job.repo);
      RatingRow row;
      row.release_key = rel.key();
      row.ecosystem = rel.ecosystem;
      row.release_type = *job.release->release_type;
      if (c.complexity.repeats > 1) {
        row.rating = complexity::rate_release_repeated(rel, job.repo, client, policy, c.complexity.repeats);
        row.attempts = c.complexity.repeats;
      } else {
        auto outcome = complexity::rate_prompt(prompt, client, policy);
        row.rating = std::move(outcome.rating);
        row.attempts = outcome.attempts;
      }
      row.prompt_sha256 = sha256_hex(prompt.system_text + "\n" + prompt.user_text);
      row.model = client.model_id();
      row.temperature = c.complexity.temperature;
      row.timestamp = c.timestamp ? *c.timestamp : utc_now_iso();
      const auto line = to_json(row).dump();
      std::lock_guard lock(mutex);
      out << line << '\n';
      out.flush();
      ++result.rated_now;
    } catch (const complexity::ComplexityError& e) {
      std::lock_guard lock(mutex);
      result.failures.emplace_back(rel.key(), e.what());
    }
  });
  out.close();
  std::sort(result.failures.begin(), result.failures.end());
  // Completion order depends on worker timing; the finished file is sorted.
  {
    auto rows = read_existing_ratings(ratings_path);
    std::sort(rows.begin(), rows.end(),
              [](const RatingRow& a, const RatingRow& b) { return a.release_key < b.release_key; });
    AtomicFile f(ratings_path);
    f.stream() << ndjson_header(kRatingSchema, prov);
    for (const auto& r : rows) f.stream() << to_json(r).dump() << '\n';
    f.commit();
  }

  json report{{"provenance", prov.to_json()},
              {"eligible", result.eligible},
              {"already_rated", result.already_rated},
              {"rated_now", result.rated_now},
              {"failures", json::array()}};
  for (const auto& [k, e] : result.failures) report["failures"].push_back(json{{"release_key", k}, {"error", e}});

  if (!c.complexity.human_ratings.empty()) {
    auto human = read_ndjson<HumanRating>(c.complexity.human_ratings, kHumanRatingSchema, &decode_human_rating);
    std::map<std::string, const RatingRow*> model;
    auto all = read_existing_ratings(ratings_path);
    for (const auto& r : all)
      if (r.rating.rating) model[r.release_key] = &r;
    std::vector<int> m, h;
    std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> by_lang;
    for (const auto& hr : human) {
      auto it = model.find(hr.release_key);
      if (it == model.end()) continue;
      m.push_back(*it->second->rating.rating);
      h.push_back(hr.rating);
      auto& p = by_lang[ecosystem_language(it->second->ecosystem)];
      p.first.push_back(*it->second->rating.rating);
      p.second.push_back(hr.rating);
    }
    json agreement{{"human_ratings", human.size()}, {"matched", m.size()}};
    try {
      result.agreement = complexity::agreement_stats(m, h);
      agreement["overall"] = to_json(*result.agreement);
    } catch (const stats::DegenerateInput& e) {
      result.agreement_note = e.what();
      agreement["overall"] = json{{"error", e.what()}};
    }
    for (const auto& [lang, p] : by_lang) {
      try {
        auto a = complexity::agreement_stats(p.first, p.second);
        result.agreement_by_language[lang] = a;
        agreement["by_language"][lang] = to_json(a);
      } catch (const stats::DegenerateInput& e) {
        agreement["by_language"][lang] = json{{"error", e.what()}};
      }
    }
    prov.inputs["human_ratings"] = sha256_file(c.complexity.human_ratings);
    report["provenance"] = prov.to_json();
    report["agreement"] = agreement;
  }
  write_text_file(dir / files::kComplexityReport, report.dump(2) + "\n");
  return result;
}

inline ComplexityResult cmd_complexity(const PipelineConfig& c, const Logger& log = {}) {
  auto client = make_client(c.complexity);
  return run_complexity(c, *client, complexity::real_sleep, log);
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeResult {
  report::SummaryTable by_size;
  report::SummaryTable by_series;
  report::Heatmap heatmap_size;
  report::Heatmap heatmap_series;
  std::vector<report::TimepointRecord> timepoints_size;
  std::vector<report::TimepointRecord> timepoints_series;
  report::Demographics demographics;
  std::vector<report::GlobalAnova> global_anova;
  json document;
};

inline AnalyzeResult cmd_analyze(const PipelineConfig& c, const Logger& log = {}) {
  const fs::path dir(c.output_dir);
  const auto samples_path = dir / files::kSamples;
  const auto records_path = dir / files::kReleaseRecords;
  const auto ratings_path = dir / files::kRatings;
  auto samples = read_ndjson<metrics::LogDiffSample>(samples_path, kSampleSchema, &decode_sample);
  auto rows = read_ndjson<RecordRow>(records_path, kRecordSchema, &decode_record_row);
  if (log) log("analysing " + std::to_string(samples.size()) + " samples");

  auto prov = make_provenance(c, "analyze");
  prov.inputs["samples"] = sha256_file(samples_path);
  prov.inputs["release_records"] = sha256_file(records_path);

  AnalyzeResult r;
  report::SummaryOptions opts{c.analysis.alpha, c.analysis.bonferroni, metrics::Metric::Dependents};
  r.by_size = report::summary_table(samples, report::Stratification::BySize, c.analysis.table_offset, opts);
  r.by_series = report::summary_table(samples, report::Stratification::BySeries, c.analysis.table_offset, opts);
  r.heatmap_size = report::heatmap_matrix(r.by_size);
  r.heatmap_series = report::heatmap_matrix(r.by_series);
  r.timepoints_size = report::timepoint_distributions(samples, report::Stratification::BySize, c.analysis.grid);
  r.timepoints_series = report::timepoint_distributions(samples, report::Stratification::BySeries, c.analysis.grid);
  r.global_anova = report::global_anova(samples, c.analysis.table_offset);
  for (const auto& row : rows) {
    auto [it, inserted] = r.demographics.try_emplace(row.ecosystem);
    if (inserted) it->second.fill(0);
    ++it->second[static_cast<std::size_t>(row.release_type)];
  }

  json global = json::array();
  for (const auto& g : r.global_anova) {
    json e{{"ecosystem", g.ecosystem}};
    if (g.anova) e["anova"] = report::to_json(*g.anova);
    else e["error"] = g.note;
    if (g.anova && c.analysis.permutations > 0) {
      std::vector<std::vector<double>> groups(report::kColumns);
      for (const auto& s : samples)
        if (s.ecosystem == g.ecosystem && s.offset_days == c.analysis.table_offset &&
            s.metric == metrics::Metric::Dependents)
          groups[static_cast<std::size_t>(semver::report_column(s.release_type))].push_back(s.value);
      groups.erase(std::remove_if(groups.begin(), groups.end(), [](const auto& v) { return v.empty(); }),
                   groups.end());
      auto mc = stats::permutation_anova_p(groups, c.analysis.permutations, c.analysis.seed);
      e["permutation"] = json{{"p", mc.p_value}, {"permutations", mc.permutations}, {"standard_error", mc.standard_error()}};
    }
    global.push_back(std::move(e));
  }

  json doc{{"provenance", prov.to_json()},
           {"table_size", report::to_json(r.by_size)},
           {"table_series", report::to_json(r.by_series)},
           {"anova_global", global},
           {"demographics", json::object()}};
  for (const auto& [eco, counts] : r.demographics) {
    json cts = json::object();
    for (std::size_t i = 0; i < counts.size(); ++i) cts[semver::to_string(semver::kAllReleaseTypes[i])] = counts[i];
    doc["demographics"][eco] = cts;
  }

  if (fs::exists(ratings_path)) {
    auto ratings = read_existing_ratings(ratings_path);
    prov.inputs["ratings"] = sha256_file(ratings_path);
    doc["provenance"] = prov.to_json();
    std::vector<report::RatedRelease> rated;
    for (const auto& x : ratings)
      if (x.rating.rating) rated.push_back({x.release_key, x.ecosystem, x.release_type, *x.rating.rating});
    std::sort(rated.begin(), rated.end(), [](const auto& a, const auto& b) { return a.release_key < b.release_key; });
    auto desc = report::complexity_descriptives(rated);
    auto tests = report::complexity_vs_type_tests(rated);
    auto langs = report::complexity_between_languages(rated);
    auto adoption = report::complexity_vs_adoption(rated, samples, c.analysis.table_offset);
    json cx{{"rated", rated.size()}};
    json lj{{"languages", langs.languages}};
    if (langs.anova) lj["anova"] = report::to_json(*langs.anova);
    else lj["anova_error"] = langs.anova_note;
    if (langs.pairwise) {
      json pairs = json::array();
      for (const auto& p : langs.pairwise->pairs) {
        json e{{"a", langs.languages[p.a]}, {"b", langs.languages[p.b]}};
        if (p.result) e["welch"] = report::to_json(*p.result);
        else e["error"] = p.error;
        pairs.push_back(std::move(e));
      }
      lj["pairwise"] = pairs;
      lj["highest"] = langs.pairwise->highest ? json(langs.languages[*langs.pairwise->highest]) : json(nullptr);
    }
    cx["between_languages"] = lj;
    json adj = json::array();
    for (const auto& a : adoption) {
      json e{{"language", a.language}};
      if (a.result) e["spearman"] = json{{"rho", a.result->rho}, {"p", a.result->p_value}, {"n", a.result->n}};
      else e["error"] = a.note;
      adj.push_back(std::move(e));
    }
    cx["rating_vs_log_difference"] = adj;
    doc["complexity"] = cx;
    const auto header = prov.comment_block();
    write_text_file(dir / files::kComplexityDescriptives, header + report::render_complexity_descriptives_csv(desc));
    write_text_file(dir / files::kComplexityTypeTests, header + report::render_type_tests_csv(tests));
  }

  const auto header = prov.comment_block();
  write_text_file(dir / files::kTableSizeText, header + report::render_summary_text(r.by_size));
  write_text_file(dir / files::kTableSizeCsv, header + report::render_summary_csv(r.by_size));
  write_text_file(dir / files::kTableSeriesText, header + report::render_summary_text(r.by_series));
  write_text_file(dir / files::kTableSeriesCsv, header + report::render_summary_csv(r.by_series));
  write_text_file(dir / files::kDemographics, header + report::render_demographics_csv(r.demographics));
  const std::string svg_comment = "<!--\n" + prov.comment_block("  ") + "-->\n";
  write_text_file(dir / files::kHeatmapSizeSvg,
                  svg_comment + report::render_heatmap_svg(r.heatmap_size, "Mean log-difference by package size"));
  write_text_file(dir / files::kHeatmapSeriesSvg,
                  svg_comment + report::render_heatmap_svg(r.heatmap_series, "Mean log-difference by version series"));
  {
    AtomicFile f(dir / files::kHeatmaps);
    f.stream() << json{{"provenance", prov.to_json()}}.dump() << '\n';
    auto hs = report::to_json(r.heatmap_size);
    hs["stratification"] = "size";
    auto hv = report::to_json(r.heatmap_series);
    hv["stratification"] = "series";
    f.stream() << hs.dump() << '\n' << hv.dump() << '\n';
    f.commit();
  }
  {
    AtomicFile f(dir / files::kTimepoints);
    f.stream() << json{{"provenance", prov.to_json()}}.dump() << '\n';
    for (const auto& t : r.timepoints_size) {
      auto j = report::to_json(t);
      j["stratification"] = "size";
      f.stream() << j.dump() << '\n';
    }
    for (const auto& t : r.timepoints_series) {
      auto j = report::to_json(t);
      j["stratification"] = "series";
      f.stream() << j.dump() << '\n';
    }
    f.commit();
  }
  write_text_file(dir / files::kAnalysis, doc.dump(2) + "\n");
  r.document = std::move(doc);
  return r;
}

// ---- all ------------------------------------------------------------------

struct AllResult {
  filter::CascadeResult filter;
  MetricsResult metrics;
  AnalyzeResult analyze;
  std::optional<ComplexityResult> complexity;
};

/// Every stage in order, reading each input once.
inline AllResult cmd_all(const PipelineConfig& c, const Logger& log = {}) {
  AllResult out;
  auto d = load_inputs(c, {}, log);
  out.filter = run_filter(c, d, log);
  auto digests = d.digests;
  digests.erase("releases");  // the metrics stage reads filtered releases only
  digests["filtered_releases"] = sha256_file(fs::path(c.output_dir) / files::kFilteredReleases);
  out.metrics = run_metrics(c, out.filter.releases, d, std::move(digests), log);
  d.edges.reset();
  if (c.complexity.enabled) out.complexity = cmd_complexity(c, log);
  out.analyze = cmd_analyze(c, log);
  return out;
}

}  // namespace depgrowth::pipeline
