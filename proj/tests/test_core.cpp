#include <chrono>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "depgrowth/filter.hpp"
#include "depgrowth/ingest/dependent_index.hpp"
#include "depgrowth/ingest/dependent_stream.hpp"
#include "depgrowth/ingest/reader.hpp"
#include "depgrowth/ingest/repo_index.hpp"
#include "depgrowth/metrics.hpp"
#include "depgrowth/semver.hpp"
#include "support/oracles.hpp"

using namespace depgrowth;
namespace sv = depgrowth::semver;

namespace {

Date day(const char* iso) { return *Date::parse(iso); }

RepoSnapshot snap(const char* d, const std::string& owner, const std::string& name, std::int64_t stars,
                  bool fork = false, std::int64_t forks = 0) {
  RepoSnapshot s;
  s.snapshot_date = day(d);
  s.owner = owner;
  s.name = name;
  s.stars = stars;
  s.forks = forks;
  s.is_fork = fork;
  return s;
}

DependentEdge edge(const char* d, const std::string& dep, const std::string& eco, const std::string& pkg) {
  return {day(d), "o", dep, eco, pkg};
}

PackageRelease release(const char* d, const std::string& eco, const std::string& pkg, const std::string& version,
                       const std::string& repo = "") {
  PackageRelease r;
  r.release_date = day(d);
  r.ecosystem = eco;
  r.package_name = pkg;
  r.owner = "o";
  r.repo_name = repo.empty() ? pkg : repo;
  r.version_text = version;
  return r;
}

}  // namespace

// ---- semver ---------------------------------------------------------------

TEST(Semver, ExhaustiveSmallGridMatchesRuleTable) {
  const auto t0 = std::chrono::steady_clock::now();
  int checked = 0;
  for (std::uint64_t a = 0; a <= 5; ++a)
    for (std::uint64_t b = 0; b <= 5; ++b)
      for (std::uint64_t c = 0; c <= 5; ++c) {
        const std::string text = std::to_string(a) + "." + std::to_string(b) + "." + std::to_string(c);
        const auto v = sv::parse_version(text);
        EXPECT_EQ(sv::to_string(sv::classify_release(v)), oracle::rule_table_type(a, b, c)) << text;
        EXPECT_EQ(sv::to_string(sv::version_series(v)), oracle::rule_table_series(a)) << text;
        ++checked;
      }
  EXPECT_EQ(checked, 216);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
}

TEST(Semver, RandomVersionsMatchConstruction) {
  for (const auto& c : oracle::random_versions(1000, 99)) {
    auto r = sv::try_parse_version(c.text);
    switch (c.outcome) {
      case oracle::VersionCase::Valid: {
        ASSERT_TRUE(std::holds_alternative<sv::Version>(r)) << c.text;
        const auto& v = std::get<sv::Version>(r);
        EXPECT_EQ(v.major, c.major);
        EXPECT_EQ(v.minor, c.minor);
        EXPECT_EQ(v.patch, c.patch);
        EXPECT_EQ(sv::to_string(sv::classify_release(v)), oracle::rule_table_type(c.major, c.minor, c.patch));
        break;
      }
      case oracle::VersionCase::PreRelease:
        ASSERT_TRUE(std::holds_alternative<sv::VersionErrc>(r)) << c.text;
        EXPECT_EQ(std::get<sv::VersionErrc>(r), sv::VersionErrc::PreReleaseExcluded) << c.text;
        break;
      case oracle::VersionCase::Malformed:
        ASSERT_TRUE(std::holds_alternative<sv::VersionErrc>(r)) << c.text;
        EXPECT_EQ(std::get<sv::VersionErrc>(r), sv::VersionErrc::MalformedVersion) << c.text;
        break;
    }
  }
}

TEST(Semver, ExamplesAndErrors) {
  EXPECT_EQ(sv::classify_release(sv::parse_version("2.0.0")), sv::ReleaseType::Major);
  EXPECT_EQ(sv::classify_release(sv::parse_version("1.4.0")), sv::ReleaseType::Minor);
  EXPECT_EQ(sv::classify_release(sv::parse_version("1.4.2")), sv::ReleaseType::Patch);
  EXPECT_EQ(sv::classify_release(sv::parse_version("0.3.0")), sv::ReleaseType::ZeroMajor);
  EXPECT_EQ(sv::classify_release(sv::parse_version("0.3.1")), sv::ReleaseType::ZeroMinor);
  EXPECT_EQ(sv::classify_release(sv::parse_version("0.0.1"), sv::ZeroRule::MinorSplit), sv::ReleaseType::ZeroMajor);
  EXPECT_EQ(sv::classify_release(sv::parse_version("0.2.1"), sv::ZeroRule::MinorSplit), sv::ReleaseType::ZeroMinor);
  EXPECT_EQ(sv::parse_version("v1.2.3+build.5"), (sv::Version{1, 2, 3, {}}));
  EXPECT_EQ(sv::parse_version("18446744073709551615.0.0").major, 18446744073709551615ull);

  auto code = [](const char* text) {
    try {
      sv::parse_version(text);
    } catch (const sv::VersionError& e) {
      return e.code();
    }
    ADD_FAILURE() << "accepted " << text;
    return sv::VersionErrc::MalformedVersion;
  };
  EXPECT_EQ(code("1.2.3-rc.1"), sv::VersionErrc::PreReleaseExcluded);
  EXPECT_EQ(code("1.2.3-"), sv::VersionErrc::MalformedVersion);
  EXPECT_EQ(code("1.2"), sv::VersionErrc::MalformedVersion);
  EXPECT_EQ(code("01.2.3"), sv::VersionErrc::MalformedVersion);
  EXPECT_EQ(code(""), sv::VersionErrc::MalformedVersion);
  EXPECT_EQ(code("v"), sv::VersionErrc::MalformedVersion);
  EXPECT_EQ(code("1.2.3+"), sv::VersionErrc::MalformedVersion);
  EXPECT_EQ(code("18446744073709551616.0.0"), sv::VersionErrc::MalformedVersion);
  EXPECT_EQ(code(" 1.2.3"), sv::VersionErrc::MalformedVersion);
}

TEST(Semver, AgainstPreviousAndColumns) {
  auto t = [](const char* a, const char* b) {
    return sv::classify_against_previous(sv::parse_version(a), sv::parse_version(b));
  };
  EXPECT_EQ(t("1.9.9", "2.0.0"), sv::ReleaseType::Major);
  EXPECT_EQ(t("1.2.3", "1.3.0"), sv::ReleaseType::Minor);
  EXPECT_EQ(t("1.2.3", "1.2.4"), sv::ReleaseType::Patch);
  EXPECT_EQ(t("0.2.3", "0.3.0"), sv::ReleaseType::ZeroMajor);
  EXPECT_EQ(t("0.2.3", "0.2.4"), sv::ReleaseType::ZeroMinor);
  EXPECT_EQ(t("1.2.3", "1.2.3"), sv::ReleaseType::Patch);  // falls back to the version itself
  EXPECT_EQ(sv::report_column(sv::ReleaseType::ZeroMajor), sv::ReportColumn::Major);
  EXPECT_EQ(sv::report_column(sv::ReleaseType::ZeroMinor), sv::ReportColumn::Minor);
  for (auto r : sv::kAllReleaseTypes) EXPECT_EQ(sv::release_type_from_string(sv::to_string(r)), r);
  for (auto s : sv::kAllSeries) EXPECT_EQ(sv::series_from_string(sv::to_string(s)), s);
}

// ---- codec and reader -----------------------------------------------------

TEST(Reader, HeaderViolationsAndBlankLines) {
  const std::string text = std::string(ingest::schema_header(ingest::kEdgeSchema)) + "\n" +
                           R"({"snapshot_date":"2022-01-01","dependent_owner":"a","dependent_repo":"b","ecosystem":"npm","package_name":"p"})"
                           "\n\n"
                           R"({"snapshot_date":"2022-02-30","dependent_owner":"a","dependent_repo":"b","ecosystem":"npm","package_name":"p"})"
                           "\n"
                           R"({"snapshot_date":"2022-01-01","dependent_owner":"a","dependent_repo":"b","ecosystem":"NPM","package_name":"p"})"
                           "\nnot json\n"
                           R"({"snapshot_date":"2022-01-02","dependent_owner":"a","dependent_repo":"b","ecosystem":"npm","package_name":"q"})";
  auto reader = ingest::read_dependent_edges(std::make_unique<ingest::StringLineSource>(text));
  auto got = ingest::collect(reader);
  ASSERT_EQ(got.records.size(), 2u);
  EXPECT_EQ(got.records[1].package_name, "q");
  ASSERT_EQ(got.errors.size(), 3u);
  EXPECT_EQ(got.errors[0].record_index, 1u);
  EXPECT_EQ(got.errors[0].line, 4u);
  EXPECT_EQ(got.errors[2].reason, "invalid JSON");
}

TEST(Reader, WrongSchemaThrowsAndMissingHeaderIsFine) {
  auto bad = ingest::read_releases(
      std::make_unique<ingest::StringLineSource>(ingest::schema_header(ingest::kEdgeSchema) + "\n"));
  try {
    bad.next();
    FAIL();
  } catch (const ingest::IngestError& e) {
    EXPECT_EQ(e.code(), ingest::IngestErrc::IncompatibleSchema);
  }
  auto empty = ingest::read_releases(std::make_unique<ingest::StringLineSource>(""));
  EXPECT_FALSE(empty.next().has_value());
  auto bare = ingest::read_repo_snapshots(std::make_unique<ingest::StringLineSource>(
      R"({"snapshot_date":"2022-01-01","owner":"o","name":"n","stars":3,"forks":1,"is_fork":false,"topics":["a"]})"));
  auto got = ingest::collect(bare);
  ASSERT_EQ(got.records.size(), 1u);
  EXPECT_EQ(got.records[0].topics, std::vector<std::string>{"a"});
}

TEST(Codec, FieldTypesAreStrict) {
  EXPECT_TRUE(std::holds_alternative<std::string>(ingest::decode_repo_snapshot(
      R"({"snapshot_date":"2022-01-01","owner":"o","name":"n","stars":true,"forks":1,"is_fork":false})")));
  EXPECT_TRUE(std::holds_alternative<std::string>(ingest::decode_repo_snapshot(
      R"({"snapshot_date":"2022-01-01","owner":"o","name":"n","stars":-1,"forks":1,"is_fork":false})")));
  EXPECT_TRUE(std::holds_alternative<std::string>(ingest::decode_repo_snapshot(
      R"({"snapshot_date":"2022-01-01","owner":"","name":"n","stars":1,"forks":1,"is_fork":false})")));
  EXPECT_TRUE(std::holds_alternative<std::string>(ingest::decode_release(
      R"({"release_date":"2022-1-01","ecosystem":"npm","package_name":"p","owner":"o","repo_name":"p","version":"1.0.0"})")));
  auto ok = ingest::decode_release(
      R"({"release_date":"2022-01-01","ecosystem":"npm","package_name":"p","owner":"o","repo_name":"p","version":"1.0.0","release_notes":null})");
  ASSERT_TRUE(std::holds_alternative<PackageRelease>(ok));
  EXPECT_FALSE(std::get<PackageRelease>(ok).release_notes.has_value());

  RepoSnapshot s = snap("2022-03-04", "o", "n", 7, false, 2);
  s.description = "d";
  s.topics = {"x", "y"};
  auto round = ingest::decode_repo_snapshot(ingest::to_json(s).dump());
  ASSERT_TRUE(std::holds_alternative<RepoSnapshot>(round));
  EXPECT_EQ(std::get<RepoSnapshot>(round).topics, s.topics);
  EXPECT_EQ(std::get<RepoSnapshot>(round).description, s.description);
}

// ---- joins ----------------------------------------------------------------

TEST(RepoIndex, NearestSnapshotWindow) {
  ingest::RepoIndex idx;
  idx.add(snap("2022-01-10", "o", "r", 5));
  idx.add(snap("2022-01-01", "o", "r", 1));
  idx.add(snap("2022-01-10", "o", "r", 99));  // duplicate day, first wins
  idx.finalize();
  EXPECT_EQ(idx.duplicate_snapshots(), 1u);
  EXPECT_EQ(idx.nearest("o", "r", day("2022-01-10"))->stars, 5);
  EXPECT_EQ(idx.nearest("o", "r", day("2022-01-13"))->stars, 5);   // 3 days back
  EXPECT_EQ(idx.nearest("o", "r", day("2022-01-17"))->stars, 5);   // 7 days back
  EXPECT_EQ(idx.nearest("o", "r", day("2022-01-20")), nullptr);    // 10 days back
  EXPECT_EQ(idx.nearest("o", "r", day("2021-12-31")), nullptr);    // never after
  EXPECT_EQ(idx.nearest("o", "missing", day("2022-01-10")), nullptr);
  auto full = ingest::nearest_repo_snapshot("o", "r", day("2022-01-05"), idx);
  ASSERT_TRUE(full);
  EXPECT_EQ(full->snapshot_date, day("2022-01-01"));
}

namespace {

struct Graph {
  ingest::RepoIndex repos;
  std::unique_ptr<ingest::DependentIndex> deps;
};

// pkg "p" on 2022-01-10: a (ok), b (fork), c (zero stars), a again, ghost
// (unknown). Coverage 2022-01-01 .. 2022-03-01.
std::unique_ptr<Graph> small_graph() {
  auto g = std::make_unique<Graph>();
  g->repos.add(snap("2022-01-08", "o", "a", 3));
  g->repos.add(snap("2022-01-08", "o", "b", 3, true));
  g->repos.add(snap("2022-01-08", "o", "c", 0));
  g->repos.add(snap("2022-01-15", "o", "c", 2));
  g->repos.finalize();
  g->deps = std::make_unique<ingest::DependentIndex>(g->repos);
  g->deps->add(edge("2022-01-01", "a", "npm", "other"));
  for (const char* d : {"a", "b", "c", "a", "ghost"}) g->deps->add(edge("2022-01-10", d, "npm", "p"));
  g->deps->add(edge("2022-03-01", "a", "npm", "other"));
  g->deps->finalize();
  return g;
}

}  // namespace

TEST(DependentIndex, ForksZeroStarsDuplicatesAndUnknowns) {
  auto g = small_graph();
  EXPECT_EQ(g->deps->count("npm", "p", day("2022-01-10")), 1);
  EXPECT_EQ(g->deps->stats().duplicate_edges, 1u);
  EXPECT_EQ(g->deps->stats().unknown_dependents, 1u);
  // c is starred from 2022-01-15; qualification is judged on the query day.
  EXPECT_EQ(g->deps->count("npm", "p", day("2022-01-15")), 2);
  // On 2022-01-17 the observation still joins but a's snapshot is 9 days old.
  EXPECT_EQ(g->deps->count("npm", "p", day("2022-01-17")), 1);
  // Observation window: 7 days back from the query day.
  EXPECT_EQ(g->deps->lookup("npm", "p", day("2022-01-18")), std::nullopt);
  EXPECT_EQ(g->deps->count("npm", "p", day("2022-01-18")), 0);
  EXPECT_EQ(g->deps->lookup("npm", "p", day("2022-01-09")), std::nullopt);
  EXPECT_EQ(ingest::count_dependents("p", "npm", day("2022-01-10"), *g->deps), 1);
}

TEST(DependentIndex, CoverageBounds) {
  auto g = small_graph();
  EXPECT_TRUE(g->deps->covers(day("2022-01-01")));
  EXPECT_TRUE(g->deps->covers(day("2022-03-01")));
  EXPECT_FALSE(g->deps->covers(day("2022-03-02")));
  EXPECT_THROW(g->deps->count("npm", "p", day("2021-12-31")), ingest::DateOutOfRange);
  EXPECT_EQ(g->deps->lookup("npm", "p", day("2022-03-02")), std::nullopt);
  EXPECT_EQ(g->deps->count("npm", "nobody", day("2022-02-01")), 0);
}

TEST(DependentCountStream, MatchesIndexAndRejectsDisorder) {
  auto g = small_graph();
  std::vector<ingest::DependentCountStream::GroupCount> got;
  ingest::DependentCountStream stream(g->repos, [&](const auto& c) { got.push_back(c); });
  stream.push(edge("2022-01-01", "a", "npm", "other"));
  for (const char* d : {"a", "b", "c", "a", "ghost"}) stream.push(edge("2022-01-10", d, "npm", "p"));
  stream.push(edge("2022-01-10", "a", "pypi", "p"));
  stream.finish();
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[1].package_name, "p");
  EXPECT_EQ(got[1].dependents, g->deps->count("npm", "p", day("2022-01-10")));
  EXPECT_EQ(got[2].ecosystem, "pypi");
  EXPECT_EQ(stream.edges_seen(), 7u);

  ingest::DependentCountStream bad(g->repos, [](const auto&) {});
  bad.push(edge("2022-01-10", "a", "npm", "p"));
  try {
    bad.push(edge("2022-01-09", "a", "npm", "p"));
    FAIL();
  } catch (const ingest::IngestError& e) {
    EXPECT_EQ(e.code(), ingest::IngestErrc::OutOfOrder);
  }
}

// ---- filters --------------------------------------------------------------

namespace {

// Repos for packages with dependents counted on 2022-06-09: "big" has 6,
// "tiny" has 2.
std::unique_ptr<Graph> filter_graph() {
  auto g = std::make_unique<Graph>();
  for (const char* r : {"big", "tiny", "Tiny_Pkg", "forked", "nostar", "other"}) {
    g->repos.add(snap("2022-06-05", "o", r, std::string(r) == "nostar" ? 0 : 10, std::string(r) == "forked"));
  }
  for (int i = 0; i < 6; ++i) g->repos.add(snap("2022-06-05", "o", "d" + std::to_string(i), 1));
  g->repos.finalize();
  g->deps = std::make_unique<ingest::DependentIndex>(g->repos);
  g->deps->mark_covered(day("2022-01-01"));
  for (int i = 0; i < 6; ++i) g->deps->add(edge("2022-06-09", "d" + std::to_string(i), "npm", "big"));
  for (int i = 0; i < 2; ++i) g->deps->add(edge("2022-06-09", "d" + std::to_string(i), "npm", "tiny"));
  g->deps->mark_covered(day("2022-12-31"));
  g->deps->finalize();
  return g;
}

std::vector<PackageRelease> filter_releases() {
  return {
      release("2022-06-10", "npm", "big", "1.2.0"),
      release("2022-06-10", "npm", "tiny", "1.0.1"),
      release("2022-06-10", "npm", "forked", "1.0.0"),
      release("2022-06-10", "npm", "nostar", "1.0.0"),
      release("2022-06-10", "npm", "nosnap", "1.0.0"),
      release("2022-06-10", "npm", "big", "1.3.0-rc.1"),
      release("2022-06-10", "npm", "big", "1.x"),
      release("2022-06-10", "pypi", "tiny-pkg", "2.0.0", "Tiny_Pkg"),
      release("2022-06-10", "npm", "mismatch", "2.0.0", "other"),
      release("2022-06-11", "npm", "big", "1.3.0"),
      release("2022-06-11", "npm", "big", "1.3.1"),
      release("2022-06-12", "maven", "other", "1.0.0"),
      release("2023-06-12", "npm", "big", "1.4.0"),
  };
}

}  // namespace

TEST(Filter, CascadeCountsAndOrder) {
  auto g = filter_graph();
  auto r = filter::run_cascade(filter_releases(), g->repos, *g->deps, {});
  ASSERT_EQ(r.reports.size(), 6u);
  const char* names[] = {"repo_quality", "semver", "name_match", "same_day_dedup", "ecosystems", "min_dependents"};
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(r.reports[i].stage_name, names[i]);
    EXPECT_TRUE(r.reports[i].conserved());
    if (i > 0) EXPECT_EQ(r.reports[i].records_in, r.reports[i - 1].records_out);
  }
  EXPECT_EQ(r.reports[0].reasons.at("NoSnapshot"), 2u);
  EXPECT_EQ(r.reports[0].reasons.at("ForkedRepo"), 1u);
  EXPECT_EQ(r.reports[0].reasons.at("LowEngagement"), 1u);
  EXPECT_EQ(r.reports[1].reasons.at("PreReleaseExcluded"), 1u);
  EXPECT_EQ(r.reports[1].reasons.at("MalformedVersion"), 1u);
  EXPECT_EQ(r.reports[2].reasons.at("NameMismatch"), 1u);
  EXPECT_EQ(r.reports[3].reasons.at("SameDayRelease"), 2u);
  EXPECT_EQ(r.reports[4].reasons.at("EcosystemExcluded"), 1u);
  EXPECT_EQ(r.reports[5].reasons.at("BelowThreshold"), 2u);  // tiny (2) and pypi tiny-pkg (0)
  ASSERT_EQ(r.releases.size(), 1u);
  EXPECT_EQ(r.releases[0].release.version_text, "1.2.0");
  EXPECT_EQ(r.releases[0].pre_dependents, 6);
  EXPECT_EQ(r.releases[0].release_type, sv::ReleaseType::Minor);
}

TEST(Filter, ThresholdEdgeAndCoverage) {
  auto g = filter_graph();
  std::vector<filter::CandidateRelease> in = filter::as_candidates(
      {release("2022-06-10", "npm", "big", "1.0.0"), release("2023-02-01", "npm", "big", "1.0.0")});
  auto at6 = filter::filter_min_dependents(in, *g->deps, 6);
  EXPECT_EQ(at6.report.records_out, 1u);
  EXPECT_EQ(at6.report.reasons.at("OutOfCoverage"), 1u);
  auto at7 = filter::filter_min_dependents(in, *g->deps, 7);
  EXPECT_EQ(at7.report.reasons.at("BelowThreshold"), 1u);
  auto at0 = filter::filter_min_dependents(in, *g->deps, 0);
  EXPECT_EQ(at0.report.records_out, 2u);
  EXPECT_FALSE(at0.releases[1].pre_dependents.has_value());
}

TEST(Filter, NameNormalisationAndDedup) {
  EXPECT_EQ(filter::normalize_name("Foo_Bar-baz"), "foo-bar-baz");
  auto r = filter::dedup_same_day(filter::as_candidates({
      release("2022-01-01", "npm", "a", "1.0.0"),
      release("2022-01-01", "npm", "a", "1.0.1"),
      release("2022-01-01", "pypi", "a", "1.0.0"),
      release("2022-01-02", "npm", "a", "1.0.2"),
  }));
  EXPECT_EQ(r.report.records_out, 2u);
  EXPECT_EQ(r.report.reasons.at("SameDayRelease"), 2u);
}

TEST(Filter, ConservationAndIdempotenceOnEveryStage) {
  auto g = filter_graph();
  auto first = filter::run_cascade(filter_releases(), g->repos, *g->deps, {});
  std::vector<PackageRelease> kept;
  for (const auto& c : first.releases) kept.push_back(c.release);
  auto second = filter::run_cascade(kept, g->repos, *g->deps, {});
  for (const auto& rep : second.reports) {
    EXPECT_TRUE(rep.conserved());
    EXPECT_EQ(rep.records_in, rep.records_out) << rep.stage_name;
  }
  filter::FilterReport a{"s", 5, 3, {{"X", 2}}}, b{"s", 4, 4, {}};
  a.merge(b);
  EXPECT_EQ(a.records_in, 9u);
  EXPECT_TRUE(a.conserved());
}

TEST(Filter, AgainstPreviousClassification) {
  filter::SemverOptions opts;
  opts.classification = filter::Classification::AgainstPrevious;
  auto r = filter::filter_semver(filter::as_candidates({
                                     release("2022-01-05", "npm", "a", "1.1.0"),
                                     release("2022-01-01", "npm", "a", "1.0.0"),
                                     release("2022-01-09", "npm", "a", "2.0.1"),
                                 }),
                                 opts);
  EXPECT_EQ(r.releases[0].release_type, sv::ReleaseType::Minor);
  EXPECT_EQ(r.releases[1].release_type, sv::ReleaseType::Major);  // first release, from the string
  EXPECT_EQ(r.releases[2].release_type, sv::ReleaseType::Major);
}

// ---- metrics --------------------------------------------------------------

TEST(Metrics, SizeBinBoundaries) {
  using metrics::SizeBin;
  const std::pair<std::int64_t, SizeBin> cases[] = {
      {0, SizeBin::Small},     {5, SizeBin::Small},      {99, SizeBin::Small},   {100, SizeBin::Medium},
      {999, SizeBin::Medium},  {1000, SizeBin::Large},   {9999, SizeBin::Large}, {10000, SizeBin::Huge},
      {1000000, SizeBin::Huge}};
  for (auto [n, bin] : cases) EXPECT_EQ(metrics::size_bin(n), bin) << n;
  for (auto b : metrics::kAllSizeBins) EXPECT_EQ(metrics::size_bin_from_string(metrics::to_string(b)), b);
}

TEST(Metrics, GridsAndOffsets) {
  EXPECT_EQ(metrics::kOneYear.offsets(), (std::vector<std::int32_t>{90, 180, 270, 360}));
  EXPECT_EQ(metrics::kSixMonths.offsets(), (std::vector<std::int32_t>{45, 90, 135, 180}));
  EXPECT_EQ(metrics::kTwoYears.offsets(), (std::vector<std::int32_t>{180, 360, 540, 720}));
  EXPECT_EQ(metrics::measured_offsets({metrics::kOneYear}, {365}),
            (std::vector<std::int32_t>{0, 90, 180, 270, 360, 365}));
  EXPECT_FALSE(metrics::is_supported({100, 10}));
}

TEST(Metrics, LogDifferenceIdentities) {
  EXPECT_NEAR(metrics::log_difference(100, 150), std::log(1.5), 1e-12);
  EXPECT_EQ(metrics::log_difference(37, 37), 0.0);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::int64_t a = 1 + static_cast<std::int64_t>(rng() % 100000);
    const std::int64_t b = 1 + static_cast<std::int64_t>(rng() % 100000);
    const std::int64_t c = 1 + static_cast<std::int64_t>(rng() % 100000);
    EXPECT_NEAR(metrics::log_difference(a, b), -metrics::log_difference(b, a), 1e-12);
    EXPECT_NEAR(metrics::log_difference(a, b) + metrics::log_difference(b, c), metrics::log_difference(a, c), 1e-12);
  }
  EXPECT_THROW(metrics::log_difference(0, 5), metrics::NonPositiveInput);
  EXPECT_THROW(metrics::log_difference(5, -1), metrics::NonPositiveInput);
}

TEST(Metrics, RecordsSamplesAndExclusions) {
  ingest::RepoIndex repos;
  for (int i = 0; i < 8; ++i) {
    repos.add(snap("2022-06-05", "o", "d" + std::to_string(i), 1));
    repos.add(snap("2022-09-05", "o", "d" + std::to_string(i), 1));
  }
  repos.add(snap("2022-06-09", "o", "big", 10, false, 4));
  repos.add(snap("2022-09-08", "o", "big", 20, false, 0));
  repos.finalize();
  ingest::DependentIndex deps(repos);
  for (int i = 0; i < 5; ++i) deps.add(edge("2022-06-09", "d" + std::to_string(i), "npm", "big"));
  for (int i = 0; i < 8; ++i) deps.add(edge("2022-09-08", "d" + std::to_string(i), "npm", "big"));
  deps.mark_covered(day("2023-12-31"));
  deps.finalize();

  auto cands = filter::filter_min_dependents(
      filter::filter_semver(filter::as_candidates({release("2022-06-10", "npm", "big", "1.0.0")})).releases, deps);
  ASSERT_EQ(cands.releases.size(), 1u);
  auto built = metrics::build_release_records(cands.releases, repos, deps, std::vector<std::int32_t>{0, 90, 180});
  ASSERT_EQ(built.records.size(), 1u);
  const auto& rec = built.records[0];
  EXPECT_EQ(rec.pre_dependents, 5);
  EXPECT_EQ(rec.value(metrics::Metric::Dependents, 0), 5);
  EXPECT_EQ(rec.value(metrics::Metric::Dependents, 90), 8);       // 2022-09-08 is exactly +90
  EXPECT_EQ(rec.value(metrics::Metric::Dependents, 180), std::nullopt);
  EXPECT_EQ(rec.value(metrics::Metric::Stars, 90), 20);
  EXPECT_EQ(rec.value(metrics::Metric::Forks, 0), 4);
  EXPECT_EQ(rec.release.key(), "npm:big@1.0.0#2022-06-10");

  auto dep90 = metrics::log_diff_samples(built.records, metrics::Metric::Dependents, 90);
  ASSERT_EQ(dep90.samples.size(), 1u);
  EXPECT_NEAR(dep90.samples[0].value, std::log(8.0 / 5.0), 1e-12);
  EXPECT_EQ(metrics::log_diff_samples(built.records, metrics::Metric::Dependents, 180).excluded.missing_value, 1u);
  EXPECT_EQ(metrics::log_diff_samples(built.records, metrics::Metric::Forks, 90).excluded.nonpositive, 1u);
  auto no_base = built.records;
  no_base[0].metric_values.erase({metrics::Metric::Stars, 0});
  EXPECT_EQ(metrics::log_diff_samples(no_base, metrics::Metric::Stars, 90).excluded.missing_baseline, 1u);
}
