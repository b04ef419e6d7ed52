// One-pass dependent counting over a large generated edge stream, checked
// against counts known by construction.
#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include "depgrowth/ingest/codec.hpp"
#include "depgrowth/ingest/dependent_stream.hpp"
#include "depgrowth/ingest/reader.hpp"
#include "depgrowth/ingest/repo_index.hpp"

namespace edge_stream {

using namespace depgrowth;

struct Shape {
  int days = 100;
  int packages = 1000;
  int per_group = 10;
  int pool = 500;  // distinct dependent repositories
  std::uint64_t edges() const {
    return static_cast<std::uint64_t>(days) * static_cast<std::uint64_t>(packages) *
           static_cast<std::uint64_t>(per_group);
  }
};

inline const Date kStart = Date::from_ymd(2021, 1, 1);

// Dependent j of package p. Distinct for j < per_group as long as 53 * per_group < pool.
inline int dependent_of(const Shape& s, int p, int j) { return (p * 7 + j * 53) % s.pool; }
// Every fifth repository has no stars; every seventh is a fork.
inline bool qualifies(int repo) { return repo % 5 != 0 && repo % 7 != 0; }

inline std::int64_t expected_count(const Shape& s, int p) {
  std::int64_t n = 0;
  for (int j = 0; j < s.per_group; ++j) n += qualifies(dependent_of(s, p, j));
  return n;
}

inline ingest::RepoIndex build_repos(const Shape& s) {
  ingest::RepoIndex idx;
  for (int r = 0; r < s.pool; ++r)
    for (int d = 0; d <= s.days + 7; d += 5) {
      RepoSnapshot snap;
      snap.snapshot_date = Date(kStart.days_since_epoch() + d);
      snap.owner = "dep";
      snap.name = "r" + std::to_string(r);
      snap.stars = r % 5 == 0 ? 0 : 3;
      snap.is_fork = r % 7 == 0;
      idx.add(std::move(snap));
    }
  idx.finalize();
  return idx;
}

/// Renders edge lines lazily in file order (date, ecosystem, package).
class GeneratedEdges final : public ingest::LineSource {
 public:
  explicit GeneratedEdges(Shape s) : s_(s) { line_.reserve(256); }

  std::optional<std::string_view> next_line() override {
    if (!header_done_) {
      header_done_ = true;
      line_ = ingest::schema_header(ingest::kEdgeSchema);
      return std::string_view(line_);
    }
    if (day_ >= s_.days) return std::nullopt;
    const Date d(kStart.days_since_epoch() + day_);
    char buf[256];
    const int n = std::snprintf(buf, sizeof buf,
                                "{\"snapshot_date\":\"%s\",\"dependent_owner\":\"dep\",\"dependent_repo\":\"r%d\","
                                "\"ecosystem\":\"npm\",\"package_name\":\"pkg%05d\"}",
                                d.iso().c_str(), dependent_of(s_, pkg_, j_), pkg_);
    line_.assign(buf, static_cast<std::size_t>(n));
    if (++j_ == s_.per_group) {
      j_ = 0;
      if (++pkg_ == s_.packages) {
        pkg_ = 0;
        ++day_;
      }
    }
    return std::string_view(line_);
  }
  std::string describe() const override { return "generated edges"; }

 private:
  Shape s_;
  std::string line_;
  bool header_done_ = false;
  int day_ = 0, pkg_ = 0, j_ = 0;
};

struct Outcome {
  std::uint64_t edges = 0;
  std::uint64_t groups = 0;
  std::uint64_t wrong_counts = 0;
  std::uint64_t violations = 0;
  double seconds = 0;
};

/// Streams every edge through the reader and the counting stream. The sink
/// compares each group with its constructed count and keeps nothing.
inline Outcome run(const Shape& s, const ingest::RepoIndex& repos) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  ingest::DependentCountStream stream(repos, [&](const ingest::DependentCountStream::GroupCount& g) {
    const int p = std::stoi(g.package_name.substr(3));
    if (g.dependents != expected_count(s, p)) ++out.wrong_counts;
  });
  auto reader = ingest::read_dependent_edges(std::make_unique<GeneratedEdges>(s));
  reader.for_each([&](DependentEdge&& e) { stream.push(e); },
                  [&](const ingest::SchemaViolation&) { ++out.violations; });
  stream.finish();
  out.edges = stream.edges_seen();
  out.groups = stream.groups_emitted();
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace edge_stream
