#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "depgrowth/ingest/reader.hpp"
#include "depgrowth/ingest/repo_index.hpp"

namespace depgrowth::ingest {

class DateOutOfRange : public std::out_of_range {
 public:
  explicit DateOutOfRange(Date d)
      : std::out_of_range("date " + d.iso() + " outside dependent-edge coverage"), date_(d) {}
  Date date() const { return date_; }

 private:
  Date date_;
};

inline std::string package_key(std::string_view ecosystem, std::string_view package) {
  std::string k;
  k.reserve(ecosystem.size() + package.size() + 1);
  k.append(ecosystem).push_back(':');
  k.append(package);
  return k;
}

/// First-order dependent edges, grouped per (ecosystem, package) into dated
/// observations. Each observation holds the distinct dependent repositories
/// seen that day. A package's count on a day uses the observation on that day
/// or, failing that, the latest one at most kSnapshotLookbackDays earlier.
class DependentIndex {
 public:
  struct Stats {
    std::uint64_t edges = 0;
    std::uint64_t duplicate_edges = 0;
    std::uint64_t unknown_dependents = 0;
  };

  /// Edges must reference repositories through `repos`; dependents with no
  /// snapshot at all can never qualify and are dropped (and tallied).
  explicit DependentIndex(const RepoIndex& repos) : repos_(&repos) {}

  void add(const DependentEdge& e) {
    ++stats_.edges;
    update_coverage(e.snapshot_date);
    const auto id = repos_->find(e.dependent_owner, e.dependent_repo);
    auto& pkg = staging_[package_key(e.ecosystem, e.package_name)];
    if (!id) {
      ++stats_.unknown_dependents;
      // Still record that the package was observed on this day.
      pkg.emplace_back(e.snapshot_date, kNoRepo);
      return;
    }
    pkg.emplace_back(e.snapshot_date, *id);
  }

  /// Records that a day was captured even if it carried no edges.
  void mark_covered(Date d) { update_coverage(d); }

  void finalize() {
    for (auto& [key, pairs] : staging_) {
      std::sort(pairs.begin(), pairs.end());
      const auto before = pairs.size();
      pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
      stats_.duplicate_edges += before - pairs.size();
      Series s;
      for (std::size_t i = 0; i < pairs.size();) {
        const Date day = pairs[i].first;
        s.dates.push_back(day);
        s.begin.push_back(static_cast<std::uint32_t>(s.dependents.size()));
        for (; i < pairs.size() && pairs[i].first == day; ++i)
          if (pairs[i].second != kNoRepo) s.dependents.push_back(pairs[i].second);
      }
      s.begin.push_back(static_cast<std::uint32_t>(s.dependents.size()));
      series_.emplace(key, std::move(s));
    }
    staging_.clear();
  }

  template <typename OnError>
  static DependentIndex build(RecordReader<DependentEdge>& reader, const RepoIndex& repos,
                              OnError&& on_error) {
    DependentIndex idx(repos);
    reader.for_each([&](DependentEdge&& e) { idx.add(e); }, on_error);
    idx.finalize();
    return idx;
  }

  bool covers(Date d) const { return first_ && d >= *first_ && d <= *last_; }
  std::optional<Date> first_date() const { return first_; }
  std::optional<Date> last_date() const { return last_; }

  /// Distinct dependents observed for the package on the joined day; nullopt
  /// when there is no observation inside the look-back window.
  std::optional<std::span<const RepoId>> observation(std::string_view ecosystem,
                                                     std::string_view package, Date d) const {
    auto it = series_.find(package_key(ecosystem, package));
    if (it == series_.end()) return std::nullopt;
    const Series& s = it->second;
    auto pos = std::upper_bound(s.dates.begin(), s.dates.end(), d);
    if (pos == s.dates.begin()) return std::nullopt;
    --pos;
    if (d - *pos > kSnapshotLookbackDays) return std::nullopt;
    const auto i = static_cast<std::size_t>(pos - s.dates.begin());
    return std::span<const RepoId>(s.dependents.data() + s.begin[i], s.begin[i + 1] - s.begin[i]);
  }

  /// Number of distinct non-fork, starred dependents of the package on `d`.
  /// Throws DateOutOfRange outside the captured date range.
  std::int64_t count(std::string_view ecosystem, std::string_view package, Date d) const {
    if (!covers(d)) throw DateOutOfRange(d);
    auto obs = observation(ecosystem, package, d);
    return obs ? count_qualifying(*obs, d) : 0;
  }

  /// Like count(), but absent (rather than zero or an error) when the day is
  /// outside coverage or the package has no observation in the window.
  std::optional<std::int64_t> lookup(std::string_view ecosystem, std::string_view package,
                                     Date d) const {
    if (!covers(d)) return std::nullopt;
    auto obs = observation(ecosystem, package, d);
    if (!obs) return std::nullopt;
    return count_qualifying(*obs, d);
  }

  const Stats& stats() const { return stats_; }
  std::size_t package_count() const { return series_.size(); }

 private:
  struct Series {
    std::vector<Date> dates;
    std::vector<std::uint32_t> begin;  // dates.size() + 1 offsets into dependents
    std::vector<RepoId> dependents;
  };

  std::int64_t count_qualifying(std::span<const RepoId> deps, Date d) const {
    std::int64_t n = 0;
    for (RepoId id : deps) {
      const auto* snap = repos_->nearest(id, d);
      if (snap && snap->qualifies()) ++n;
    }
    return n;
  }

  void update_coverage(Date d) {
    if (!first_ || d < *first_) first_ = d;
    if (!last_ || d > *last_) last_ = d;
  }

  const RepoIndex* repos_;
  std::unordered_map<std::string, std::vector<std::pair<Date, RepoId>>> staging_;
  std::unordered_map<std::string, Series> series_;
  std::optional<Date> first_;
  std::optional<Date> last_;
  Stats stats_;
};

inline std::int64_t count_dependents(std::string_view package_name, std::string_view ecosystem,
                                     Date date, const DependentIndex& edges) {
  return edges.count(ecosystem, package_name, date);
}

}  // namespace depgrowth::ingest
