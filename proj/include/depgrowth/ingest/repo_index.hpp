#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "depgrowth/ingest/reader.hpp"
#include "depgrowth/records.hpp"

namespace depgrowth::ingest {

/// Snapshot joins accept an exact-day match, else the latest snapshot strictly
/// before the day and at most this many days earlier.
inline constexpr std::int32_t kSnapshotLookbackDays = 7;

using RepoId = std::uint32_t;
inline constexpr RepoId kNoRepo = static_cast<RepoId>(-1);

inline std::string repo_key(std::string_view owner, std::string_view name) {
  std::string k;
  k.reserve(owner.size() + name.size() + 1);
  k.append(owner).push_back('/');
  k.append(name);
  return k;
}

/// Daily repository snapshots keyed by owner/name. Built once, then immutable.
class RepoIndex {
 public:
  struct Meta {
    std::optional<std::string> description;
    std::vector<std::string> topics;
    std::optional<std::string> language;
    bool operator==(const Meta&) const = default;
  };

  struct Entry {
    Date date;
    std::int64_t stars = 0;
    std::int64_t forks = 0;
    bool is_fork = false;
    std::uint32_t meta = 0;

    bool qualifies() const { return !is_fork && stars >= 1; }
  };

  void add(RepoSnapshot s) {
    const auto key = repo_key(s.owner, s.name);
    auto [it, inserted] = ids_.try_emplace(key, static_cast<RepoId>(repos_.size()));
    if (inserted) {
      repos_.push_back({});
      names_.push_back({s.owner, s.name});
    }
    auto& series = repos_[it->second];
    Meta meta{std::move(s.description), std::move(s.topics), std::move(s.language)};
    std::uint32_t meta_id = 0;
    if (!series.empty() && metas_[series.back().meta] == meta) {
      meta_id = series.back().meta;
    } else if (meta == Meta{}) {
      meta_id = 0;
    } else {
      meta_id = static_cast<std::uint32_t>(metas_.size());
      metas_.push_back(std::move(meta));
    }
    if (!series.empty() && series.back().date >= s.snapshot_date) sorted_ = false;
    series.push_back(Entry{s.snapshot_date, s.stars, s.forks, s.is_fork, meta_id});
    ++snapshot_count_;
  }

  /// Sorts each series by date and drops same-day duplicates (first wins).
  void finalize() {
    if (sorted_) return;
    for (auto& series : repos_) {
      std::stable_sort(series.begin(), series.end(),
                       [](const Entry& a, const Entry& b) { return a.date < b.date; });
      auto last = std::unique(series.begin(), series.end(),
                              [](const Entry& a, const Entry& b) { return a.date == b.date; });
      duplicates_ += static_cast<std::size_t>(series.end() - last);
      series.erase(last, series.end());
    }
    sorted_ = true;
  }

  template <typename OnError>
  static RepoIndex build(RecordReader<RepoSnapshot>& reader, OnError&& on_error) {
    RepoIndex idx;
    reader.for_each([&](RepoSnapshot&& s) { idx.add(std::move(s)); }, on_error);
    idx.finalize();
    return idx;
  }

  std::optional<RepoId> find(std::string_view owner, std::string_view name) const {
    auto it = ids_.find(repo_key(owner, name));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  const Entry* nearest(RepoId id, Date date) const {
    if (id >= repos_.size()) return nullptr;
    const auto& series = repos_[id];
    auto it = std::upper_bound(series.begin(), series.end(), date,
                               [](Date d, const Entry& e) { return d < e.date; });
    if (it == series.begin()) return nullptr;
    --it;
    if (date - it->date > kSnapshotLookbackDays) return nullptr;
    return &*it;
  }

  const Entry* nearest(std::string_view owner, std::string_view name, Date date) const {
    auto id = find(owner, name);
    return id ? nearest(*id, date) : nullptr;
  }

  std::optional<RepoSnapshot> nearest_snapshot(std::string_view owner, std::string_view name,
                                               Date date) const {
    auto id = find(owner, name);
    if (!id) return std::nullopt;
    const Entry* e = nearest(*id, date);
    if (!e) return std::nullopt;
    RepoSnapshot s;
    s.snapshot_date = e->date;
    s.owner = names_[*id].first;
    s.name = names_[*id].second;
    s.stars = e->stars;
    s.forks = e->forks;
    s.is_fork = e->is_fork;
    const Meta& meta = metas_[e->meta];
    s.description = meta.description;
    s.topics = meta.topics;
    s.language = meta.language;
    return s;
  }

  std::size_t repo_count() const { return repos_.size(); }
  std::size_t snapshot_count() const { return snapshot_count_; }
  std::size_t duplicate_snapshots() const { return duplicates_; }

 private:
  std::unordered_map<std::string, RepoId> ids_;
  std::vector<std::pair<std::string, std::string>> names_;
  std::vector<std::vector<Entry>> repos_;
  std::vector<Meta> metas_{Meta{}};  // slot 0 is the empty metadata
  std::size_t snapshot_count_ = 0;
  std::size_t duplicates_ = 0;
  bool sorted_ = true;
};

/// Free-function form of the windowed join.
inline std::optional<RepoSnapshot> nearest_repo_snapshot(std::string_view owner,
                                                         std::string_view name, Date date,
                                                         const RepoIndex& repos) {
  return repos.nearest_snapshot(owner, name, date);
}

}  // namespace depgrowth::ingest
