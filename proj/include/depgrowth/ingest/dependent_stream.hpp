#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "depgrowth/ingest/repo_index.hpp"
#include "depgrowth/ingest/source.hpp"

namespace depgrowth::ingest {

/// Counts distinct qualifying dependents per (package, day) in one pass over
/// an edge stream ordered by (snapshot_date, ecosystem, package_name), which
/// is the documented file order. Only the group being read is held in memory;
/// each completed group is handed to the sink.
class DependentCountStream {
 public:
  struct GroupCount {
    Date date;
    std::string ecosystem;
    std::string package_name;
    std::int64_t dependents = 0;
  };
  using Sink = std::function<void(const GroupCount&)>;

  DependentCountStream(const RepoIndex& repos, Sink sink) : repos_(&repos), sink_(std::move(sink)) {}

  void push(const DependentEdge& e) {
    ++edges_;
    if (!open_ || e.snapshot_date != current_.date || e.ecosystem != current_.ecosystem ||
        e.package_name != current_.package_name) {
      if (open_ && !ordered_before(current_, e))
        throw IngestError(IngestErrc::OutOfOrder,
                          "edge stream not ordered by (date, ecosystem, package) at " +
                              e.snapshot_date.iso() + " " + e.ecosystem + ":" + e.package_name);
      flush();
      current_.date = e.snapshot_date;
      current_.ecosystem = e.ecosystem;
      current_.package_name = e.package_name;
      open_ = true;
    }
    if (auto id = repos_->find(e.dependent_owner, e.dependent_repo)) members_.push_back(*id);
  }

  /// Emits the final group.
  void finish() { flush(); }

  std::uint64_t edges_seen() const { return edges_; }
  std::uint64_t groups_emitted() const { return groups_; }

 private:
  static bool ordered_before(const GroupCount& g, const DependentEdge& e) {
    if (g.date != e.snapshot_date) return g.date < e.snapshot_date;
    if (g.ecosystem != e.ecosystem) return g.ecosystem < e.ecosystem;
    return g.package_name < e.package_name;
  }

  void flush() {
    if (!open_) return;
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    current_.dependents = 0;
    for (RepoId id : members_) {
      const auto* snap = repos_->nearest(id, current_.date);
      if (snap && snap->qualifies()) ++current_.dependents;
    }
    sink_(current_);
    ++groups_;
    members_.clear();
    open_ = false;
  }

  const RepoIndex* repos_;
  Sink sink_;
  GroupCount current_;
  std::vector<RepoId> members_;
  bool open_ = false;
  std::uint64_t edges_ = 0;
  std::uint64_t groups_ = 0;
};

}  // namespace depgrowth::ingest
