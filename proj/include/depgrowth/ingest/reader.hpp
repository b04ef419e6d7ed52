#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "depgrowth/ingest/codec.hpp"
#include "depgrowth/ingest/source.hpp"

namespace depgrowth::ingest {

/// A record that failed validation. `record_index` counts data records
/// (0-based, header and blank lines excluded); `line` is the 1-based physical
/// line.
struct SchemaViolation {
  std::uint64_t record_index = 0;
  std::uint64_t line = 0;
  std::string reason;
};

template <typename T>
using ReadItem = std::variant<T, SchemaViolation>;

/// Single-consumer stream of decoded records. Malformed records surface as
/// SchemaViolation items and do not stop the stream.
template <typename T>
class RecordReader {
 public:
  using Decoder = std::variant<T, std::string> (*)(std::string_view);

  RecordReader(std::unique_ptr<LineSource> source, std::string_view schema, Decoder decode)
      : source_(std::move(source)), schema_(schema), decode_(decode) {}

  std::optional<ReadItem<T>> next() {
    while (auto line = source_->next_line()) {
      ++line_no_;
      if (is_blank(*line)) continue;
      if (!header_checked_) {
        header_checked_ = true;
        if (check_header(*line)) continue;
      }
      const auto index = index_++;
      auto decoded = decode_(*line);
      if (auto* reason = std::get_if<std::string>(&decoded))
        return ReadItem<T>{SchemaViolation{index, line_no_, std::move(*reason)}};
      return ReadItem<T>{std::get<T>(std::move(decoded))};
    }
    return std::nullopt;
  }

  /// Visits every record, routing violations to `on_error`.
  template <typename OnRecord, typename OnError>
  void for_each(OnRecord&& on_record, OnError&& on_error) {
    while (auto item = next()) {
      if (auto* rec = std::get_if<T>(&*item))
        on_record(std::move(*rec));
      else
        on_error(std::get<SchemaViolation>(*item));
    }
  }

  const LineSource& source() const { return *source_; }

 private:
  static bool is_blank(std::string_view s) {
    return s.find_first_not_of(" \t\r") == std::string_view::npos;
  }

  // Returns true when the line is a schema header: {"schema": ...} with an
  // optional "provenance" object.
  bool check_header(std::string_view line) {
    if (line.find("\"schema\"") == std::string_view::npos) return false;
    json obj = json::parse(line.begin(), line.end(), nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("schema")) return false;
    for (const auto& [k, _] : obj.items())
      if (k != "schema" && k != "provenance") return false;
    const auto& v = obj["schema"];
    if (!v.is_string() || v.get<std::string>() != schema_)
      throw IngestError(IngestErrc::IncompatibleSchema,
                        source_->describe() + ": expected schema " + std::string(schema_) +
                            ", found " + v.dump());
    return true;
  }

  std::unique_ptr<LineSource> source_;
  std::string_view schema_;
  Decoder decode_;
  std::uint64_t line_no_ = 0;
  std::uint64_t index_ = 0;
  bool header_checked_ = false;
};

inline RecordReader<RepoSnapshot> read_repo_snapshots(std::unique_ptr<LineSource> source) {
  return {std::move(source), kRepoSchema, &decode_repo_snapshot};
}

inline RecordReader<PackageRelease> read_releases(std::unique_ptr<LineSource> source) {
  return {std::move(source), kReleaseSchema, &decode_release};
}

inline RecordReader<DependentEdge> read_dependent_edges(std::unique_ptr<LineSource> source) {
  return {std::move(source), kEdgeSchema, &decode_edge};
}

template <typename T>
struct Collected {
  std::vector<T> records;
  std::vector<SchemaViolation> errors;
};

template <typename T>
Collected<T> collect(RecordReader<T>& reader) {
  Collected<T> out;
  reader.for_each([&](T&& r) { out.records.push_back(std::move(r)); },
                  [&](const SchemaViolation& e) { out.errors.push_back(e); });
  return out;
}

}  // namespace depgrowth::ingest
