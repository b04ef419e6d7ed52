#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "depgrowth/complexity/response.hpp"
#include "depgrowth/filter.hpp"
#include "depgrowth/ingest/codec.hpp"
#include "depgrowth/ingest/reader.hpp"
#include "depgrowth/metrics.hpp"
#include "depgrowth/pipeline/config.hpp"
#include "depgrowth/pipeline/provenance.hpp"

namespace depgrowth::pipeline {

using nlohmann::json;

inline constexpr std::string_view kFilteredSchema = "depgrowth.filtered_release/1";
inline constexpr std::string_view kRecordSchema = "depgrowth.release_record/1";
inline constexpr std::string_view kSampleSchema = "depgrowth.logdiff_sample/1";
inline constexpr std::string_view kRatingSchema = "depgrowth.complexity_rating/1";
inline constexpr std::string_view kHumanRatingSchema = "depgrowth.human_rating/1";

/// Output file that is written whole or not at all: content goes to a
/// sibling temporary and is renamed into place by commit().
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path) : path_(std::move(path)), tmp_(path_) {
    tmp_ += ".partial";
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw DataError("cannot write " + tmp_.string());
  }
  ~AtomicFile() {
    if (out_.is_open()) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }
  std::ofstream& stream() { return out_; }
  void commit() {
    out_.close();
    if (!out_) throw DataError("write failed for " + path_.string());
    std::filesystem::rename(tmp_, path_);
  }

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
};

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  AtomicFile f(path);
  f.stream() << text;
  f.commit();
}

inline std::string ndjson_header(std::string_view schema, const Provenance& p) {
  return json{{"schema", schema}, {"provenance", p.to_json()}}.dump() + "\n";
}

// ---- filtered releases ----------------------------------------------------

inline json to_json(const filter::CandidateRelease& c) {
  json o = ingest::to_json(c.release);
  o["release_type"] = c.release_type ? json(semver::to_string(*c.release_type)) : json(nullptr);
  o["pre_dependents"] = c.pre_dependents ? json(*c.pre_dependents) : json(nullptr);
  return o;
}

inline std::variant<filter::CandidateRelease, std::string> decode_filtered(std::string_view line) {
  auto base = ingest::decode_release(line);
  if (auto* err = std::get_if<std::string>(&base)) return *err;
  filter::CandidateRelease c;
  c.release = std::get<PackageRelease>(std::move(base));
  json o = json::parse(line.begin(), line.end(), nullptr, false);
  auto parsed = semver::try_parse_version(c.release.version_text);
  if (auto* v = std::get_if<semver::Version>(&parsed)) c.version = *v;
  if (auto it = o.find("release_type"); it != o.end() && it->is_string()) {
    auto t = semver::release_type_from_string(it->get<std::string>());
    if (!t) return std::string("unknown release_type");
    c.release_type = *t;
  }
  if (auto it = o.find("pre_dependents"); it != o.end() && !it->is_null()) {
    if (!it->is_number_integer()) return std::string("pre_dependents must be an integer");
    c.pre_dependents = it->get<std::int64_t>();
  }
  return c;
}

// ---- release records ------------------------------------------------------

inline json to_json(const metrics::ReleaseRecord& r) {
  json values = json::object();
  for (const auto& [k, v] : r.metric_values)
    values[metrics::to_string(k.metric)][std::to_string(k.offset_days)] = v;
  return json{{"release_key", r.release.key()},
              {"ecosystem", r.release.ecosystem},
              {"package_name", r.release.package_name},
              {"version", r.release.version_text},
              {"release_date", r.release.release_date.iso()},
              {"release_type", semver::to_string(r.release_type)},
              {"series", semver::to_string(r.series)},
              {"pre_dependents", r.pre_dependents},
              {"size_bin", metrics::to_string(r.size_bin)},
              {"values", values}};
}

/// Release records as read back for reporting; only what the report needs.
struct RecordRow {
  std::string release_key;
  std::string ecosystem;
  semver::ReleaseType release_type = semver::ReleaseType::Major;
  std::int64_t pre_dependents = 0;
};

inline std::variant<RecordRow, std::string> decode_record_row(std::string_view line) {
  json o = json::parse(line.begin(), line.end(), nullptr, false);
  if (o.is_discarded() || !o.is_object()) return std::string("invalid JSON");
  try {
    RecordRow r;
    r.release_key = o.at("release_key").get<std::string>();
    r.ecosystem = o.at("ecosystem").get<std::string>();
    auto t = semver::release_type_from_string(o.at("release_type").get<std::string>());
    if (!t) return std::string("unknown release_type");
    r.release_type = *t;
    r.pre_dependents = o.at("pre_dependents").get<std::int64_t>();
    return r;
  } catch (const json::exception& e) {
    return std::string(e.what());
  }
}

// ---- log-difference samples -----------------------------------------------

inline json to_json(const metrics::LogDiffSample& s) {
  return json{{"release_key", s.release_key},
              {"ecosystem", s.ecosystem},
              {"size_bin", metrics::to_string(s.size_bin)},
              {"series", semver::to_string(s.series)},
              {"release_type", semver::to_string(s.release_type)},
              {"metric", metrics::to_string(s.metric)},
              {"offset_days", s.offset_days},
              {"value", s.value}};
}

inline std::variant<metrics::LogDiffSample, std::string> decode_sample(std::string_view line) {
  json o = json::parse(line.begin(), line.end(), nullptr, false);
  if (o.is_discarded() || !o.is_object()) return std::string("invalid JSON");
  try {
    metrics::LogDiffSample s;
    s.release_key = o.at("release_key").get<std::string>();
    s.ecosystem = o.at("ecosystem").get<std::string>();
    auto bin = metrics::size_bin_from_string(o.at("size_bin").get<std::string>());
    auto series = semver::series_from_string(o.at("series").get<std::string>());
    auto type = semver::release_type_from_string(o.at("release_type").get<std::string>());
    auto metric = metrics::metric_from_string(o.at("metric").get<std::string>());
    if (!bin || !series || !type || !metric) return std::string("unknown enum value");
    s.size_bin = *bin;
    s.series = *series;
    s.release_type = *type;
    s.metric = *metric;
    s.offset_days = o.at("offset_days").get<std::int32_t>();
    s.value = o.at("value").get<double>();
    return s;
  } catch (const json::exception& e) {
    return std::string(e.what());
  }
}

// ---- complexity ratings ---------------------------------------------------

struct RatingRow {
  std::string release_key;
  std::string ecosystem;
  semver::ReleaseType release_type = semver::ReleaseType::Major;
  complexity::ComplexityRating rating;
  std::string prompt_sha256;
  std::string model;
  double temperature = 0.0;
  int attempts = 1;
  std::string timestamp;
};

inline json to_json(const RatingRow& r) {
  return json{{"release_key", r.release_key},
              {"ecosystem", r.ecosystem},
              {"release_type", semver::to_string(r.release_type)},
              {"rating", r.rating.rating ? json(*r.rating.rating) : json(nullptr)},
              {"required_skills", r.rating.required_skills},
              {"reasoning", r.rating.reasoning},
              {"prompt_sha256", r.prompt_sha256},
              {"model", r.model},
              {"temperature", r.temperature},
              {"attempts", r.attempts},
              {"timestamp", r.timestamp}};
}

inline std::variant<RatingRow, std::string> decode_rating(std::string_view line) {
  json o = json::parse(line.begin(), line.end(), nullptr, false);
  if (o.is_discarded() || !o.is_object()) return std::string("invalid JSON");
  try {
    RatingRow r;
    r.release_key = o.at("release_key").get<std::string>();
    r.ecosystem = o.at("ecosystem").get<std::string>();
    auto t = semver::release_type_from_string(o.at("release_type").get<std::string>());
    if (!t) return std::string("unknown release_type");
    r.release_type = *t;
    if (const auto& v = o.at("rating"); !v.is_null()) {
      const int x = v.get<int>();
      if (x < complexity::kMinRating || x > complexity::kMaxRating) return std::string("rating outside 1-7");
      r.rating.rating = x;
    }
    r.rating.required_skills = o.value("required_skills", std::vector<std::string>{});
    r.rating.reasoning = o.value("reasoning", std::vector<std::string>{});
    r.prompt_sha256 = o.value("prompt_sha256", "");
    r.model = o.value("model", "");
    r.temperature = o.value("temperature", 0.0);
    r.attempts = o.value("attempts", 1);
    r.timestamp = o.value("timestamp", "");
    return r;
  } catch (const json::exception& e) {
    return std::string(e.what());
  }
}

struct HumanRating {
  std::string release_key;
  int rating = 0;
};

inline std::variant<HumanRating, std::string> decode_human_rating(std::string_view line) {
  json o = json::parse(line.begin(), line.end(), nullptr, false);
  if (o.is_discarded() || !o.is_object()) return std::string("invalid JSON");
  try {
    HumanRating h{o.at("release_key").get<std::string>(), o.at("rating").get<int>()};
    if (h.rating < complexity::kMinRating || h.rating > complexity::kMaxRating)
      return std::string("rating outside 1-7");
    return h;
  } catch (const json::exception& e) {
    return std::string(e.what());
  }
}

// ---- reading --------------------------------------------------------------

/// Reads a whole NDJSON file of one schema. Any malformed record is a data
/// error here: these files are produced by earlier stages.
template <typename T>
std::vector<T> read_ndjson(const std::filesystem::path& path, std::string_view schema,
                           std::variant<T, std::string> (*decode)(std::string_view)) {
  if (!std::filesystem::exists(path))
    throw DataError(path.string() + " does not exist; run the stage that produces it first");
  try {
    ingest::RecordReader<T> reader(std::make_unique<ingest::FileLineSource>(path.string()), schema, decode);
    auto got = ingest::collect(reader);
    if (!got.errors.empty())
      throw DataError(path.string() + ":" + std::to_string(got.errors.front().line) + ": " +
                      got.errors.front().reason);
    return std::move(got.records);
  } catch (const ingest::IngestError& e) {
    throw DataError(e.what());
  }
}

}  // namespace depgrowth::pipeline
