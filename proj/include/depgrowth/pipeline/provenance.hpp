#pragma once

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>
#include <openssl/evp.h>

#include "depgrowth/ingest/http_source.hpp"
#include "depgrowth/ingest/source.hpp"
#include "depgrowth/pipeline/config.hpp"

namespace depgrowth::pipeline {

/// Incremental SHA-256 over OpenSSL's EVP interface.
class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("SHA-256 initialisation failed");
  }

  void update(std::string_view data) {
    if (EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1)
      throw std::runtime_error("SHA-256 update failed");
  }

  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw std::runtime_error("SHA-256 final failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += kHex[md[i] >> 4];
      out += kHex[md[i] & 0xF];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, void (*)(EVP_MD_CTX*)> ctx_;
};

inline std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data);
  return h.hex();
}

/// Wraps a source and digests every line it yields, each followed by '\n'.
/// The digest is therefore the same for a file and for the identical payload
/// served over HTTP, and insensitive to CRLF line endings.
class HashingLineSource final : public ingest::LineSource {
 public:
  explicit HashingLineSource(std::unique_ptr<ingest::LineSource> inner) : inner_(std::move(inner)) {}

  std::optional<std::string_view> next_line() override {
    auto line = inner_->next_line();
    if (line) {
      hash_.update(*line);
      hash_.update("\n");
    }
    return line;
  }
  std::string describe() const override { return inner_->describe(); }

  /// Finalises the digest; call once, after the stream is exhausted.
  std::string digest() { return hash_.hex(); }

 private:
  std::unique_ptr<ingest::LineSource> inner_;
  Sha256 hash_;
};

inline bool is_url(std::string_view location) {
  return location.rfind("http://", 0) == 0 || location.rfind("https://", 0) == 0;
}

/// File path or http(s) URL. For URLs the last path segment is the resource.
inline std::unique_ptr<ingest::LineSource> open_source(const std::string& location,
                                                       const InputConfig& inputs) {
  if (location.empty()) throw ConfigError("input location is not configured");
  if (is_url(location)) {
    const auto slash = location.rfind('/');
    ingest::HttpOptions opts;
    opts.timeout = std::chrono::milliseconds(inputs.http_timeout_ms);
    opts.max_retries = inputs.http_max_retries;
    return std::make_unique<ingest::HttpLineSource>(location.substr(0, slash), location.substr(slash + 1), opts);
  }
  return std::make_unique<ingest::FileLineSource>(location);
}

inline std::string utc_now_iso() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Provenance {
  std::string stage;
  std::string config_sha256;
  std::map<std::string, std::string> inputs;  // name -> sha256
  std::string timestamp;
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json to_json() const {
    nlohmann::json j{{"tool", kToolName},
                     {"version", kToolVersion},
                     {"stage", stage},
                     {"config_sha256", config_sha256},
                     {"inputs", inputs},
                     {"timestamp", timestamp}};
    for (const auto& [k, v] : extra.items()) j[k] = v;
    return j;
  }

  /// "# key: value" lines for text and CSV outputs.
  std::string comment_block(std::string_view prefix = "# ") const {
    std::string out;
    auto line = [&](const std::string& k, const std::string& v) {
      out += std::string(prefix) + k + ": " + v + "\n";
    };
    line("tool", std::string(kToolName) + " " + kToolVersion);
    line("stage", stage);
    line("config_sha256", config_sha256);
    for (const auto& [name, digest] : inputs) line("input " + name, digest);
    line("timestamp", timestamp);
    for (const auto& [k, v] : extra.items()) line(k, v.is_string() ? v.get<std::string>() : v.dump());
    return out;
  }
};

inline Provenance make_provenance(const PipelineConfig& c, std::string stage) {
  Provenance p;
  p.stage = std::move(stage);
  p.config_sha256 = sha256_hex(to_json(c).dump());
  p.timestamp = c.timestamp ? *c.timestamp : utc_now_iso();
  return p;
}

}  // namespace depgrowth::pipeline
