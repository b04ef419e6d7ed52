#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include <httplib.h>

#include "depgrowth/ingest/source.hpp"

namespace depgrowth::ingest {

struct HttpOptions {
  std::chrono::milliseconds timeout{30'000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{250};
  std::size_t chunk_bytes = 4u << 20;
};

/// Splits "http://host:port/prefix" into ("http://host:port", "/prefix").
inline std::pair<std::string, std::string> split_url(std::string_view url) {
  const auto scheme = url.find("://");
  const auto host_start = scheme == std::string_view::npos ? 0 : scheme + 3;
  const auto slash = url.find('/', host_start);
  if (slash == std::string_view::npos) return {std::string(url), ""};
  std::string path(url.substr(slash));
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {std::string(url.substr(0, slash)), path};
}

/// Streams a line-delimited payload over HTTP GET using byte ranges, so an
/// interrupted transfer resumes at the last received byte rather than
/// restarting. Servers that ignore Range are handled by skipping the bytes
/// already consumed.
class HttpLineSource final : public LineSource {
 public:
  HttpLineSource(std::string_view base_url, std::string_view resource, HttpOptions options = {})
      : options_(options) {
    auto [host, prefix] = split_url(base_url);
    host_ = std::move(host);
    path_ = prefix + (resource.empty() || resource.front() == '/' ? "" : "/") + std::string(resource);
    client_ = std::make_unique<httplib::Client>(host_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    client_->set_connection_timeout(secs.count(), usecs.count());
    client_->set_read_timeout(secs.count(), usecs.count());
    client_->set_keep_alive(true);
  }

  std::optional<std::string_view> next_line() override {
    while (true) {
      const auto nl = buffer_.find('\n', cursor_);
      if (nl != std::string::npos) {
        line_.assign(buffer_, cursor_, nl - cursor_);
        cursor_ = nl + 1;
        if (!line_.empty() && line_.back() == '\r') line_.pop_back();
        return std::string_view(line_);
      }
      if (eof_) {
        if (cursor_ >= buffer_.size()) return std::nullopt;
        line_.assign(buffer_, cursor_, std::string::npos);
        cursor_ = buffer_.size();
        return std::string_view(line_);
      }
      buffer_.erase(0, cursor_);
      cursor_ = 0;
      fetch_chunk();
    }
  }

  std::string describe() const override { return host_ + path_; }

  /// Bytes received so far; the offset the next range request starts at.
  std::uint64_t received_bytes() const { return offset_; }
  int requests_made() const { return requests_; }

 private:
  void fetch_chunk() {
    std::chrono::milliseconds backoff = options_.initial_backoff;
    std::string last_error;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
      ++requests_;
      std::string range = "bytes=" + std::to_string(offset_) + "-";
      if (!open_ended_) range += std::to_string(offset_ + options_.chunk_bytes - 1);
      httplib::Headers headers{{"Range", range}};
      auto res = client_->Get(path_, headers);
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 206) {
        buffer_ += res->body;
        offset_ += res->body.size();
        const auto total = total_from_content_range(res->get_header_value("Content-Range"));
        if (open_ended_ || res->body.size() < options_.chunk_bytes || (total && offset_ >= *total) ||
            res->body.empty())
          eof_ = true;
        return;
      }
      if (res->status == 200) {
        if (offset_ < res->body.size()) buffer_.append(res->body, offset_, std::string::npos);
        offset_ = res->body.size();
        eof_ = true;
        return;
      }
      if (res->status == 416) {
        // Some servers reject a range that runs past the end instead of
        // clamping it; ask once more for everything that remains.
        const auto total = total_from_content_range(res->get_header_value("Content-Range"));
        if (!open_ended_ && !(total && offset_ >= *total)) {
          open_ended_ = true;
          --attempt;
          continue;
        }
        eof_ = true;
        return;
      }
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status >= 400 && res->status < 500 && res->status != 408 && res->status != 429)
        break;
    }
    throw IngestError(IngestErrc::SourceUnavailable, describe() + ": " + last_error);
  }

  static std::optional<std::uint64_t> total_from_content_range(const std::string& v) {
    const auto slash = v.rfind('/');
    if (slash == std::string::npos || slash + 1 >= v.size() || v[slash + 1] == '*')
      return std::nullopt;
    try {
      return std::stoull(v.substr(slash + 1));
    } catch (...) {
      return std::nullopt;
    }
  }

  HttpOptions options_;
  std::string host_;
  std::string path_;
  std::unique_ptr<httplib::Client> client_;
  std::string buffer_;
  std::size_t cursor_ = 0;
  std::string line_;
  std::uint64_t offset_ = 0;
  bool eof_ = false;
  bool open_ended_ = false;
  int requests_ = 0;
};

}  // namespace depgrowth::ingest
