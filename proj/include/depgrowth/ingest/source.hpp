#pragma once

#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace depgrowth::ingest {

enum class IngestErrc { SourceUnavailable, IncompatibleSchema, OutOfOrder };

class IngestError : public std::runtime_error {
 public:
  IngestError(IngestErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  IngestErrc code() const noexcept { return code_; }

 private:
  IngestErrc code_;
};

/// Pull-based stream of text lines (without the trailing newline).
class LineSource {
 public:
  virtual ~LineSource() = default;
  /// The returned view is valid until the next call.
  virtual std::optional<std::string_view> next_line() = 0;
  virtual std::string describe() const = 0;
};

class FileLineSource final : public LineSource {
 public:
  explicit FileLineSource(std::string path) : path_(std::move(path)), in_(path_) {
    if (!in_) throw IngestError(IngestErrc::SourceUnavailable, "cannot open " + path_);
  }

  std::optional<std::string_view> next_line() override {
    if (!std::getline(in_, line_)) {
      if (in_.bad()) throw IngestError(IngestErrc::SourceUnavailable, "read error on " + path_);
      return std::nullopt;
    }
    if (!line_.empty() && line_.back() == '\r') line_.pop_back();
    return std::string_view(line_);
  }

  std::string describe() const override { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::string line_;
};

/// In-memory source; mostly for tests and for payloads already fetched.
class StringLineSource final : public LineSource {
 public:
  explicit StringLineSource(std::string text, std::string name = "<memory>")
      : text_(std::move(text)), name_(std::move(name)) {}

  std::optional<std::string_view> next_line() override {
    if (pos_ >= text_.size()) return std::nullopt;
    auto end = text_.find('\n', pos_);
    if (end == std::string::npos) end = text_.size();
    std::string_view line(text_.data() + pos_, end - pos_);
    pos_ = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  }

  std::string describe() const override { return name_; }

 private:
  std::string text_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace depgrowth::ingest
