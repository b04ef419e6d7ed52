#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depgrowth/complexity/prompt.hpp"

namespace depgrowth::complexity {

struct ComplexityRating {
  std::vector<std::string> required_skills;
  std::vector<std::string> reasoning;
  std::optional<int> rating;  // 1..7, or null when the notes carry too little information

  bool operator==(const ComplexityRating&) const = default;
};

inline constexpr int kMinRating = 1;
inline constexpr int kMaxRating = 7;

namespace detail {

inline std::string unescape_xml(std::string_view s) {
  static constexpr std::pair<std::string_view, char> kEntities[] = {
      {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&apos;", '\''}, {"&amp;", '&'}};
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    bool matched = false;
    if (s[i] == '&') {
      for (const auto& [entity, ch] : kEntities) {
        if (s.substr(i, entity.size()) == entity) {
          out += ch;
          i += entity.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) out += s[i++];
  }
  return out;
}

[[noreturn]] inline void malformed(const std::string& why) {
  throw ComplexityError(ComplexityErrc::MalformedResponse, "malformed rating response: " + why);
}

inline std::string_view element(std::string_view body, std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  const auto b = body.find(open);
  if (b == std::string_view::npos) malformed("missing <" + std::string(tag) + ">");
  if (body.find(open, b + open.size()) != std::string_view::npos)
    malformed("repeated <" + std::string(tag) + ">");
  const auto e = body.find(close, b + open.size());
  if (e == std::string_view::npos) malformed("unterminated <" + std::string(tag) + ">");
  return body.substr(b + open.size(), e - b - open.size());
}

// Strips one surrounding markdown code fence, if any.
inline std::string_view strip_fence(std::string_view s) {
  if (s.substr(0, 3) != "```") return s;
  const auto nl = s.find('\n');
  if (nl == std::string_view::npos) return s;
  auto inner = trim_whitespace(s.substr(nl + 1));
  if (inner.size() < 3 || inner.substr(inner.size() - 3) != "```") return s;
  return trim_whitespace(inner.substr(0, inner.size() - 3));
}

}  // namespace detail

/// Semicolon-separated list; items trimmed, empty items dropped.
inline std::vector<std::string> split_notes(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(';', start);
    if (end == std::string_view::npos) end = s.size();
    auto item = trim_whitespace(s.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

/// Parses the XML-formatted model answer. The envelope opens with
/// <rating-response> and may close with either </rating-response> or
/// </classification-response>.
inline ComplexityRating parse_rating_response(std::string_view text) {
  auto body = detail::strip_fence(trim_whitespace(text));
  constexpr std::string_view open = "<rating-response>";
  if (body.substr(0, open.size()) != open) detail::malformed("missing <rating-response> envelope");
  body.remove_prefix(open.size());
  bool closed = false;
  for (std::string_view close : {"</rating-response>", "</classification-response>"}) {
    if (body.size() >= close.size() && body.substr(body.size() - close.size()) == close) {
      body.remove_suffix(close.size());
      closed = true;
      break;
    }
  }
  if (!closed) detail::malformed("envelope not closed");

  ComplexityRating r;
  r.required_skills = split_notes(detail::unescape_xml(detail::element(body, "required-skills")));
  r.reasoning = split_notes(detail::unescape_xml(detail::element(body, "reasoning")));
  const auto raw = trim_whitespace(detail::element(body, "complexity-rating"));
  std::string lowered(raw);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lowered == "null" || lowered == "\"null\"") return r;
  if (raw.empty() || raw.size() > 2 ||
      !std::all_of(raw.begin(), raw.end(), [](char c) { return c >= '0' && c <= '9'; }))
    detail::malformed("rating '" + std::string(raw) + "' is not an integer or null");
  const int value = std::stoi(std::string(raw));
  if (value < kMinRating || value > kMaxRating)
    detail::malformed("rating " + std::to_string(value) + " outside 1-7");
  r.rating = value;
  return r;
}

/// Canonical rendering of a rating in the response format.
inline std::string render_rating_response(const ComplexityRating& r) {
  auto join = [](const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out += "; ";
      out += escape_xml(xs[i]);
    }
    return out;
  };
  return "<rating-response>\n    <required-skills>" + join(r.required_skills) +
         "</required-skills>\n    <reasoning>" + join(r.reasoning) +
         "</reasoning>\n    <complexity-rating>" +
         (r.rating ? std::to_string(*r.rating) : std::string("null")) +
         "</complexity-rating>\n</rating-response>";
}

}  // namespace depgrowth::complexity
