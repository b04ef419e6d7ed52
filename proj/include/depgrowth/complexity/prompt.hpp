#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "depgrowth/records.hpp"

namespace depgrowth::complexity {

enum class ComplexityErrc { NotEligible, MalformedResponse, ExhaustedRetries, Transport };

class ComplexityError : public std::runtime_error {
 public:
  ComplexityError(ComplexityErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ComplexityErrc code() const noexcept { return code_; }

 private:
  ComplexityErrc code_;
};

struct PromptBundle {
  std::string system_text;
  std::string user_text;
};

inline constexpr std::size_t kMinReleaseNoteChars = 512;

inline constexpr std::string_view kSystemPrompt =
    "You are computer science grad student. As a computer science grad student, you are "
    "extremely knowledgeable in software development, development lifecycles, and release "
    "patterns. Further, you also know and use multiple programming languages and frameworks. "
    "Currently you are tasked with rating the complexity of a software release given the "
    "release notes. As this is a research project, you will be provided an annotation "
    "procedure and the example to annotate. Be sure to follow the procedure and always respond "
    "with the XML formatted rating information.";

/// Placeholders: {repo_name} {repo_description} {repo_topics} {repo_language}
/// {release_notes}. The closing tag of the response example is reproduced
/// as-is; the response parser accepts both spellings.
inline constexpr std::string_view kUserPromptTemplate = R"(## Task

Rate the complexity of a software release given the software release's release notes. Specifically, you should rate the "complexity to implement" (i.e. how difficult does the feature, or bug, or change seem to be to implement).

For your "complexity to implement" rating, take on the persona of a core developer for the library. That is, some things may be easier or harder in different languages and those differences should be taken into account.

I know you will do great! Just try your best!

### Rating Scale for Complexity to Implement

Use the following scale and criteria to rate the complexity to implement:

- 1. Almost no changes.

If any, they may be purely for documentation, project administration, or very minor bugfixes such as a typo or a small formatting issue.

- 2. Very few changes.

They may involve a new feature or a minor bugfix. But the changes are entirely minor. The changes are so small that they may not require any new documentation outside of a very brief mention in the release notes.

- 3. A few changes.

Changes involve some basic understanding of the library. They may involve a new feature or a minor bugfix. But the feature itself shouldn't be major. For example, it may be the addition of a new parameter to a function, or a new method to a class. It may require some new documentation but not a lot.

- 4. A small number of changes.

Changes involve some moderate level of understanding the library. They may involve a new major feature or a major bugfix. They may require some refactoring or changes to existing code but that isn't the main focus of the release. They likely require some additional documentation to announce the new feature, bugfix, or new behavior.

- 5. A moderate number of changes.

Changes involve a decently-high level of understanding the library. This may include multiple new features, major bugfixes or changes, or a moderate amount of refactoring. They should require extensive documentation to announce the new features, bugfixes, or new behavior.

- 6. A large number of changes.

Changes involve a high level of understanding the library. There are multiple new features, major bugfixes or changes, and/or a large amount of refactoring. Each change may be interacting with multiple systems or modules of the library or tool.

- 7. Extensive changes.

The release includes new features, refactoring. Complex interactions between multiple systems. To implement these changes would require extensive knowledge of the whole library to fully understand the effects of each change. Further, it would require extensive testing to ensure that the changes are correct and do not break existing functionality. This also requires extensive documentation to explain the changes to users.

## Input Structure

You will be provided with an XML object with the following structure:
<release-notes-information>
    <repository-name>...</repository-name>
    <repository-description>...</repository-description>
    <repository-topics>...</repository-topics>
    <repository-language>...</repository-language>
    <release-notes>...</release-notes>
</release-notes-information>

## Response Structure

- `required-skills`: A list of short (less than a sentence) semi-colon separated notes, of the skills required to implement the changes in the release notes. I.e. what knowledge (e.g. asynchrony, data structures, etc.) would be required to implement the changes.

- `reasoning`: A list of short (less than a sentence) semi-colon separated notes, that justify the rating you are providing.

- `complexity-rating`: The complexity rating you are providing. This should be a number between 1 and 7, inclusive, where 1 is "very low complexity" and 7 is "very high complexity". Always try to rate the release on the scale from 1 to 7, however, if there is almost no information in the release notes, rate the complexity as "null".

Your response should have the following structure:

<rating-response>
    <required-skills>...</required-skills>
    <reasoning>...</reasoning>
    <complexity-rating>...</complexity-rating>
</classification-response>

Provide only the XML response, without any additional text or formatting.

## Release Information

<release-notes-information>
    <repository-name>{repo_name}</repository-name>
    <repository-description>{repo_description}</repository-description>
    <repository-topics>{repo_topics}</repository-topics>
    <repository-language>{repo_language}</repository-language>
    <release-notes>{release_notes}</release-notes>
</release-notes-information>

## Rating Response)";

inline std::string_view trim_whitespace(std::string_view s) {
  constexpr std::string_view ws = " \t\n\r\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// Unicode scalar values in UTF-8 text (continuation bytes are not counted).
inline std::size_t count_scalars(std::string_view utf8) {
  std::size_t n = 0;
  for (unsigned char c : utf8)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

inline bool eligible_for_rating(const PackageRelease& release) {
  if (!release.release_notes) return false;
  return count_scalars(trim_whitespace(*release.release_notes)) >= kMinReleaseNoteChars;
}

inline std::string escape_xml(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

struct PromptFields {
  std::string repo_name;
  std::optional<std::string> description;
  std::vector<std::string> topics;
  std::optional<std::string> language;
  std::string release_notes;
};

/// Substitutes the template in a single pass, so placeholder-like text inside
/// a value is never expanded.
inline std::string render_user_prompt(const PromptFields& f) {
  auto join = [](const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) out += ", ";
      out += xs[i];
    }
    return out;
  };
  auto value_of = [&](std::string_view name) -> std::optional<std::string> {
    if (name == "repo_name") return escape_xml(f.repo_name);
    if (name == "repo_description") return f.description ? escape_xml(*f.description) : "null";
    if (name == "repo_topics") return escape_xml(join(f.topics));
    if (name == "repo_language") return f.language ? escape_xml(*f.language) : "null";
    if (name == "release_notes") return escape_xml(f.release_notes);
    return std::nullopt;
  };
  std::string out;
  std::string_view t = kUserPromptTemplate;
  std::size_t pos = 0;
  while (pos < t.size()) {
    const auto open = t.find('{', pos);
    if (open == std::string_view::npos) break;
    const auto close = t.find('}', open);
    if (close == std::string_view::npos) break;
    auto value = value_of(t.substr(open + 1, close - open - 1));
    out.append(t.substr(pos, open - pos));
    if (value) {
      out += *value;
    } else {
      out.append(t.substr(open, close - open + 1));
    }
    pos = close + 1;
  }
  out.append(t.substr(pos));
  return out;
}

/// Throws ComplexityError(NotEligible) for releases without enough notes.
inline PromptBundle build_prompt(const PackageRelease& release, const RepoSnapshot& repo) {
  if (!eligible_for_rating(release))
    throw ComplexityError(ComplexityErrc::NotEligible,
                          "release notes shorter than 512 characters: " + release.key());
  PromptFields f{repo.owner + "/" + repo.name, repo.description, repo.topics, repo.language,
                 *release.release_notes};
  return PromptBundle{std::string(kSystemPrompt), render_user_prompt(f)};
}

}  // namespace depgrowth::complexity
