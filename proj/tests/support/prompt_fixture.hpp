// Release and repository behind the prompt golden files.
#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "depgrowth/records.hpp"

namespace prompt_fixture {

inline std::string read_golden(const std::string& name) {
  std::ifstream in(std::string(DEPGROWTH_TEST_DIR) + "/golden/" + name, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline depgrowth::PackageRelease release() {
  depgrowth::PackageRelease r;
  r.release_date = *depgrowth::Date::parse("2023-03-14");
  r.ecosystem = "pypi";
  r.package_name = "octo-lib";
  r.owner = "octo-org";
  r.repo_name = "octo-lib";
  r.version_text = "2.4.0";
  r.release_notes = read_golden("prompt_fixture_notes.md");
  return r;
}

inline depgrowth::RepoSnapshot repo() {
  depgrowth::RepoSnapshot s;
  s.snapshot_date = *depgrowth::Date::parse("2023-03-14");
  s.owner = "octo-org";
  s.name = "octo-lib";
  s.stars = 120;
  s.description = "Streaming parser & tokenizer for <xml-ish> formats";
  s.topics = {"parsing", "streaming", "xml"};
  s.language = "Python";
  return s;
}

}  // namespace prompt_fixture
