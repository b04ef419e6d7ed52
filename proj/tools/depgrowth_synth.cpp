// depgrowth-synth: deterministic synthetic ecosystem for end-to-end tests.
//
// Writes repos.ndjson, releases.ndjson, edges.ndjson, config.yaml and
// manifest.json into the output directory. Identical seed and scale give
// byte-identical files.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "depgrowth/date.hpp"
#include "depgrowth/stats/permutation.hpp"

namespace {

using depgrowth::Date;
namespace fs = std::filesystem;

constexpr int kDays = 730;  // 2022-01-01 .. 2023-12-31
const Date kStart = Date::from_ymd(2022, 1, 1);
constexpr int kLastReleaseDay = 700;
constexpr int kOffsets[] = {90, 180, 270, 360, 365};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t below(std::uint64_t n) { return depgrowth::stats::uniform_below(eng_, n); }
  int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }
  double log_uniform(double lo, double hi) { return std::exp(std::log(lo) + unit() * (std::log(hi) - std::log(lo))); }
  double normal(double mu, double sd) {
    double u1 = unit();
    while (u1 <= 0.0) u1 = unit();
    return mu + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * unit());
  }

 private:
  std::mt19937_64 eng_;
};

enum class SizeClass { Tiny, Small, Medium, Large, Huge };
enum class Bump { Major, Minor, Patch };

struct Release {
  int day = 0;
  std::string version;
  double growth = 0.0;
  std::string notes;  // empty = absent
};

struct Package {
  std::string ecosystem;
  std::string name;
  std::string owner;
  std::string repo;
  SizeClass size = SizeClass::Small;
  double base = 0.0;
  std::uint32_t pool_start = 0;
  std::vector<Release> releases;
  int abandon_day = -1;
  // repository traits
  bool repo_fork = false;
  bool repo_zero_stars = false;
  bool repo_absent = false;
  int gap_begin = -1, gap_end = -1;
  double stars0 = 1.0, star_growth = 0.0;
};

struct PoolRepo {
  bool fork = false;
  int start_day = 0;
  int zero_begin = -1, zero_end = -1;
};

std::string iso(int day) { return (kStart + day).iso(); }

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

struct Synth {
  Rng rng;
  std::uint32_t pool_size;
  std::vector<PoolRepo> pool;
  std::vector<std::uint32_t> fork_ids;
  std::vector<Package> packages;

  Synth(std::uint64_t seed, std::uint32_t pool_n) : rng(seed), pool_size(pool_n) {}

  static std::string pool_owner(std::uint32_t i) { return "dep-org-" + std::to_string(i / 100); }
  static std::string pool_name(std::uint32_t i) { return "dep-" + std::to_string(i); }

  void make_pool() {
    pool.resize(pool_size);
    for (std::uint32_t i = 0; i < pool_size; ++i) {
      auto& p = pool[i];
      p.fork = rng.chance(0.02);
      if (p.fork) fork_ids.push_back(i);
      if (rng.chance(0.01)) p.start_day = rng.range(50, 400);
      if (rng.chance(0.015)) {
        p.zero_begin = rng.range(0, kDays - 1);
        p.zero_end = p.zero_begin + rng.range(20, 200);
      }
    }
  }

  std::string next_version(int& ma, int& mi, int& pa, Bump b, bool zero_ver) {
    if (zero_ver && ma == 0) {
      if (b == Bump::Major && rng.chance(0.05)) {
        ma = 1, mi = 0, pa = 0;
      } else if (b == Bump::Major || b == Bump::Minor) {
        ++mi, pa = 0;
      } else {
        ++pa;
      }
    } else if (b == Bump::Major) {
      ++ma, mi = 0, pa = 0;
    } else if (b == Bump::Minor) {
      ++mi, pa = 0;
    } else {
      ++pa;
    }
    return std::to_string(ma) + "." + std::to_string(mi) + "." + std::to_string(pa);
  }

  static double growth_mean(const std::string& v) {
    // Rough type from the version text; quirky strings get the patch mean.
    int ma = 0, mi = 0, pa = 0;
    if (std::sscanf(v.c_str(), "%d.%d.%d", &ma, &mi, &pa) != 3) return 0.04;
    if (ma == 0) return pa == 0 ? 0.10 : 0.05;
    if (pa > 0) return 0.04;
    return mi == 0 ? 0.12 : 0.07;
  }

  std::string notes_text(std::size_t len) {
    static const char* words[] = {"fix",      "parser",  "add",     "support", "for",  "streaming", "api",
                                  "refactor", "cache",   "improve", "docs",    "test", "release",   "bump",
                                  "handle",   "unicode", "edge",    "cases",   "&",    "<config>"};
    std::string s = "## Changes\n";
    while (s.size() < len) {
      s += "- ";
      for (int w = 0; w < 6 && s.size() < len; ++w) {
        s += words[rng.below(std::size(words))];
        s += ' ';
      }
      s += '\n';
    }
    s.resize(len);
    if (s.back() == ' ' || s.back() == '\n') s.back() = '.';
    return s;
  }

  void make_package(std::size_t idx, const std::string& eco, SizeClass size, int n_releases, int day_lo, int day_hi) {
    Package p;
    p.ecosystem = eco;
    p.size = size;
    p.owner = "org-" + std::to_string(idx % 400);
    const std::string stem = "pkg-" + std::to_string(idx);
    if (eco == "pypi" && rng.chance(0.3)) {
      p.name = "Pkg_" + std::to_string(idx);  // normalises onto the repo name
      p.repo = stem;
    } else if (eco == "rubygems" && rng.chance(0.3)) {
      p.name = "pkg_" + std::to_string(idx);
      p.repo = "pkg_" + std::to_string(idx);
    } else {
      p.name = stem;
      p.repo = stem;
    }
    if (size != SizeClass::Huge && rng.chance(0.03)) p.repo = p.repo + "-core";

    switch (size) {
      case SizeClass::Tiny: p.base = rng.log_uniform(1, 5); break;
      case SizeClass::Small: p.base = rng.log_uniform(6, 70); break;
      case SizeClass::Medium: p.base = rng.log_uniform(120, 900); break;
      case SizeClass::Large: p.base = rng.log_uniform(1150, 4000); break;
      case SizeClass::Huge: p.base = 11300; break;
    }
    p.pool_start = size == SizeClass::Huge ? 0 : static_cast<std::uint32_t>(rng.below(pool_size));
    if (size == SizeClass::Small && rng.chance(0.03)) p.abandon_day = rng.range(150, kDays - 1);

    if (size != SizeClass::Huge) {
      p.repo_fork = rng.chance(0.03);
      p.repo_zero_stars = rng.chance(0.03);
      p.repo_absent = rng.chance(0.01);
    }
    p.stars0 = rng.log_uniform(1, 5000);
    p.star_growth = rng.normal(0.3, 0.3);

    // Version line.
    const double series = rng.unit();
    const bool zero_ver = size != SizeClass::Huge && series < 0.35;
    int ma = zero_ver ? 0 : (series < 0.70 ? 1 : rng.range(2, 6));
    int mi = zero_ver ? 1 : rng.range(0, 4);
    int pa = 0;

    std::vector<int> days;
    for (int i = 0; i < n_releases; ++i) days.push_back(rng.range(day_lo, day_hi));
    std::sort(days.begin(), days.end());
    for (int i = 0; i < n_releases; ++i) {
      const double u = rng.unit();
      const Bump b = u < 0.12 ? Bump::Major : u < 0.42 ? Bump::Minor : Bump::Patch;
      Release r;
      r.day = days[i];
      std::string v;
      if (size == SizeClass::Huge) {
        static const Bump forced[] = {Bump::Minor, Bump::Patch, Bump::Minor, Bump::Patch, Bump::Major};
        if (i == 0) ma = 3, mi = 0, pa = 0;
        v = i == 0 ? "3.0.0" : next_version(ma, mi, pa, forced[(i - 1) % 5], false);
      } else {
        v = i == 0 ? std::to_string(ma) + "." + std::to_string(mi) + "." + std::to_string(pa)
                   : next_version(ma, mi, pa, b, zero_ver);
      }
      r.growth = size == SizeClass::Huge ? rng.normal(0.01, 0.005) : rng.normal(growth_mean(v), 0.10);

      // Textual quirks.
      const double q = rng.unit();
      if (size != SizeClass::Huge) {
        if (q < 0.03) v = "v" + v;
        else if (q < 0.04) v += "+build." + std::to_string(rng.range(1, 99));
        else if (q < 0.05) {
          static const char* bad[] = {"1.2", "01.2.3", "2022-04", "1.2.3.4", "release-5", "1.x.0"};
          v = bad[rng.below(std::size(bad))];
        }
      }
      if (rng.chance(0.30)) {
        const double l = rng.unit();
        std::size_t len = l < 0.02 ? 511 : l < 0.04 ? 512 : l < 0.45 ? static_cast<std::size_t>(rng.range(60, 510))
                                                                      : static_cast<std::size_t>(rng.range(513, 1800));
        r.notes = notes_text(len);
      }
      r.version = v;
      p.releases.push_back(r);

      if (size != SizeClass::Huge) {
        if (rng.chance(0.02)) {  // pre-release on its own day
          Release pre = r;
          pre.day = std::min(kLastReleaseDay, r.day + rng.range(1, 5));
          pre.version = std::to_string(ma) + "." + std::to_string(mi + 1) + ".0-rc." + std::to_string(rng.range(1, 3));
          pre.notes.clear();
          pre.growth = 0.0;
          p.releases.push_back(pre);
        }
        if (rng.chance(0.02)) {  // same-day twin
          Release twin = r;
          twin.version = std::to_string(ma) + "." + std::to_string(mi) + "." + std::to_string(pa + 1);
          ++pa;
          twin.notes.clear();
          twin.growth = 0.0;
          p.releases.push_back(twin);
        }
      }
    }

    if (size != SizeClass::Huge && rng.chance(0.01) && !p.releases.empty()) {
      const int d = p.releases[rng.below(p.releases.size())].day;
      p.gap_begin = std::max(0, d - 10);
      p.gap_end = d + 5;
    }
    std::stable_sort(p.releases.begin(), p.releases.end(), [](const Release& a, const Release& b) { return a.day < b.day; });
    packages.push_back(std::move(p));
  }

  /// Dependents requested for package p on day t, before any qualification.
  std::uint32_t target(const Package& p, int t) const {
    double g = 0.0;
    for (const auto& r : p.releases) {
      if (r.day > t) break;
      g += r.growth * std::min(1.0, (t - r.day) / 365.0);
    }
    const double cap = p.size == SizeClass::Huge ? pool_size : 3.0 * p.base;
    const double n = std::round(std::min(cap, p.base * std::exp(g)));
    return static_cast<std::uint32_t>(std::clamp(n, 0.0, static_cast<double>(pool_size)));
  }

  void build(std::size_t n_packages, double releases_scale) {
    make_pool();
    const char* ecos[] = {"npm", "pypi", "rubygems"};
    std::size_t idx = 0;
    for (const char* eco : ecos) make_package(idx++, eco, SizeClass::Huge, 5, 10, 355);
    for (int i = 0; i < 36; ++i) make_package(idx++, ecos[i % 3], SizeClass::Large, rng.range(2, 3), 5, 360);
    const std::size_t medium = 300;
    for (std::size_t i = 0; i < medium; ++i)
      make_package(idx++, ecos[i % 3], SizeClass::Medium, rng.range(1, 3), 1, kLastReleaseDay);
    while (idx < n_packages) {
      const double u = rng.unit();
      std::string eco = u < 0.50 ? "npm" : u < 0.78 ? "pypi" : u < 0.95 ? "rubygems" : (u < 0.975 ? "maven" : "nuget");
      const SizeClass size = rng.chance(0.18) ? SizeClass::Tiny : SizeClass::Small;
      const int n = std::max(1, static_cast<int>(std::lround(rng.range(4, 19) * releases_scale)));
      make_package(idx++, eco, size, n, 1, kLastReleaseDay);
    }
  }

  // ---- writers ----

  void write_repos(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    out << "{\"schema\":\"depgrowth.repo_snapshot/1\"}\n";
    // Dependent pool: weekly.
    for (std::uint32_t i = 0; i < pool_size; ++i) {
      const auto& r = pool[i];
      const int first = (r.start_day + 6) / 7 * 7;
      for (int d = first; d < kDays; d += 7) {
        const bool zero = r.zero_begin >= 0 && d >= r.zero_begin && d <= r.zero_end;
        out << "{\"snapshot_date\":\"" << iso(d) << "\",\"owner\":\"" << pool_owner(i) << "\",\"name\":\""
            << pool_name(i) << "\",\"stars\":" << (zero ? 0 : 1 + i % 50) << ",\"forks\":" << i % 7
            << ",\"is_fork\":" << (r.fork ? "true" : "false") << "}\n";
      }
      if (i == pool_size / 2) {
        out << "{\"snapshot_date\":\"2022-13-01\",\"owner\":\"bad\",\"name\":\"bad\",\"stars\":1,\"forks\":0,\"is_fork\":false}\n";
        out << "{\"snapshot_date\":\"2022-02-01\",\"owner\":\"bad\",\"name\":\"bad\",\"stars\":-4,\"forks\":0,\"is_fork\":false}\n";
      }
    }
    // Package repositories: daily, with sporadic missing days.
    for (const auto& p : packages) {
      if (p.repo_absent) continue;
      const std::string lang = p.ecosystem == "npm" ? "JavaScript" : p.ecosystem == "pypi" ? "Python"
                               : p.ecosystem == "rubygems" ? "Ruby" : "Java";
      for (int d = 0; d < kDays; ++d) {
        if (d >= p.gap_begin && d <= p.gap_end) continue;
        if (rng.chance(0.02)) continue;
        const auto stars = p.repo_zero_stars ? 0 : static_cast<long>(std::lround(p.stars0 * std::exp(p.star_growth * d / 730.0)));
        out << "{\"snapshot_date\":\"" << iso(d) << "\",\"owner\":\"" << p.owner << "\",\"name\":\"" << p.repo
            << "\",\"stars\":" << stars << ",\"forks\":" << stars / 10 << ",\"is_fork\":" << (p.repo_fork ? "true" : "false")
            << ",\"description\":\"Synthetic " << p.ecosystem << " package " << json_escape(p.name)
            << "\",\"topics\":[\"" << p.ecosystem << "\",\"synthetic\"],\"language\":\"" << lang << "\"}\n";
      }
    }
  }

  std::size_t write_releases(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    out << "{\"schema\":\"depgrowth.package_release/1\"}\n";
    std::size_t n = 0;
    for (std::size_t k = 0; k < packages.size(); ++k) {
      const auto& p = packages[k];
      for (const auto& r : p.releases) {
        out << "{\"release_date\":\"" << iso(r.day) << "\",\"ecosystem\":\"" << p.ecosystem << "\",\"package_name\":\""
            << p.name << "\",\"owner\":\"" << p.owner << "\",\"repo_name\":\"" << p.repo << "\",\"version\":\""
            << r.version << "\"";
        if (!r.notes.empty()) out << ",\"release_notes\":\"" << json_escape(r.notes) << "\"";
        out << "}\n";
        ++n;
      }
      if (k == 100) {
        out << "{\"release_date\":\"2022-05-05\",\"ecosystem\":\"NPM\",\"package_name\":\"x\",\"owner\":\"o\",\"repo_name\":\"x\",\"version\":\"1.0.0\"}\n";
        out << "{\"release_date\":\"2022-05-05\",\"ecosystem\":\"npm\",\"package_name\":\"x\",\"owner\":\"o\",\"version\":\"1.0.0\"}\n";
        out << "not json at all\n";
      }
    }
    return n;
  }

  std::size_t write_edges(const fs::path& path) {
    // Observation days per package: the pre-release day and each look-ahead
    // day of every release, a few dropped at random.
    std::vector<std::tuple<int, std::string, std::string, std::size_t>> obs;
    for (std::size_t k = 0; k < packages.size(); ++k) {
      const auto& p = packages[k];
      std::set<int> days;
      for (const auto& r : p.releases) {
        days.insert(r.day - 1);
        for (int o : kOffsets)
          if (r.day + o < kDays) days.insert(r.day + o);
      }
      for (int d : days)
        if (!rng.chance(0.03)) obs.emplace_back(d, p.ecosystem, p.name, k);
    }
    // Coverage probe at both ends of the window.
    obs.emplace_back(0, "npm", "coverage-probe", packages.size());
    obs.emplace_back(kDays - 1, "npm", "coverage-probe", packages.size());
    std::sort(obs.begin(), obs.end());

    std::ofstream out(path, std::ios::binary);
    out << "{\"schema\":\"depgrowth.dependent_edge/1\"}\n";
    std::size_t n = 0;
    auto edge = [&](int d, const std::string& eco, const std::string& pkg, const std::string& owner, const std::string& repo) {
      out << "{\"snapshot_date\":\"" << iso(d) << "\",\"dependent_owner\":\"" << owner << "\",\"dependent_repo\":\"" << repo
          << "\",\"ecosystem\":\"" << eco << "\",\"package_name\":\"" << pkg << "\"}\n";
      ++n;
    };
    bool wrote_bad = false;
    for (const auto& [d, eco, name, k] : obs) {
      if (k == packages.size()) {
        for (std::uint32_t i = 0; i < 3; ++i) edge(d, eco, name, pool_owner(i), pool_name(i));
        continue;
      }
      const auto& p = packages[k];
      if (p.abandon_day >= 0 && d >= p.abandon_day && !fork_ids.empty()) {
        for (std::size_t f = 0; f < std::min<std::size_t>(2, fork_ids.size()); ++f)
          edge(d, eco, name, pool_owner(fork_ids[f]), pool_name(fork_ids[f]));
        continue;
      }
      const auto n_deps = target(p, d);
      for (std::uint32_t i = 0; i < n_deps; ++i) {
        const std::uint32_t id = (p.pool_start + i) % pool_size;
        edge(d, eco, name, pool_owner(id), pool_name(id));
        if (rng.chance(0.005)) edge(d, eco, name, pool_owner(id), pool_name(id));
      }
      if (rng.chance(0.01))
        for (int g = rng.range(1, 3); g > 0; --g) edge(d, eco, name, "ghost-org", "ghost-" + std::to_string(rng.below(1000)));
      if (!wrote_bad && d > 200) {
        wrote_bad = true;
        out << "{\"snapshot_date\":\"" << iso(d) << "\",\"dependent_owner\":\"a\",\"dependent_repo\":\"b\",\"ecosystem\":\"" << eco << "\"}\n";
      }
    }
    return n;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic synthetic ecosystem for depgrowth end-to-end tests"};
  std::string out_dir;
  std::uint64_t seed = 20220101;
  std::size_t packages = 2000;
  std::uint32_t pool = 12000;
  double scale = 1.0;
  app.add_option("-o,--output-dir", out_dir, "Where to write the fixture")->required();
  app.add_option("--seed", seed, "Generator seed");
  app.add_option("--packages", packages, "Number of packages (at least 339)");
  app.add_option("--pool", pool, "Dependent repository pool size");
  app.add_option("--release-scale", scale, "Multiplier on releases per small package");
  CLI11_PARSE(app, argc, argv);
  if (packages < 339) {
    std::cerr << "--packages must be at least 339\n";
    return 2;
  }

  fs::create_directories(out_dir);
  Synth s(seed, pool);
  s.build(packages, scale);
  const fs::path dir(out_dir);
  const auto releases = s.write_releases(dir / "releases.ndjson");
  const auto edges = s.write_edges(dir / "edges.ndjson");
  s.write_repos(dir / "repos.ndjson");

  std::ofstream cfg(dir / "config.yaml");
  cfg << "inputs:\n  repos: repos.ndjson\n  releases: releases.ndjson\n  edges: edges.ndjson\n"
      << "output_dir: out\n"
      << "metrics:\n  grids: [one-year]\n  extra_offsets: [365]\n"
      << "analysis:\n  grid: one-year\n  table_offset: 365\n"
      << "run:\n  workers: 1\n  timestamp: \"2024-01-01T00:00:00Z\"\n";

  std::ofstream man(dir / "manifest.json");
  man << "{\"seed\":" << seed << ",\"packages\":" << s.packages.size() << ",\"pool\":" << pool
      << ",\"releases\":" << releases << ",\"edges\":" << edges << "}\n";
  std::cout << "packages=" << s.packages.size() << " releases=" << releases << " edges=" << edges << "\n";
  return 0;
}
