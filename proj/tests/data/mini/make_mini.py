#!/usr/bin/env python3
"""Writes the small CLI fixture in this directory.

Seven packages over three analysed ecosystems plus maven, twenty dependent
repositories, weekly repository snapshots and dependent observations around
each release. Output is fully determined by this file.

    make_mini.py [OUT_DIR]
"""

import datetime as dt
import json
import os
import sys

START = dt.date(2022, 1, 1)
LAST_DAY = 735
OFFSETS = [0, 90, 180, 270, 360, 365]

# ecosystem, package, repo, base dependents, growth per quarter
PACKAGES = [
    ("npm", "alpha", "alpha", 9, 2),
    ("npm", "beta", "beta", 6, 1),
    ("pypi", "gamma_py", "Gamma-Py", 12, 1),
    ("pypi", "delta", "delta", 7, 0),
    ("rubygems", "eps", "eps", 8, 2),
    ("rubygems", "zeta", "zeta", 10, -1),
    ("maven", "mvn", "mvn", 8, 1),
]

# package -> [(day, version, has long notes)]
RELEASES = {
    "alpha": [(40, "1.0.0", True), (130, "1.1.0", True), (200, "1.1.1", False), (260, "2.0.0-rc.1", False)],
    "beta": [(45, "0.3.0", True), (150, "0.3.1", False), (150, "0.4.0", False), (300, "v0.5.0", True)],
    "gamma_py": [(50, "2.0.0", True), (140, "2.1.0", False), (220, "2.1.1", True)],
    "delta": [(60, "1.0.0", False), (160, "1.0.1", True), (240, "1.x", False)],
    "eps": [(35, "0.1.0", True), (120, "0.1.1", True), (210, "1.0.0+build.7", False)],
    "zeta": [(55, "3.0.0", False), (145, "3.1.0", True), (230, "3.1.1", True)],
    "mvn": [(70, "1.0.0", True)],
}

POOL = 20
FORK_DEPENDENT = 19
ZERO_STAR_DEPENDENT = 18


def iso(day):
    return (START + dt.timedelta(days=day)).isoformat()


def notes(pkg, version):
    line = "- %s %s: reworked the request pipeline and added streaming support.\n" % (pkg, version)
    return "## Changes\n" + line * (600 // len(line) + 1)


def write(path, schema, rows):
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps({"schema": schema}) + "\n")
        for r in rows:
            f.write(r if isinstance(r, str) else json.dumps(r, separators=(",", ":")))
            f.write("\n")


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))

    repos = []
    for day in range(0, LAST_DAY + 1, 7):
        for eco, pkg, repo, _, _ in PACKAGES:
            repos.append({"snapshot_date": iso(day), "owner": "mini", "name": repo,
                          "stars": 40 + day // 7, "forks": 3 + day // 30, "is_fork": False,
                          "description": "%s package" % pkg, "topics": [eco], "language": "Python"})
        for i in range(POOL):
            repos.append({"snapshot_date": iso(day), "owner": "users", "name": "dep%02d" % i,
                          "stars": 0 if i == ZERO_STAR_DEPENDENT else 1 + i,
                          "forks": i % 3, "is_fork": i == FORK_DEPENDENT})
    repos.append('{"snapshot_date":"2022-13-01","owner":"mini","name":"broken"}')

    releases = []
    for eco, pkg, repo, _, _ in PACKAGES:
        for day, version, long_notes in RELEASES[pkg]:
            r = {"release_date": iso(day), "ecosystem": eco, "package_name": pkg,
                 "owner": "mini", "repo_name": repo, "version": version}
            if long_notes:
                r["release_notes"] = notes(pkg, version)
            releases.append(r)
    releases.sort(key=lambda r: (r["release_date"], r["ecosystem"], r["package_name"], r["version"]))

    edges = []
    for eco, pkg, _, base, growth in PACKAGES:
        days = set()
        for day, _, _ in RELEASES[pkg]:
            for o in OFFSETS:
                d = day - 1 if o == 0 else day + o
                if d <= LAST_DAY:
                    days.add(d)
        for d in sorted(days):
            n = max(1, base + growth * (d // 90))
            # The fork and the zero-star dependent always depend but never count.
            members = list(range(min(n, POOL - 2))) + [FORK_DEPENDENT, ZERO_STAR_DEPENDENT]
            for i in members:
                edges.append((d, eco, pkg, "dep%02d" % i))
    edges.append((0, "npm", "coverage-probe", "dep00"))
    edges.append((LAST_DAY, "npm", "coverage-probe", "dep00"))
    edges.sort()
    edge_rows = [{"snapshot_date": iso(d), "dependent_owner": "users", "dependent_repo": dep,
                  "ecosystem": eco, "package_name": pkg} for d, eco, pkg, dep in edges]

    write(os.path.join(out, "repos.ndjson"), "depgrowth.repo_snapshot/1", repos)
    write(os.path.join(out, "releases.ndjson"), "depgrowth.package_release/1", releases)
    write(os.path.join(out, "edges.ndjson"), "depgrowth.dependent_edge/1", edge_rows)

    human = []
    for k, r in enumerate(r for r in releases if "release_notes" in r):
        key = "%s:%s@%s#%s" % (r["ecosystem"], r["package_name"], r["version"], r["release_date"])
        human.append({"release_key": key, "rating": 1 + (k * 3) % 7})
    write(os.path.join(out, "human_ratings.ndjson"), "depgrowth.human_rating/1", human)

    with open(os.path.join(out, "config.yaml"), "w") as f:
        f.write("""inputs:
  repos: repos.ndjson
  releases: releases.ndjson
  edges: edges.ndjson
output_dir: out
filter:
  ecosystems: [npm, pypi, rubygems]
  dependent_threshold: 5
metrics:
  grids: [one-year]
  extra_offsets: [365]
analysis:
  grid: one-year
  table_offset: 365
  alpha: 0.05
complexity:
  enabled: true
  client: mock
  initial_backoff_ms: 0
  human_ratings: human_ratings.ndjson
run:
  workers: 1
  timestamp: "2024-01-01T00:00:00Z"
""")


if __name__ == "__main__":
    main()
