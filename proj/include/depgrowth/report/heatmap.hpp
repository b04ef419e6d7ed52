#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "depgrowth/report/summary.hpp"

namespace depgrowth::report {

struct HeatmapMatrix {
  std::string ecosystem;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<std::vector<std::optional<double>>> cells;  // [row][col] mean log-difference
};

struct Heatmap {
  std::vector<HeatmapMatrix> matrices;
  double lo = 0.0;  // shared by all matrices
  double hi = 0.0;
};

/// Half-width added on each side when every cell holds the same value.
inline constexpr double kDegenerateRangeEpsilon = 1e-6;

inline Heatmap heatmap_matrix(const SummaryTable& table) {
  Heatmap h;
  const auto labels = stratum_labels(table.by);
  std::vector<std::string> cols;
  for (auto c : semver::kAllColumns) cols.emplace_back(semver::to_string(c));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& eco : table.ecosystems) {
    HeatmapMatrix m{eco, labels, cols, {}};
    for (const auto& stratum : labels) {
      std::vector<std::optional<double>> row(cols.size());
      if (const auto* r = table.row(eco, stratum)) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
          if (!r->cells[c]) continue;
          row[c] = r->cells[c]->mean;
          lo = std::min(lo, r->cells[c]->mean);
          hi = std::max(hi, r->cells[c]->mean);
        }
      }
      m.cells.push_back(std::move(row));
    }
    h.matrices.push_back(std::move(m));
  }
  if (lo > hi) lo = hi = 0.0;  // no cells at all
  if (lo == hi) {
    lo -= kDegenerateRangeEpsilon;
    hi += kDegenerateRangeEpsilon;
  }
  h.lo = lo;
  h.hi = hi;
  return h;
}

struct Rgb {
  int r, g, b;
};

/// Linear ramp in RGB from kRampLow (value == lo) to kRampHigh (value == hi).
inline constexpr Rgb kRampLow{247, 251, 255};
inline constexpr Rgb kRampHigh{8, 48, 107};

inline Rgb ramp_color(double value, double lo, double hi) {
  double t = hi > lo ? (value - lo) / (hi - lo) : 0.5;
  t = std::clamp(t, 0.0, 1.0);
  auto mix = [t](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * t));
  };
  return {mix(kRampLow.r, kRampHigh.r), mix(kRampLow.g, kRampHigh.g),
          mix(kRampLow.b, kRampHigh.b)};
}

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string hex(Rgb c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

inline std::string xml_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

}  // namespace detail

/// One panel per matrix, side by side, sharing the colour scale. Absent cells
/// are hatched. Labels use three decimals.
inline std::string render_heatmap_svg(const Heatmap& h, const std::string& title = "") {
  constexpr int cell_w = 80, cell_h = 40, label_w = 110, header_h = 60, gap = 30, legend_h = 50;
  std::size_t max_rows = 0, max_cols = 0;
  for (const auto& m : h.matrices) {
    max_rows = std::max(max_rows, m.row_labels.size());
    max_cols = std::max(max_cols, m.col_labels.size());
  }
  const int panel_w = label_w + static_cast<int>(max_cols) * cell_w;
  const int n_panels = std::max<int>(1, static_cast<int>(h.matrices.size()));
  const int width = n_panels * panel_w + (n_panels + 1) * gap;
  const int height = header_h + static_cast<int>(max_rows) * cell_h + legend_h + gap;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
       "\" height=\"" + std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<defs><pattern id=\"absent\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\" "
       "patternTransform=\"rotate(45)\"><rect width=\"8\" height=\"8\" fill=\"#ffffff\"/>"
       "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#999999\" stroke-width=\"2\"/>"
       "</pattern></defs>\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!title.empty())
    s += "<text x=\"" + std::to_string(gap) + "\" y=\"20\" font-size=\"14\">" +
         detail::xml_text(title) + "</text>\n";

  for (std::size_t p = 0; p < h.matrices.size(); ++p) {
    const auto& m = h.matrices[p];
    const int x0 = gap + static_cast<int>(p) * (panel_w + gap);
    s += "<g id=\"panel-" + detail::xml_text(m.ecosystem) + "\">\n";
    s += "<text x=\"" + std::to_string(x0 + label_w) + "\" y=\"38\" font-weight=\"bold\">" +
         detail::xml_text(m.ecosystem) + "</text>\n";
    for (std::size_t c = 0; c < m.col_labels.size(); ++c)
      s += "<text x=\"" + std::to_string(x0 + label_w + static_cast<int>(c) * cell_w + cell_w / 2) +
           "\" y=\"54\" text-anchor=\"middle\">" + detail::xml_text(m.col_labels[c]) + "</text>\n";
    for (std::size_t r = 0; r < m.row_labels.size(); ++r) {
      const int y = header_h + static_cast<int>(r) * cell_h;
      s += "<text x=\"" + std::to_string(x0 + label_w - 6) + "\" y=\"" +
           std::to_string(y + cell_h / 2 + 4) + "\" text-anchor=\"end\">" +
           detail::xml_text(m.row_labels[r]) + "</text>\n";
      for (std::size_t c = 0; c < m.col_labels.size(); ++c) {
        const int x = x0 + label_w + static_cast<int>(c) * cell_w;
        const auto& v = m.cells[r][c];
        const std::string rect = "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                                 "\" width=\"" + std::to_string(cell_w) + "\" height=\"" +
                                 std::to_string(cell_h) + "\" stroke=\"#ffffff\" fill=\"";
        if (!v) {
          s += rect + "url(#absent)\" class=\"absent\"/>\n";
          continue;
        }
        const auto color = ramp_color(*v, h.lo, h.hi);
        const double lum = 0.299 * color.r + 0.587 * color.g + 0.114 * color.b;
        s += rect + detail::hex(color) + "\"/>\n";
        s += "<text x=\"" + std::to_string(x + cell_w / 2) + "\" y=\"" +
             std::to_string(y + cell_h / 2 + 4) + "\" text-anchor=\"middle\" fill=\"" +
             (lum < 128 ? "#ffffff" : "#000000") + "\">" + detail::fmt("%.3f", *v) + "</text>\n";
      }
    }
    s += "</g>\n";
  }

  const int ly = header_h + static_cast<int>(max_rows) * cell_h + 20;
  s += "<defs><linearGradient id=\"ramp\"><stop offset=\"0\" stop-color=\"" +
       detail::hex(kRampLow) + "\"/><stop offset=\"1\" stop-color=\"" + detail::hex(kRampHigh) +
       "\"/></linearGradient></defs>\n";
  s += "<rect x=\"" + std::to_string(gap) + "\" y=\"" + std::to_string(ly) +
       "\" width=\"200\" height=\"12\" fill=\"url(#ramp)\"/>\n";
  s += "<text x=\"" + std::to_string(gap) + "\" y=\"" + std::to_string(ly + 26) + "\">" +
       detail::fmt("%.3f", h.lo) + "</text>\n";
  s += "<text x=\"" + std::to_string(gap + 200) + "\" y=\"" + std::to_string(ly + 26) +
       "\" text-anchor=\"end\">" + detail::fmt("%.3f", h.hi) + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace depgrowth::report
