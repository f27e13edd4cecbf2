#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dayflow/errors.hpp"
#include "dayflow/similarity.hpp"
#include "dayflow/tpa.hpp"

namespace dayflow {

struct Rgb {
  int r = 0, g = 0, b = 0;

  std::string hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
  }
};

inline Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto mix = [t](int x, int y) {
    return static_cast<int>(std::lround(x + (y - x) * t));
  };
  return Rgb{mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

// Anchor colors are explicit RGB triples; no external color semantics.
// Absolute maps ramp white-blue; relative maps diverge blue-neutral-red with
// green for elements absent from the base model.
struct Palette {
  std::string name = "red-neutral-blue";
  Rgb absolute_low{247, 251, 255};
  Rgb absolute_high{8, 48, 107};
  Rgb below{33, 102, 172};
  Rgb neutral{247, 247, 247};
  Rgb above{178, 24, 43};
  Rgb novel{27, 120, 55};
};

inline Palette palette_by_name(const std::string& name) {
  if (name == "red-neutral-blue") return Palette{};
  throw ConfigError("unknown palette '" + name + "'");
}

// Ratio clamp for relative coloring; shares vary over orders of magnitude,
// so the scale is logarithmic with r=1 at the neutral midpoint.
inline constexpr double kRatioClampLow = 0.25;
inline constexpr double kRatioClampHigh = 4.0;

struct RenderedGraph {
  std::string dot;
  nlohmann::json legend;
};

namespace detail {

// Escapes raw text for inclusion inside a DOT quoted string.
inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string dot_quote(const std::string& s) {
  return "\"" + dot_escape(s) + "\"";
}

inline std::string format_hours_minutes(double seconds) {
  const long long minutes = std::llround(seconds / 60.0);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld:%02lld", minutes / 60, minutes % 60);
  return buf;
}

// Label text is pre-escaped; the embedded \n is a DOT line break.
inline std::string node_label(const std::string& loc, const TpaState& st) {
  return dot_escape(loc) + "\\n" + format_hours_minutes(st.mean_dwell()) +
         " x " + std::to_string(st.visit_count);
}

inline std::string font_for(const Rgb& fill) {
  const double luma = 0.299 * fill.r + 0.587 * fill.g + 0.114 * fill.b;
  return luma < 140.0 ? "#ffffff" : "#000000";
}

inline bool is_synthetic(const std::string& state) {
  return state == kStartState || state == kEndState;
}

// Frequency shares over real location-to-location transitions only; the
// synthetic start/end arcs are drawn at fixed width.
inline std::map<Transition, double> real_edge_shares(const Tpa& tpa) {
  std::map<Transition, double> shares;
  std::int64_t total = 0;
  for (const auto& [tr, count] : tpa.transitions)
    if (!is_synthetic(tr.first) && !is_synthetic(tr.second)) total += count;
  if (total == 0) return shares;
  for (const auto& [tr, count] : tpa.transitions)
    if (!is_synthetic(tr.first) && !is_synthetic(tr.second))
      shares[tr] = static_cast<double>(count) / static_cast<double>(total);
  return shares;
}

inline std::string penwidth(double width) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%.2f", width);
  return buf;
}

struct DotBuilder {
  std::string text = "digraph tpa {\n  rankdir=LR;\n  node [style=filled, fontname=\"Helvetica\"];\n  edge [fontname=\"Helvetica\", fontsize=10];\n";

  // label is already escaped for a DOT quoted string; id is raw.
  void node(const std::string& id, const std::string& label,
            const Rgb& fill, const std::string& shape = "box") {
    text += "  " + dot_quote(id) + " [label=\"" + label +
            "\", shape=" + shape + ", fillcolor=\"" + fill.hex() +
            "\", fontcolor=\"" + font_for(fill) + "\"];\n";
  }
  void edge(const Transition& tr, std::int64_t count, double width,
            const Rgb& color) {
    text += "  " + dot_quote(tr.first) + " -> " + dot_quote(tr.second) +
            " [label=\"" + std::to_string(count) + "\", penwidth=" +
            penwidth(width) + ", color=\"" + color.hex() + "\"];\n";
  }
  std::string finish() {
    text += "}\n";
    return std::move(text);
  }
};

}  // namespace detail

// Process map with absolute coloring: node fill ramps linearly with the
// location's share of total dwell (darkest at the maximum share) and edge
// width ramps linearly with transition-frequency share between 1 and 5.
inline RenderedGraph render_absolute(const Tpa& tpa, const Palette& palette) {
  const auto profile = duration_profile(tpa);
  double max_fraction = 0.0;
  for (const auto& [loc, f] : profile) max_fraction = std::max(max_fraction, f);
  const auto shares = detail::real_edge_shares(tpa);
  double max_share = 0.0;
  for (const auto& [tr, p] : shares) max_share = std::max(max_share, p);

  detail::DotBuilder dot;
  dot.node(kStartState, "Start", palette.neutral, "circle");
  for (const auto& [loc, st] : tpa.states) {
    const double t = max_fraction > 0.0 ? profile.at(loc) / max_fraction : 0.0;
    dot.node(loc, detail::node_label(loc, st),
             lerp(palette.absolute_low, palette.absolute_high, t));
  }
  dot.node(kEndState, "End", palette.neutral, "doublecircle");

  const Rgb edge_color{64, 64, 64};
  for (const auto& [tr, count] : tpa.transitions) {
    double width = 1.0;
    auto it = shares.find(tr);
    if (it != shares.end() && max_share > 0.0)
      width = 1.0 + 4.0 * (it->second / max_share);
    dot.edge(tr, count, width, edge_color);
  }

  RenderedGraph out;
  out.dot = dot.finish();
  out.legend = {{"mode", "absolute"},
                {"palette", palette.name},
                {"node_scale",
                 {{"low_color", palette.absolute_low.hex()},
                  {"high_color", palette.absolute_high.hex()},
                  {"max_fraction", max_fraction}}},
                {"edge_scale",
                 {{"min_width", 1.0},
                  {"max_width", 5.0},
                  {"max_share", max_share}}}};
  return out;
}

namespace detail {

inline Rgb ratio_color(double cluster_share, double base_share,
                       const Palette& palette) {
  if (base_share <= 0.0) return palette.novel;
  const double r = std::clamp(cluster_share / base_share, kRatioClampLow,
                              kRatioClampHigh);
  const double t = std::log2(r) / 2.0;  // [-1, 1], 0 at parity
  if (t < 0.0) return lerp(palette.neutral, palette.below, -t);
  return lerp(palette.neutral, palette.above, t);
}

}  // namespace detail

// Process map colored relative to a base model: each node/edge takes a
// diverging color from the ratio of its share in the cluster to its share in
// the base (log scale, neutral at 1). Elements absent from the base use the
// novel color.
inline RenderedGraph render_relative(const Tpa& base, const Tpa& cluster,
                                     const Palette& palette) {
  const auto base_profile = duration_profile(base);
  const auto cluster_profile = duration_profile(cluster);
  const auto base_edges = edge_shares(base);
  const auto cluster_edges = edge_shares(cluster);

  auto base_fraction = [&](const std::string& loc) {
    auto it = base_profile.find(loc);
    return it == base_profile.end() ? 0.0 : it->second;
  };
  auto base_edge_share = [&](const Transition& tr) {
    auto it = base_edges.find(tr);
    return it == base_edges.end() ? 0.0 : it->second;
  };

  const auto shares = detail::real_edge_shares(cluster);
  double max_share = 0.0;
  for (const auto& [tr, p] : shares) max_share = std::max(max_share, p);

  detail::DotBuilder dot;
  dot.node(kStartState, "Start", palette.neutral, "circle");
  for (const auto& [loc, st] : cluster.states) {
    dot.node(loc, detail::node_label(loc, st),
             detail::ratio_color(cluster_profile.at(loc), base_fraction(loc),
                                 palette));
  }
  dot.node(kEndState, "End", palette.neutral, "doublecircle");

  for (const auto& [tr, count] : cluster.transitions) {
    double width = 1.0;
    auto it = shares.find(tr);
    if (it != shares.end() && max_share > 0.0)
      width = 1.0 + 4.0 * (it->second / max_share);
    dot.edge(tr, count, width,
             detail::ratio_color(cluster_edges.at(tr), base_edge_share(tr),
                                 palette));
  }

  RenderedGraph out;
  out.dot = dot.finish();
  out.legend = {{"mode", "relative"},
                {"palette", palette.name},
                {"ratio_scale",
                 {{"clamp_low", kRatioClampLow},
                  {"clamp_high", kRatioClampHigh},
                  {"neutral_ratio", 1.0},
                  {"below_color", palette.below.hex()},
                  {"neutral_color", palette.neutral.hex()},
                  {"above_color", palette.above.hex()},
                  {"novel_color", palette.novel.hex()}}}};
  return out;
}

}  // namespace dayflow
