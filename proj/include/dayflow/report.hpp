#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dayflow/errors.hpp"
#include "dayflow/grouping.hpp"
#include "dayflow/qt_cluster.hpp"
#include "dayflow/render.hpp"
#include "dayflow/tpa.hpp"

namespace dayflow {

struct TransitionCount {
  std::string from;
  std::string to;
  std::int64_t count = 0;
};

struct ClusterReport {
  std::size_t size = 0;
  std::vector<std::string> members;
  std::map<std::string, double> duration_profile;
  std::vector<TransitionCount> top_transitions;
  std::map<std::string, double> delta_vs_base;  // cluster share - base share
};

// Per-location daily behaviour figures: visits are aggregated per visit in
// the model, so the per-day view is reported alongside.
struct LocationDaily {
  double visits_per_day = 0.0;
  double mean_daily_dwell_seconds = 0.0;
};

struct GroupReport {
  std::string level;
  std::size_t day_count = 0;
  std::map<std::string, double> duration_profile;
  std::vector<TransitionCount> top_transitions;
  std::map<std::string, LocationDaily> per_location_daily;
  std::vector<ClusterReport> clusters;
  std::vector<std::string> outliers;
};

namespace detail {

// Highest-frequency real transitions, ties broken lexicographically.
inline std::vector<TransitionCount> top_transitions(const Tpa& tpa,
                                                    std::size_t k) {
  std::vector<TransitionCount> all;
  for (const auto& [tr, count] : tpa.transitions)
    if (!is_synthetic(tr.first) && !is_synthetic(tr.second))
      all.push_back(TransitionCount{tr.first, tr.second, count});
  std::sort(all.begin(), all.end(),
            [](const TransitionCount& a, const TransitionCount& b) {
              if (a.count != b.count) return a.count > b.count;
              if (a.from != b.from) return a.from < b.from;
              return a.to < b.to;
            });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace detail

// Builds the statistical summary for one group. Profiles are recomputed from
// the referenced models, never cached from earlier stages.
inline GroupReport build_group_report(ActivityLevel level,
                                      const std::vector<std::string>& group_days,
                                      const Tpa& base,
                                      const Clustering& clustering,
                                      std::size_t top_k = 5) {
  std::set<std::string> group_set(group_days.begin(), group_days.end());
  std::set<std::string> seen;
  std::size_t clustered = 0;
  auto check_member = [&](const std::string& id) {
    if (!group_set.count(id))
      throw IntegrityError("day " + id + " appears in the clustering but not in group " +
                           to_string(level));
    if (!seen.insert(id).second)
      throw IntegrityError("day " + id + " appears twice in the clustering of group " +
                           to_string(level));
  };
  for (const auto& cluster : clustering.clusters) {
    for (const auto& id : cluster.members) check_member(id);
    clustered += cluster.members.size();
  }
  for (const auto& id : clustering.outliers) check_member(id);
  if (clustered + clustering.outliers.size() != group_days.size())
    throw IntegrityError("clusters + outliers do not cover group " +
                         to_string(level));

  GroupReport report;
  report.level = to_string(level);
  report.day_count = group_days.size();
  report.duration_profile = duration_profile(base);
  report.top_transitions = detail::top_transitions(base, top_k);
  for (const auto& [loc, st] : base.states) {
    const double days = static_cast<double>(base.trace_count);
    report.per_location_daily[loc] = LocationDaily{
        static_cast<double>(st.visit_count) / days,
        static_cast<double>(st.total_dwell) / days};
  }
  report.outliers = clustering.outliers;

  for (const auto& cluster : clustering.clusters) {
    ClusterReport cr;
    cr.size = cluster.members.size();
    cr.members = cluster.members;
    cr.duration_profile = duration_profile(cluster.model);
    cr.top_transitions = detail::top_transitions(cluster.model, top_k);
    for (const auto& [loc, f] : cr.duration_profile) cr.delta_vs_base[loc] = f;
    for (const auto& [loc, f] : report.duration_profile) {
      cr.delta_vs_base[loc] -= f;  // inserts -f for locations the cluster lacks
    }
    report.clusters.push_back(std::move(cr));
  }
  return report;
}

inline nlohmann::json report_to_json(const std::vector<GroupReport>& reports) {
  auto transitions_json = [](const std::vector<TransitionCount>& ts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : ts)
      arr.push_back({{"from", t.from}, {"to", t.to}, {"count", t.count}});
    return arr;
  };
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : r.clusters) {
      clusters.push_back({{"size", c.size},
                          {"members", c.members},
                          {"duration_profile", c.duration_profile},
                          {"top_transitions", transitions_json(c.top_transitions)},
                          {"delta_vs_base", c.delta_vs_base}});
    }
    nlohmann::json daily = nlohmann::json::object();
    for (const auto& [loc, d] : r.per_location_daily)
      daily[loc] = {{"visits_per_day", d.visits_per_day},
                    {"mean_daily_dwell_seconds", d.mean_daily_dwell_seconds}};
    nlohmann::json g = {{"level", r.level},
                        {"day_count", r.day_count},
                        {"duration_profile", r.duration_profile},
                        {"top_transitions", transitions_json(r.top_transitions)},
                        {"per_location_daily", std::move(daily)},
                        {"clusters", std::move(clusters)}};
    if (!r.outliers.empty()) g["outliers"] = r.outliers;
    groups.push_back(std::move(g));
  }
  return {{"groups", std::move(groups)}};
}

namespace detail {

inline std::string percent(double f) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.1f%%", f * 100.0);
  return buf;
}

inline std::string signed_percent(double f) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%+.1f%%", f * 100.0);
  return buf;
}

}  // namespace detail

inline std::string report_to_markdown(const std::vector<GroupReport>& reports) {
  std::string md = "# Behaviour report\n";
  for (const auto& r : reports) {
    md += "\n## " + r.level + " (" + std::to_string(r.day_count) + " days)\n\n";
    md += "| Location | Share of day | Dwell per day | Visits per day |\n";
    md += "|---|---|---|---|\n";
    std::vector<std::pair<std::string, double>> by_share(
        r.duration_profile.begin(), r.duration_profile.end());
    std::sort(by_share.begin(), by_share.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    for (const auto& [loc, share] : by_share) {
      const auto& daily = r.per_location_daily.at(loc);
      md += "| " + loc + " | " + detail::percent(share) + " | " +
            detail::format_hours_minutes(daily.mean_daily_dwell_seconds) +
            " | ";
      char buf[16];
      std::snprintf(buf, sizeof buf, "%.1f", daily.visits_per_day);
      md += std::string(buf) + " |\n";
    }
    if (!r.top_transitions.empty()) {
      md += "\nTop transitions:\n\n";
      for (const auto& t : r.top_transitions)
        md += "- " + t.from + " -> " + t.to + " (" + std::to_string(t.count) +
              ")\n";
    }
    int index = 1;
    for (const auto& c : r.clusters) {
      md += "\n### Cluster " + std::to_string(index++) + " - " +
            std::to_string(c.size) + " days\n\n";
      md += "| Location | Share | Delta vs base |\n|---|---|---|\n";
      std::vector<std::pair<std::string, double>> rows(
          c.duration_profile.begin(), c.duration_profile.end());
      std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
      });
      for (const auto& [loc, share] : rows) {
        md += "| " + loc + " | " + detail::percent(share) + " | " +
              detail::signed_percent(c.delta_vs_base.at(loc)) + " |\n";
      }
      if (!c.top_transitions.empty()) {
        md += "\nTop transitions:\n\n";
        for (const auto& t : c.top_transitions)
          md += "- " + t.from + " -> " + t.to + " (" +
                std::to_string(t.count) + ")\n";
      }
    }
    if (!r.outliers.empty()) {
      md += "\nOutliers: ";
      for (std::size_t i = 0; i < r.outliers.size(); ++i) {
        if (i) md += ", ";
        md += r.outliers[i];
      }
      md += "\n";
    }
  }
  return md;
}

}  // namespace dayflow
