#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dayflow/errors.hpp"
#include "dayflow/event_log.hpp"
#include "dayflow/grouping.hpp"
#include "dayflow/io.hpp"
#include "dayflow/qt_cluster.hpp"
#include "dayflow/render.hpp"
#include "dayflow/report.hpp"
#include "dayflow/similarity.hpp"
#include "dayflow/synth.hpp"
#include "dayflow/tpa.hpp"

namespace dayflow {

struct PipelineConfig {
  std::string input;                  // CSV path (possibly .gz); or
  std::optional<SynthConfig> synth;   // generate the log instead
  std::string timezone = "UTC";
  DayClose day_close = DayClose::kMidnight;
  LevelThresholds thresholds;
  QtParams qt;
  SimilarityWeights weights;
  std::string palette = "red-neutral-blue";
  std::string out_dir;

  void validate() const {
    if (input.empty() == !synth.has_value())
      throw ConfigError("exactly one of 'input' and 'synth' must be set");
    thresholds.validate();
    qt.validate();
    weights.validate();
    parse_timezone(timezone);
    palette_by_name(palette);
    if (out_dir.empty()) throw ConfigError("out_dir must be set");
  }
};

inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  PipelineConfig cfg;
  if (j.contains("input")) cfg.input = j.at("input").get<std::string>();
  if (j.contains("synth")) cfg.synth = synth_config_from_json(j.at("synth"));
  if (j.contains("timezone")) cfg.timezone = j.at("timezone").get<std::string>();
  if (j.contains("day_close"))
    cfg.day_close = parse_day_close(j.at("day_close").get<std::string>());
  if (j.contains("levels")) {
    cfg.thresholds.low = j.at("levels").value("low", cfg.thresholds.low);
    cfg.thresholds.high = j.at("levels").value("high", cfg.thresholds.high);
  }
  if (j.contains("qt")) {
    cfg.qt.similarity_threshold =
        j.at("qt").value("similarity_threshold", cfg.qt.similarity_threshold);
    cfg.qt.join_fraction = j.at("qt").value("join_fraction", cfg.qt.join_fraction);
  }
  if (j.contains("weights")) {
    cfg.weights.edge = j.at("weights").value("edge", cfg.weights.edge);
    cfg.weights.node = j.at("weights").value("node", cfg.weights.node);
  }
  if (j.contains("render"))
    cfg.palette = j.at("render").value("palette", cfg.palette);
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  return cfg;
}

// ---- stage payloads ----

struct DaySet {
  std::string timezone;
  DayClose day_close = DayClose::kMidnight;
  std::string subject;
  std::vector<DayTrace> days;
};

inline DaySet stage_ingest(const std::string& csv_bytes, const TimeZone& zone,
                           DayClose day_close) {
  const ParsedEvents parsed = parse_events(csv_bytes);
  DaySet out;
  out.timezone = zone.name;
  out.day_close = day_close;
  if (parsed.locations.empty()) return out;
  out.subject = parsed.locations.front().subject;
  out.days = segment_days(parsed.locations, parsed.steps,
                          SegmentOptions{zone, day_close});
  return out;
}

inline nlohmann::json dayset_to_json(const DaySet& set) {
  nlohmann::json days = nlohmann::json::array();
  for (const auto& t : set.days) days.push_back(day_trace_to_json(t));
  return {{"timezone", set.timezone},
          {"day_close", to_string(set.day_close)},
          {"subject", set.subject},
          {"days", std::move(days)}};
}

inline DaySet dayset_from_json(const nlohmann::json& j) {
  DaySet set;
  set.timezone = j.at("timezone").get<std::string>();
  set.day_close = parse_day_close(j.at("day_close").get<std::string>());
  set.subject = j.at("subject").get<std::string>();
  for (const auto& d : j.at("days")) set.days.push_back(day_trace_from_json(d));
  return set;
}

inline nlohmann::json groups_to_json(const LevelGroups& groups,
                                     const LevelThresholds& thresholds) {
  nlohmann::json g = nlohmann::json::object();
  for (ActivityLevel level : kAllLevels) g[to_string(level)] = groups.of(level);
  return {{"thresholds", {{"low", thresholds.low}, {"high", thresholds.high}}},
          {"groups", std::move(g)}};
}

inline LevelGroups groups_from_json(const nlohmann::json& j) {
  LevelGroups groups;
  for (ActivityLevel level : kAllLevels)
    groups.of(level) =
        j.at("groups").at(to_string(level)).get<std::vector<std::string>>();
  return groups;
}

// Discovered models for one non-empty group: the base model over all member
// days plus one model per day (the clustering inputs).
struct GroupModels {
  ActivityLevel level = ActivityLevel::kInsufficient;
  Tpa base;
  std::vector<std::pair<std::string, Tpa>> per_day;  // ordered by day id
};

inline std::vector<GroupModels> stage_discover(const DaySet& set,
                                               const LevelGroups& groups) {
  std::map<std::string, const DayTrace*> by_id;
  for (const auto& t : set.days) by_id[t.date] = &t;
  std::vector<GroupModels> out;
  for (ActivityLevel level : kAllLevels) {
    const auto& ids = groups.of(level);
    if (ids.empty()) continue;
    GroupModels gm;
    gm.level = level;
    std::vector<DayTrace> traces;
    traces.reserve(ids.size());
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end())
        throw DataError("group " + to_string(level) + " references unknown day " + id);
      traces.push_back(*it->second);
      gm.per_day.emplace_back(
          id, discover_tpa(std::span<const DayTrace>(it->second, 1)));
    }
    std::sort(gm.per_day.begin(), gm.per_day.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    gm.base = discover_tpa(traces);
    out.push_back(std::move(gm));
  }
  return out;
}

inline nlohmann::json models_to_json(const std::vector<GroupModels>& models) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& gm : models) {
    nlohmann::json per_day = nlohmann::json::array();
    for (const auto& [id, tpa] : gm.per_day)
      per_day.push_back({{"day", id}, {"tpa", tpa_to_json(tpa)}});
    groups.push_back({{"level", to_string(gm.level)},
                      {"base", tpa_to_json(gm.base)},
                      {"per_day", std::move(per_day)}});
  }
  return {{"groups", std::move(groups)}};
}

inline std::vector<GroupModels> models_from_json(const nlohmann::json& j) {
  std::vector<GroupModels> out;
  for (const auto& g : j.at("groups")) {
    GroupModels gm;
    gm.level = activity_level_from_string(g.at("level").get<std::string>());
    gm.base = tpa_from_json(g.at("base"));
    for (const auto& d : g.at("per_day"))
      gm.per_day.emplace_back(d.at("day").get<std::string>(),
                              tpa_from_json(d.at("tpa")));
    out.push_back(std::move(gm));
  }
  return out;
}

// Clusters one group from its per-day models. Merged cluster models are the
// sums of the member models, which equals discovery over the member traces.
inline Clustering stage_cluster_group(const GroupModels& gm,
                                      const QtParams& params,
                                      const SimilarityWeights& weights) {
  params.validate();
  weights.validate();
  const SimilarityMatrix matrix = similarity_matrix(gm.per_day, weights);
  const Partition partition = qt_cluster(matrix, params);
  std::map<std::string, const Tpa*> by_id;
  for (const auto& [id, tpa] : gm.per_day) by_id[id] = &tpa;
  Clustering out;
  out.params = params;
  out.weights = weights;
  out.outliers = partition.outliers;
  for (const auto& members : partition.clusters) {
    Tpa merged;
    for (const auto& id : members) merged = merge_tpa(merged, *by_id.at(id));
    out.clusters.push_back(DayCluster{members, std::move(merged)});
  }
  return out;
}

inline std::vector<std::pair<ActivityLevel, Clustering>> stage_cluster(
    const std::vector<GroupModels>& models, const QtParams& params,
    const SimilarityWeights& weights) {
  std::vector<std::pair<ActivityLevel, Clustering>> out;
  for (const auto& gm : models)
    out.emplace_back(gm.level, stage_cluster_group(gm, params, weights));
  return out;
}

inline nlohmann::json clusterings_to_json(
    const std::vector<std::pair<ActivityLevel, Clustering>>& clusterings) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& [level, clustering] : clusterings) {
    nlohmann::json g = clustering_to_json(clustering);
    g["level"] = to_string(level);
    groups.push_back(std::move(g));
  }
  return {{"groups", std::move(groups)}};
}

inline std::vector<std::pair<ActivityLevel, Clustering>> clusterings_from_json(
    const nlohmann::json& j) {
  std::vector<std::pair<ActivityLevel, Clustering>> out;
  for (const auto& g : j.at("groups"))
    out.emplace_back(activity_level_from_string(g.at("level").get<std::string>()),
                     clustering_from_json(g));
  return out;
}

// ---- artifact assembly ----

using ArtifactTree = std::map<std::string, std::string>;  // relpath -> bytes

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void stage_render(const std::vector<GroupModels>& models,
                         const std::vector<std::pair<ActivityLevel, Clustering>>& clusterings,
                         const Palette& palette, ArtifactTree& tree) {
  std::map<ActivityLevel, const Clustering*> by_level;
  for (const auto& [level, clustering] : clusterings)
    by_level[level] = &clustering;
  for (const auto& gm : models) {
    const std::string dir = to_string(gm.level) + "/";
    const RenderedGraph base = render_absolute(gm.base, palette);
    tree[dir + "base.dot"] = base.dot;
    tree[dir + "base.legend.json"] = dump_json(base.legend);
    auto it = by_level.find(gm.level);
    if (it == by_level.end()) continue;
    int index = 1;
    for (const auto& cluster : it->second->clusters) {
      const RenderedGraph g = render_relative(gm.base, cluster.model, palette);
      const std::string stem = dir + "cluster-" + std::to_string(index++);
      tree[stem + ".dot"] = g.dot;
      tree[stem + ".legend.json"] = dump_json(g.legend);
    }
  }
}

inline std::vector<GroupReport> stage_report(
    const LevelGroups& groups, const std::vector<GroupModels>& models,
    const std::vector<std::pair<ActivityLevel, Clustering>>& clusterings) {
  std::map<ActivityLevel, const Clustering*> by_level;
  for (const auto& [level, clustering] : clusterings)
    by_level[level] = &clustering;
  std::vector<GroupReport> reports;
  for (const auto& gm : models) {
    auto it = by_level.find(gm.level);
    if (it == by_level.end())
      throw IntegrityError("no clustering for group " + to_string(gm.level));
    reports.push_back(build_group_report(gm.level, groups.of(gm.level), gm.base,
                                         *it->second));
  }
  return reports;
}

namespace detail {

// Reruns a stage body and prefixes any toolkit error with the stage name,
// preserving the error class (and with it the CLI exit code).
template <typename Fn>
auto named_stage(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(stage) + ": " + e.what());
  } catch (const IntegrityError& e) {
    throw IntegrityError(std::string(stage) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(stage) + ": " + e.what());
  }
}

}  // namespace detail

// Runs every stage in memory, then flushes the artifact tree. Nothing is
// written until all stages succeed; a failed write removes what it created.
inline ArtifactTree run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  const TimeZone zone = parse_timezone(cfg.timezone);
  ArtifactTree tree;

  std::string csv;
  if (cfg.synth.has_value()) {
    csv = detail::named_stage("synth", [&] { return generate(*cfg.synth); });
    tree["synthetic.csv"] = csv;
  } else {
    csv = detail::named_stage("ingest", [&] { return read_maybe_gzip(cfg.input); });
  }

  const DaySet set = detail::named_stage(
      "ingest", [&] { return stage_ingest(csv, zone, cfg.day_close); });
  tree["days.json"] = dump_json(dayset_to_json(set));

  const LevelGroups groups = detail::named_stage(
      "label", [&] { return group_days(set.days, cfg.thresholds); });
  tree["groups.json"] = dump_json(groups_to_json(groups, cfg.thresholds));

  const auto models = detail::named_stage(
      "discover", [&] { return stage_discover(set, groups); });
  tree["models.json"] = dump_json(models_to_json(models));

  const auto clusterings = detail::named_stage(
      "cluster", [&] { return stage_cluster(models, cfg.qt, cfg.weights); });
  tree["clustering.json"] = dump_json(clusterings_to_json(clusterings));

  detail::named_stage("render", [&] {
    stage_render(models, clusterings, palette_by_name(cfg.palette), tree);
    return 0;
  });

  const auto reports = detail::named_stage(
      "report", [&] { return stage_report(groups, models, clusterings); });
  tree["report.json"] = dump_json(report_to_json(reports));
  tree["report.md"] = report_to_markdown(reports);

  // Flush; on failure remove whatever this run managed to write, including
  // subdirectories that are empty afterwards.
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  try {
    for (const auto& [rel, bytes] : tree) {
      const fs::path path = fs::path(cfg.out_dir) / rel;
      fs::create_directories(path.parent_path());
      write_file(path.string(), bytes);
      written.push_back(path);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& path : written) fs::remove(path, ec);
    for (const auto& path : written)
      if (path.parent_path() != fs::path(cfg.out_dir))
        fs::remove(path.parent_path(), ec);  // only succeeds when empty
    throw;
  }
  return tree;
}

}  // namespace dayflow
