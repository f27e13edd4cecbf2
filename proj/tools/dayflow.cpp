// Command-line front end: each pipeline stage is a subcommand consuming the
// previous stage's JSON, plus `pipeline` to run everything at once.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dayflow/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

bool verbose() {
  const char* env = std::getenv("DAYFLOW_LOG");
  return env != nullptr && std::string(env) != "" && std::string(env) != "0";
}

void log_line(const std::string& msg) {
  if (verbose()) std::cerr << "dayflow: " << msg << "\n";
}

json load_json_file(const std::string& path) {
  try {
    return json::parse(dayflow::read_file(path));
  } catch (const json::parse_error& e) {
    throw dayflow::DataError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& bytes) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  dayflow::write_file(path, bytes);
  log_line("wrote " + path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Behavioural process maps from location event logs"};
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Generate a synthetic event log");
  std::string synth_config_path, synth_out = "log.csv";
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--config", synth_config_path, "Synthetic config JSON")
      ->required();
  synth->add_option("--out", synth_out, "Output CSV path");
  synth->add_option("--seed", synth_seed, "Override the config seed");

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "Parse and segment a CSV log");
  std::string in_csv, ingest_out = "days.json", tz_name = "UTC",
              day_close_name = "midnight";
  ingest->add_option("--input", in_csv, "Input CSV (.csv or .csv.gz)")
      ->required();
  ingest->add_option("--out", ingest_out, "Output days JSON");
  ingest->add_option("--timezone", tz_name, "Fixed-offset zone, e.g. UTC or +02:00");
  ingest->add_option("--day-close", day_close_name, "midnight | last_event");

  // ---- label ----
  auto* label = app.add_subcommand("label", "Label days by activity level");
  std::string label_days = "days.json", label_out = "groups.json";
  std::int64_t low = 4000, high = 10000;
  label->add_option("--days", label_days, "days JSON from ingest");
  label->add_option("--out", label_out, "Output groups JSON");
  label->add_option("--low", low, "Insufficient/Sufficient step threshold");
  label->add_option("--high", high, "Sufficient/Desirable step threshold");

  // ---- discover ----
  auto* discover = app.add_subcommand("discover", "Discover per-group models");
  std::string disc_days = "days.json", disc_groups = "groups.json",
              disc_out = "models.json";
  discover->add_option("--days", disc_days, "days JSON");
  discover->add_option("--groups", disc_groups, "groups JSON");
  discover->add_option("--out", disc_out, "Output models JSON");

  // ---- cluster ----
  auto* cluster = app.add_subcommand("cluster", "QT-cluster per-day models");
  std::string clu_models = "models.json", clu_out = "clustering.json",
              matrix_dir;
  double threshold = 0.25, join = 0.05, edge_w = 0.5, node_w = 0.5;
  cluster->add_option("--models", clu_models, "models JSON");
  cluster->add_option("--out", clu_out, "Output clustering JSON");
  cluster->add_option("--threshold", threshold, "QT similarity threshold");
  cluster->add_option("--join", join, "QT join fraction");
  cluster->add_option("--edge-weight", edge_w, "Similarity edge weight");
  cluster->add_option("--node-weight", node_w, "Similarity node weight");
  cluster->add_option("--matrix-dir", matrix_dir,
                      "Also export per-group similarity matrices as CSV");

  // ---- render ----
  auto* render = app.add_subcommand("render", "Emit DOT process maps");
  std::string ren_models = "models.json", ren_clustering = "clustering.json",
              ren_out_dir = "maps", palette_name = "red-neutral-blue";
  render->add_option("--models", ren_models, "models JSON");
  render->add_option("--clustering", ren_clustering, "clustering JSON");
  render->add_option("--out-dir", ren_out_dir, "Output directory");
  render->add_option("--palette", palette_name, "Palette name");

  // ---- report ----
  auto* report = app.add_subcommand("report", "Build statistical summaries");
  std::string rep_groups = "groups.json", rep_models = "models.json",
              rep_clustering = "clustering.json", rep_out_dir = ".";
  report->add_option("--groups", rep_groups, "groups JSON");
  report->add_option("--models", rep_models, "models JSON");
  report->add_option("--clustering", rep_clustering, "clustering JSON");
  report->add_option("--out-dir", rep_out_dir, "Output directory");

  // ---- pipeline ----
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage");
  std::string pipe_config_path, pipe_out_dir, pipe_input, pipe_tz,
      pipe_day_close, pipe_palette;
  std::optional<std::int64_t> pipe_low, pipe_high;
  std::optional<double> pipe_threshold, pipe_join, pipe_edge_w, pipe_node_w;
  std::optional<std::uint64_t> pipe_seed;
  pipeline->add_option("--config", pipe_config_path, "Pipeline config JSON")
      ->required();
  pipeline->add_option("--out-dir", pipe_out_dir, "Override out_dir");
  pipeline->add_option("--input", pipe_input, "Override input CSV path");
  pipeline->add_option("--timezone", pipe_tz, "Override timezone");
  pipeline->add_option("--day-close", pipe_day_close, "Override day_close");
  pipeline->add_option("--low", pipe_low, "Override levels.low");
  pipeline->add_option("--high", pipe_high, "Override levels.high");
  pipeline->add_option("--threshold", pipe_threshold, "Override QT threshold");
  pipeline->add_option("--join", pipe_join, "Override QT join fraction");
  pipeline->add_option("--edge-weight", pipe_edge_w, "Override edge weight");
  pipeline->add_option("--node-weight", pipe_node_w, "Override node weight");
  pipeline->add_option("--palette", pipe_palette, "Override palette");
  pipeline->add_option("--seed", pipe_seed, "Override synth seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      dayflow::SynthConfig cfg =
          dayflow::synth_config_from_json(load_json_file(synth_config_path));
      if (synth_seed) cfg.seed = *synth_seed;
      write_text(synth_out, dayflow::generate(cfg));
    } else if (*ingest) {
      const dayflow::TimeZone zone = dayflow::parse_timezone(tz_name);
      const dayflow::DayClose close = dayflow::parse_day_close(day_close_name);
      const dayflow::DaySet set =
          dayflow::stage_ingest(dayflow::read_maybe_gzip(in_csv), zone, close);
      write_text(ingest_out, dayflow::dump_json(dayflow::dayset_to_json(set)));
      log_line("segmented " + std::to_string(set.days.size()) + " days");
    } else if (*label) {
      const dayflow::LevelThresholds thresholds{low, high};
      thresholds.validate();
      const dayflow::DaySet set =
          dayflow::dayset_from_json(load_json_file(label_days));
      const dayflow::LevelGroups groups =
          dayflow::group_days(set.days, thresholds);
      write_text(label_out,
                 dayflow::dump_json(dayflow::groups_to_json(groups, thresholds)));
    } else if (*discover) {
      const dayflow::DaySet set =
          dayflow::dayset_from_json(load_json_file(disc_days));
      const dayflow::LevelGroups groups =
          dayflow::groups_from_json(load_json_file(disc_groups));
      const auto models = dayflow::stage_discover(set, groups);
      write_text(disc_out, dayflow::dump_json(dayflow::models_to_json(models)));
    } else if (*cluster) {
      const dayflow::QtParams params{threshold, join};
      const dayflow::SimilarityWeights weights{edge_w, node_w};
      const auto models = dayflow::models_from_json(load_json_file(clu_models));
      const auto clusterings = dayflow::stage_cluster(models, params, weights);
      write_text(clu_out,
                 dayflow::dump_json(dayflow::clusterings_to_json(clusterings)));
      if (!matrix_dir.empty()) {
        for (const auto& gm : models) {
          const auto matrix = dayflow::similarity_matrix(gm.per_day, weights);
          write_text(matrix_dir + "/similarity-" + dayflow::to_string(gm.level) +
                         ".csv",
                     dayflow::matrix_to_csv(matrix));
        }
      }
    } else if (*render) {
      const auto models = dayflow::models_from_json(load_json_file(ren_models));
      const auto clusterings =
          dayflow::clusterings_from_json(load_json_file(ren_clustering));
      dayflow::ArtifactTree tree;
      dayflow::stage_render(models, clusterings,
                            dayflow::palette_by_name(palette_name), tree);
      for (const auto& [rel, bytes] : tree)
        write_text(ren_out_dir + "/" + rel, bytes);
    } else if (*report) {
      const auto groups = dayflow::groups_from_json(load_json_file(rep_groups));
      const auto models = dayflow::models_from_json(load_json_file(rep_models));
      const auto clusterings =
          dayflow::clusterings_from_json(load_json_file(rep_clustering));
      const auto reports = dayflow::stage_report(groups, models, clusterings);
      write_text(rep_out_dir + "/report.json",
                 dayflow::dump_json(dayflow::report_to_json(reports)));
      write_text(rep_out_dir + "/report.md",
                 dayflow::report_to_markdown(reports));
    } else if (*pipeline) {
      json j = load_json_file(pipe_config_path);
      if (!pipe_out_dir.empty()) j["out_dir"] = pipe_out_dir;
      if (!pipe_input.empty()) {
        j["input"] = pipe_input;
        j.erase("synth");
      }
      if (!pipe_tz.empty()) j["timezone"] = pipe_tz;
      if (!pipe_day_close.empty()) j["day_close"] = pipe_day_close;
      if (pipe_low) j["levels"]["low"] = *pipe_low;
      if (pipe_high) j["levels"]["high"] = *pipe_high;
      if (pipe_threshold) j["qt"]["similarity_threshold"] = *pipe_threshold;
      if (pipe_join) j["qt"]["join_fraction"] = *pipe_join;
      if (pipe_edge_w) j["weights"]["edge"] = *pipe_edge_w;
      if (pipe_node_w) j["weights"]["node"] = *pipe_node_w;
      if (!pipe_palette.empty()) j["render"]["palette"] = pipe_palette;
      if (pipe_seed && j.contains("synth")) j["synth"]["seed"] = *pipe_seed;
      const dayflow::PipelineConfig cfg = dayflow::pipeline_config_from_json(j);
      const dayflow::ArtifactTree tree = dayflow::run_pipeline(cfg);
      log_line("pipeline wrote " + std::to_string(tree.size()) +
               " artifacts under " + cfg.out_dir);
      std::cout << cfg.out_dir << "\n";
    }
  } catch (const dayflow::ConfigError& e) {
    std::cerr << "dayflow: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const dayflow::IntegrityError& e) {
    std::cerr << "dayflow: internal invariant violated: " << e.what() << "\n";
    return kExitInternal;
  } catch (const dayflow::DataError& e) {
    std::cerr << "dayflow: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "dayflow: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
