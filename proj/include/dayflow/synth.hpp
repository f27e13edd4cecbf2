#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "dayflow/errors.hpp"
#include "dayflow/event_log.hpp"
#include "dayflow/rng.hpp"
#include "dayflow/time.hpp"

namespace dayflow {

struct DwellSpec {
  double median_seconds = 3600.0;
  double dispersion = 0.5;
};

struct StepSpec {
  double mean = 6000.0;
  double stddev = 1500.0;
  std::int64_t min = 0;
  std::int64_t max = 40000;
};

// A routine archetype: a first-order location walk with log-normal dwell
// times and a truncated-normal daily step total.
struct Archetype {
  std::string name;
  std::int64_t days = 1;
  std::string start_location;
  std::map<std::string, std::map<std::string, double>> transitions;
  std::map<std::string, DwellSpec> dwell;
  StepSpec steps;

  void validate() const {
    if (name.empty()) throw ConfigError("archetype needs a name");
    if (days < 1)
      throw ConfigError("archetype '" + name + "' needs days >= 1");
    if (dwell.empty())
      throw ConfigError("archetype '" + name + "' has an empty location set");
    if (!dwell.count(start_location))
      throw ConfigError("archetype '" + name + "': start location '" +
                        start_location + "' has no dwell spec");
    for (const auto& [loc, spec] : dwell) {
      if (spec.median_seconds <= 0.0)
        throw ConfigError("archetype '" + name + "': dwell median for '" +
                          loc + "' must be positive");
      if (loc == kStartState || loc == kEndState)
        throw ConfigError("archetype '" + name + "': location label '" + loc +
                          "' is reserved");
    }
    for (const auto& [from, row] : transitions) {
      if (!dwell.count(from))
        throw ConfigError("archetype '" + name + "': transition row for '" +
                          from + "' lacks a dwell spec");
      double sum = 0.0;
      for (const auto& [to, p] : row) {
        if (!dwell.count(to))
          throw ConfigError("archetype '" + name + "': transition to unknown '" +
                            to + "'");
        if (p < 0.0)
          throw ConfigError("archetype '" + name +
                            "': negative transition probability");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("archetype '" + name + "': transition row for '" +
                          from + "' sums to " + std::to_string(sum));
    }
    if (steps.min < 0 || steps.max < steps.min)
      throw ConfigError("archetype '" + name + "': bad step range");
  }
};

// Behaviour of generated noise days: a uniform walk over a per-day random
// subset of the pool, with wide dwell dispersion and unconstrained steps.
struct NoiseSpec {
  std::vector<std::string> pool = {
      "Garage", "Basement", "Attic",  "Laundry", "Balcony", "Terrace",
      "Office", "Cellar",   "Porch",  "Shed",    "Pantry",  "Stairs",
      "Loft"};
  std::int64_t rooms_per_day = 3;
  DwellSpec dwell{7200.0, 0.8};
  std::int64_t steps_min = 0;
  std::int64_t steps_max = 12000;
};

struct SynthConfig {
  std::string subject = "p1";
  std::string start_date = "2021-03-01";
  std::uint64_t seed = 1;
  std::vector<Archetype> archetypes;
  std::int64_t noise_days = 0;
  NoiseSpec noise;

  void validate() const {
    if (archetypes.empty() && noise_days == 0)
      throw ConfigError("synthetic config generates zero days");
    for (const auto& a : archetypes) a.validate();
    if (noise_days < 0) throw ConfigError("noise_days must be >= 0");
    if (noise_days > 0 &&
        noise.rooms_per_day > static_cast<std::int64_t>(noise.pool.size()))
      throw ConfigError("noise pool smaller than rooms_per_day");
    parse_date(start_date);
  }
};

inline DwellSpec dwell_spec_from_json(const nlohmann::json& j) {
  return DwellSpec{j.at("median_seconds").get<double>(),
                   j.at("dispersion").get<double>()};
}

inline StepSpec step_spec_from_json(const nlohmann::json& j) {
  StepSpec s;
  s.mean = j.at("mean").get<double>();
  s.stddev = j.at("stddev").get<double>();
  if (j.contains("min")) s.min = j.at("min").get<std::int64_t>();
  if (j.contains("max")) s.max = j.at("max").get<std::int64_t>();
  return s;
}

inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
  SynthConfig cfg;
  if (j.contains("subject")) cfg.subject = j.at("subject").get<std::string>();
  if (j.contains("start_date"))
    cfg.start_date = j.at("start_date").get<std::string>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& a : j.value("archetypes", nlohmann::json::array())) {
    Archetype arch;
    arch.name = a.at("name").get<std::string>();
    arch.days = a.at("days").get<std::int64_t>();
    arch.start_location = a.at("start_location").get<std::string>();
    for (const auto& [from, row] : a.at("transitions").items())
      for (const auto& [to, p] : row.items())
        arch.transitions[from][to] = p.get<double>();
    for (const auto& [loc, spec] : a.at("dwell").items())
      arch.dwell[loc] = dwell_spec_from_json(spec);
    arch.steps = step_spec_from_json(a.at("steps"));
    cfg.archetypes.push_back(std::move(arch));
  }
  if (j.contains("noise_days"))
    cfg.noise_days = j.at("noise_days").get<std::int64_t>();
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    if (n.contains("pool"))
      cfg.noise.pool = n.at("pool").get<std::vector<std::string>>();
    if (n.contains("rooms_per_day"))
      cfg.noise.rooms_per_day = n.at("rooms_per_day").get<std::int64_t>();
    if (n.contains("dwell")) cfg.noise.dwell = dwell_spec_from_json(n.at("dwell"));
    if (n.contains("steps_min"))
      cfg.noise.steps_min = n.at("steps_min").get<std::int64_t>();
    if (n.contains("steps_max"))
      cfg.noise.steps_max = n.at("steps_max").get<std::int64_t>();
  }
  cfg.validate();
  return cfg;
}

namespace detail {

struct CsvRow {
  Instant ts;
  std::string stream;
  std::string value;
};

inline void emit_day_steps(std::vector<CsvRow>& rows, Instant day_begin,
                           std::int64_t total) {
  // Three incremental readings summing exactly to the planted total.
  const std::int64_t third = total / 3;
  rows.push_back({day_begin + 8 * 3600, "steps", std::to_string(third)});
  rows.push_back({day_begin + 13 * 3600, "steps", std::to_string(third)});
  rows.push_back(
      {day_begin + 19 * 3600, "steps", std::to_string(total - 2 * third)});
}

inline std::int64_t sample_dwell(Rng& rng, const DwellSpec& spec) {
  const double raw = rng.lognormal_median(spec.median_seconds, spec.dispersion);
  return std::max<std::int64_t>(60, std::llround(raw));
}

inline std::string sample_next(Rng& rng,
                               const std::map<std::string, double>& row) {
  const double u = rng.uniform01();
  double acc = 0.0;
  const std::string* last = nullptr;
  for (const auto& [to, p] : row) {
    acc += p;
    last = &to;
    if (u < acc) return to;
  }
  return *last;  // guard against fp shortfall in the row sum
}

}  // namespace detail

// Generates the event-log CSV for the configured archetypes plus uniform
// noise days, one calendar day per generated day, deterministically from the
// seed.
inline std::string generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const TimeZone utc;  // synthetic logs are generated in UTC
  CivilDate date = parse_date(cfg.start_date);

  std::string csv = "timestamp,subject,stream,value\n";
  auto flush_day = [&](std::vector<detail::CsvRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const detail::CsvRow& a, const detail::CsvRow& b) {
                       return a.ts < b.ts;
                     });
    for (const auto& row : rows)
      csv += format_instant_utc(row.ts) + "," + cfg.subject + "," +
             row.stream + "," + row.value + "\n";
    rows.clear();
    const Instant next = day_start(date, utc) + kSecondsPerDay;
    date = local_date(next, utc);
  };

  std::vector<detail::CsvRow> rows;
  for (const auto& arch : cfg.archetypes) {
    for (std::int64_t d = 0; d < arch.days; ++d) {
      const Instant begin = day_start(date, utc);
      const Instant end = begin + kSecondsPerDay;
      Instant t = begin;
      std::string loc = arch.start_location;
      while (t < end) {
        rows.push_back({t, "location", loc});
        t += detail::sample_dwell(rng, arch.dwell.at(loc));
        auto row_it = arch.transitions.find(loc);
        if (row_it == arch.transitions.end() || row_it->second.empty())
          break;  // absorbing location holds until midnight
        loc = detail::sample_next(rng, row_it->second);
      }
      detail::emit_day_steps(rows, begin,
                             rng.clamped_normal_int(arch.steps.mean,
                                                    arch.steps.stddev,
                                                    arch.steps.min,
                                                    arch.steps.max));
      flush_day(rows);
    }
  }

  for (std::int64_t d = 0; d < cfg.noise_days; ++d) {
    // Pick the day's rooms by a seeded partial shuffle of the pool.
    std::vector<std::string> pool = cfg.noise.pool;
    std::vector<std::string> rooms;
    for (std::int64_t k = 0; k < cfg.noise.rooms_per_day; ++k) {
      const auto idx = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(pool.size())));
      rooms.push_back(pool[idx]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    const Instant begin = day_start(date, utc);
    const Instant end = begin + kSecondsPerDay;
    Instant t = begin;
    std::size_t current = 0;
    while (t < end) {
      rows.push_back({t, "location", rooms[current]});
      t += detail::sample_dwell(rng, cfg.noise.dwell);
      if (rooms.size() == 1) break;
      // Uniform over the other rooms.
      const auto hop = static_cast<std::size_t>(
          rng.uniform_int(static_cast<std::int64_t>(rooms.size() - 1)));
      current = (current + 1 + hop) % rooms.size();
    }
    const std::int64_t span = cfg.noise.steps_max - cfg.noise.steps_min + 1;
    detail::emit_day_steps(rows, begin,
                           cfg.noise.steps_min + rng.uniform_int(span));
    flush_day(rows);
  }
  return csv;
}

}  // namespace dayflow
