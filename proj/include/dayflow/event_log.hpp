#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dayflow/errors.hpp"
#include "dayflow/time.hpp"

namespace dayflow {

// Reserved state names used by the discovery module. Input locations may be
// any other non-empty label, so these two are rejected at parse time.
inline constexpr const char* kStartState = "__start__";
inline constexpr const char* kEndState = "__end__";

struct LocationEvent {
  Instant timestamp = 0;
  std::string location;
  std::string subject;
};

struct StepEvent {
  Instant timestamp = 0;
  std::int64_t count = 0;
  std::string subject;
};

struct DayVisit {
  std::string location;
  Instant entry = 0;
  std::int64_t dwell_seconds = 0;

  friend bool operator==(const DayVisit&, const DayVisit&) = default;
};

// One calendar day of gap-free visits. Consecutive visits never share a
// location and dwells tile the covered span exactly.
struct DayTrace {
  std::string date;  // "YYYY-MM-DD" in the segmentation zone; doubles as day id
  std::string subject;
  std::vector<DayVisit> events;
  std::int64_t step_total = 0;

  Instant span_begin() const { return events.front().entry; }
  Instant span_end() const {
    return events.back().entry + events.back().dwell_seconds;
  }

  friend bool operator==(const DayTrace&, const DayTrace&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace detail

struct ParsedEvents {
  std::vector<LocationEvent> locations;
  std::vector<StepEvent> steps;
};

// Parses the `timestamp,subject,stream,value` CSV, preserving row order.
// Errors carry 1-based line numbers; a zero-length input is reported as
// EmptyInputError so callers can distinguish it from a bad header.
inline ParsedEvents parse_events(std::string_view csv) {
  if (csv.empty()) throw EmptyInputError("empty input");
  ParsedEvents out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (pos <= csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string_view::npos) eol = csv.size();
    std::string_view line = csv.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) {
      if (pos > csv.size()) break;
      continue;
    }
    if (!saw_header) {
      if (detail::trim(line) != "timestamp,subject,stream,value")
        throw ParseError(line_no,
                         "expected header 'timestamp,subject,stream,value'");
      saw_header = true;
      continue;
    }
    const auto fields = detail::split_fields(line);
    if (fields.size() != 4)
      throw ParseError(line_no, "expected 4 comma-separated fields, got " +
                                    std::to_string(fields.size()));
    const std::string_view ts_text = detail::trim(fields[0]);
    const std::string_view subject = detail::trim(fields[1]);
    const std::string_view stream = detail::trim(fields[2]);
    const std::string_view value = detail::trim(fields[3]);
    Instant ts;
    try {
      ts = parse_instant(ts_text);
    } catch (const DataError& e) {
      throw ParseError(line_no, e.what());
    }
    if (stream == "location") {
      if (value.empty())
        throw ParseError(line_no, "empty location label");
      if (value == kStartState || value == kEndState)
        throw ParseError(line_no, "location label '" + std::string(value) +
                                      "' is reserved");
      out.locations.push_back(
          LocationEvent{ts, std::string(value), std::string(subject)});
    } else if (stream == "steps") {
      if (value.empty() ||
          !std::all_of(value.begin(), value.end(), [](unsigned char c) {
            return std::isdigit(c);
          }))
        throw ParseError(line_no, "step count '" + std::string(value) +
                                      "' is not a non-negative integer");
      std::int64_t count = 0;
      for (char c : value) {
        count = count * 10 + (c - '0');
        if (count > 100'000'000)
          throw ParseError(line_no, "step count out of range");
      }
      out.steps.push_back(StepEvent{ts, count, std::string(subject)});
    } else {
      throw ParseError(line_no,
                       "unknown stream tag '" + std::string(stream) + "'");
    }
    if (pos > csv.size()) break;
  }
  return out;
}

// How the final observed location is closed out: at the next local midnight
// (continuous-monitoring reading) or dropped at the last event (no observable
// dwell for the trailing reading).
enum class DayClose { kMidnight, kLastEvent };

inline DayClose parse_day_close(std::string_view s) {
  if (s == "midnight") return DayClose::kMidnight;
  if (s == "last_event") return DayClose::kLastEvent;
  throw ConfigError("day_close must be 'midnight' or 'last_event', got '" +
                    std::string(s) + "'");
}

inline std::string to_string(DayClose c) {
  return c == DayClose::kMidnight ? "midnight" : "last_event";
}

struct SegmentOptions {
  TimeZone zone;
  DayClose day_close = DayClose::kMidnight;
};

// Turns a single subject's location stream into per-day traces. Sorts its
// input, deduplicates identical readings, coalesces adjacent same-location
// readings, derives dwells from inter-event gaps, and splits visits at local
// midnights so each trace covers exactly one calendar day.
inline std::vector<DayTrace> segment_days(std::vector<LocationEvent> locations,
                                          const std::vector<StepEvent>& steps,
                                          const SegmentOptions& opts) {
  if (locations.empty()) return {};
  const std::string& subject = locations.front().subject;
  for (const auto& ev : locations)
    if (ev.subject != subject)
      throw DataError("multiple subjects in one segmentation call ('" +
                      subject + "' vs '" + ev.subject + "')");
  for (const auto& ev : steps)
    if (ev.subject != subject)
      throw DataError("step events belong to subject '" + ev.subject +
                      "' but locations to '" + subject + "'");

  std::stable_sort(locations.begin(), locations.end(),
                   [](const LocationEvent& a, const LocationEvent& b) {
                     return a.timestamp < b.timestamp;
                   });

  // The observation window ends at the last raw reading; a trailing
  // same-location run still extends the window past the run's first reading.
  const Instant last_seen = locations.back().timestamp;

  // Identical (timestamp, location) readings collapse silently; the same
  // timestamp with two locations is a sensor conflict and must surface.
  std::vector<LocationEvent> events;
  events.reserve(locations.size());
  for (auto& ev : locations) {
    if (!events.empty() && events.back().timestamp == ev.timestamp) {
      if (events.back().location == ev.location) continue;
      throw DataError("conflicting locations '" + events.back().location +
                      "' and '" + ev.location + "' at " +
                      format_instant_utc(ev.timestamp));
    }
    if (!events.empty() && events.back().location == ev.location) continue;
    events.push_back(std::move(ev));
  }

  struct Visit {
    std::string location;
    Instant begin;
    Instant end;
  };
  std::vector<Visit> visits;
  visits.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    Instant end;
    if (i + 1 < events.size()) {
      end = events[i + 1].timestamp;
    } else if (opts.day_close == DayClose::kMidnight) {
      end = next_local_midnight(last_seen, opts.zone);
    } else if (events[i].timestamp < last_seen) {
      end = last_seen;  // the final run itself was observed until last_seen
    } else {
      break;  // a lone trailing reading has no observable dwell
    }
    visits.push_back(Visit{events[i].location, events[i].timestamp, end});
  }

  std::map<std::string, DayTrace> by_date;
  for (const auto& v : visits) {
    Instant begin = v.begin;
    while (begin < v.end) {
      const Instant boundary = next_local_midnight(begin, opts.zone);
      const Instant piece_end = std::min(boundary, v.end);
      const std::string date = format_date(local_date(begin, opts.zone));
      DayTrace& trace = by_date[date];
      if (trace.events.empty()) {
        trace.date = date;
        trace.subject = subject;
      }
      trace.events.push_back(DayVisit{v.location, begin, piece_end - begin});
      begin = piece_end;
    }
  }

  for (const auto& ev : steps) {
    const std::string date = format_date(local_date(ev.timestamp, opts.zone));
    auto it = by_date.find(date);
    if (it != by_date.end()) it->second.step_total += ev.count;
  }

  std::vector<DayTrace> out;
  out.reserve(by_date.size());
  for (auto& [date, trace] : by_date) out.push_back(std::move(trace));
  return out;
}

// Serializes a trace back to CSV rows. A trailing sentinel row marks the end
// of the covered span, so re-segmenting with day_close=last_event reproduces
// the trace exactly regardless of where its span ends.
inline std::string day_trace_to_csv(const DayTrace& trace) {
  std::string out = "timestamp,subject,stream,value\n";
  for (const auto& ev : trace.events) {
    out += format_instant_utc(ev.entry) + "," + trace.subject + ",location," +
           ev.location + "\n";
  }
  out += format_instant_utc(trace.span_end()) + "," + trace.subject +
         ",location," + trace.events.back().location + "!\n";
  out += format_instant_utc(trace.span_begin()) + "," + trace.subject +
         ",steps," + std::to_string(trace.step_total) + "\n";
  return out;
}

inline nlohmann::json day_trace_to_json(const DayTrace& trace) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& ev : trace.events) {
    events.push_back({{"location", ev.location},
                      {"entry", format_instant_utc(ev.entry)},
                      {"dwell_seconds", ev.dwell_seconds}});
  }
  return {{"date", trace.date},
          {"subject", trace.subject},
          {"step_total", trace.step_total},
          {"events", std::move(events)}};
}

inline DayTrace day_trace_from_json(const nlohmann::json& j) {
  DayTrace trace;
  trace.date = j.at("date").get<std::string>();
  trace.subject = j.at("subject").get<std::string>();
  trace.step_total = j.at("step_total").get<std::int64_t>();
  for (const auto& ev : j.at("events")) {
    trace.events.push_back(
        DayVisit{ev.at("location").get<std::string>(),
                 parse_instant(ev.at("entry").get<std::string>()),
                 ev.at("dwell_seconds").get<std::int64_t>()});
  }
  return trace;
}

}  // namespace dayflow
