#include <doctest.h>

#include <map>
#include <string>

#include "dayflow/event_log.hpp"
#include "dayflow/rng.hpp"

using namespace dayflow;

namespace {

const TimeZone kUtc;
const SegmentOptions kDefaultSeg{kUtc, DayClose::kMidnight};

std::vector<DayTrace> segment_csv(const std::string& csv,
                                  const SegmentOptions& opts = kDefaultSeg) {
  const ParsedEvents parsed = parse_events(csv);
  return segment_days(parsed.locations, parsed.steps, opts);
}

std::map<std::string, std::int64_t> dwell_per_location(
    const std::vector<DayTrace>& traces) {
  std::map<std::string, std::int64_t> totals;
  for (const auto& t : traces)
    for (const auto& ev : t.events) totals[ev.location] += ev.dwell_seconds;
  return totals;
}

}  // namespace

TEST_CASE("single well-formed row parses") {
  const auto parsed = parse_events(
      "timestamp,subject,stream,value\n"
      "2020-01-05T08:00:00Z,p1,location,Bedroom\n");
  REQUIRE(parsed.locations.size() == 1);
  CHECK(parsed.locations[0].location == "Bedroom");
  CHECK(parsed.locations[0].subject == "p1");
  CHECK(parsed.steps.empty());
}

TEST_CASE("negative step count fails with its line number") {
  try {
    parse_events(
        "timestamp,subject,stream,value\n"
        "2020-01-05T08:00:00Z,p1,steps,-5\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("three-row file keeps input order per stream") {
  const auto parsed = parse_events(
      "timestamp,subject,stream,value\n"
      "2020-01-05T08:00:00Z,p1,location,Bedroom\n"
      "2020-01-05T09:00:00Z,p1,steps,120\n"
      "2020-01-05T09:30:00Z,p1,location,Kitchen\n");
  REQUIRE(parsed.locations.size() == 2);
  REQUIRE(parsed.steps.size() == 1);
  CHECK(parsed.locations[0].location == "Bedroom");
  CHECK(parsed.locations[1].location == "Kitchen");
  CHECK(parsed.steps[0].count == 120);
}

TEST_CASE("parser error taxonomy") {
  CHECK_THROWS_AS(parse_events(""), EmptyInputError);
  CHECK_THROWS_AS(parse_events("timestamp,subject,stream,value\n"
                               "2020-01-05T08:00:00Z,p1,humidity,40\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_events("timestamp,subject,stream,value\n"
                               "not-a-time,p1,location,Bedroom\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_events("timestamp,subject,stream,value\n"
                               "2020-01-05T08:00:00Z,p1,steps,12.5\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_events("timestamp,subject,stream,value\n"
                               "2020-01-05T08:00:00Z,p1,location,__start__\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_events("bad,header\n"), ParseError);
  // Header-only input parses to zero events.
  CHECK(parse_events("timestamp,subject,stream,value\n").locations.empty());
}

TEST_CASE("single-day dwells close out at midnight") {
  const auto traces = segment_csv(
      "timestamp,subject,stream,value\n"
      "2020-01-05T08:00:00Z,p1,location,Bedroom\n"
      "2020-01-05T09:30:00Z,p1,location,Kitchen\n"
      "2020-01-05T10:00:00Z,p1,location,Bedroom\n");
  REQUIRE(traces.size() == 1);
  const DayTrace& t = traces[0];
  CHECK(t.date == "2020-01-05");
  REQUIRE(t.events.size() == 3);
  CHECK(t.events[0].dwell_seconds == 5400);
  CHECK(t.events[1].dwell_seconds == 1800);
  CHECK(t.events[2].dwell_seconds == 50400);
}

TEST_CASE("a location spanning midnight is split at the boundary") {
  const auto traces = segment_csv(
      "timestamp,subject,stream,value\n"
      "2020-01-05T23:00:00Z,p1,location,Bedroom\n"
      "2020-01-06T01:00:00Z,p1,location,Kitchen\n");
  REQUIRE(traces.size() == 2);
  CHECK(traces[0].date == "2020-01-05");
  REQUIRE(traces[0].events.size() == 1);
  CHECK(traces[0].events[0].location == "Bedroom");
  CHECK(traces[0].events[0].dwell_seconds == 3600);
  CHECK(traces[1].date == "2020-01-06");
  REQUIRE(traces[1].events.size() == 2);
  CHECK(traces[1].events[0].location == "Bedroom");
  CHECK(traces[1].events[0].entry == parse_instant("2020-01-06T00:00:00Z"));
  CHECK(traces[1].events[0].dwell_seconds == 3600);
  CHECK(traces[1].events[1].location == "Kitchen");
  CHECK(traces[1].events[1].dwell_seconds == 82800);
}

TEST_CASE("a visit spanning several midnights fills the interior days") {
  const auto traces = segment_csv(
      "timestamp,subject,stream,value\n"
      "2020-01-05T23:00:00Z,p1,location,Bedroom\n"
      "2020-01-08T06:00:00Z,p1,location,Kitchen\n");
  REQUIRE(traces.size() == 4);
  CHECK(traces[1].date == "2020-01-06");
  REQUIRE(traces[1].events.size() == 1);
  CHECK(traces[1].events[0].dwell_seconds == kSecondsPerDay);
  CHECK(traces[2].events[0].dwell_seconds == kSecondsPerDay);
  CHECK(traces[3].events[0].location == "Bedroom");
  CHECK(traces[3].events[0].dwell_seconds == 6 * 3600);
}

TEST_CASE("adjacent identical locations coalesce") {
  const auto traces = segment_csv(
      "timestamp,subject,stream,value\n"
      "2020-01-05T08:00:00Z,p1,location,Bedroom\n"
      "2020-01-05T09:00:00Z,p1,location,Bedroom\n"
      "2020-01-05T10:00:00Z,p1,location,Kitchen\n");
  REQUIRE(traces.size() == 1);
  REQUIRE(traces[0].events.size() == 2);
  CHECK(traces[0].events[0].location == "Bedroom");
  CHECK(traces[0].events[0].entry == parse_instant("2020-01-05T08:00:00Z"));
  CHECK(traces[0].events[0].dwell_seconds == 7200);
}

TEST_CASE("duplicate timestamps: same location dedupes, conflict errors") {
  CHECK_NOTHROW(segment_csv(
      "timestamp,subject,stream,value\n"
      "2020-01-05T08:00:00Z,p1,location,Bedroom\n"
      "2020-01-05T08:00:00Z,p1,location,Bedroom\n"
      "2020-01-05T10:00:00Z,p1,location,Kitchen\n"));
  CHECK_THROWS_AS(segment_csv("timestamp,subject,stream,value\n"
                              "2020-01-05T08:00:00Z,p1,location,Bedroom\n"
                              "2020-01-05T08:00:00Z,p1,location,Kitchen\n"),
                  DataError);
}

TEST_CASE("no location events yields empty output; steps alone do too") {
  const ParsedEvents parsed = parse_events(
      "timestamp,subject,stream,value\n"
      "2020-01-05T08:00:00Z,p1,steps,100\n");
  CHECK(segment_days(parsed.locations, parsed.steps, kDefaultSeg).empty());
}

TEST_CASE("step totals sum per local day") {
  const auto traces = segment_csv(
      "timestamp,subject,stream,value\n"
      "2020-01-05T08:00:00Z,p1,location,Bedroom\n"
      "2020-01-05T09:00:00Z,p1,steps,100\n"
      "2020-01-05T18:00:00Z,p1,steps,250\n"
      "2020-01-06T01:00:00Z,p1,steps,7\n"
      "2020-01-06T02:00:00Z,p1,location,Kitchen\n");
  REQUIRE(traces.size() == 2);
  CHECK(traces[0].step_total == 350);
  CHECK(traces[1].step_total == 7);
}

TEST_CASE("day_close=last_event drops the trailing reading") {
  const ParsedEvents parsed = parse_events(
      "timestamp,subject,stream,value\n"
      "2020-01-05T08:00:00Z,p1,location,Bedroom\n"
      "2020-01-05T10:00:00Z,p1,location,Kitchen\n");
  const auto traces = segment_days(parsed.locations, parsed.steps,
                                   SegmentOptions{kUtc, DayClose::kLastEvent});
  REQUIRE(traces.size() == 1);
  REQUIRE(traces[0].events.size() == 1);
  CHECK(traces[0].events[0].location == "Bedroom");
  CHECK(traces[0].events[0].dwell_seconds == 7200);
}

TEST_CASE("day boundary follows the configured zone") {
  const auto traces = segment_csv(
      "timestamp,subject,stream,value\n"
      "2020-01-05T23:30:00Z,p1,location,Bedroom\n"
      "2020-01-06T01:00:00Z,p1,location,Kitchen\n",
      SegmentOptions{parse_timezone("+02:00"), DayClose::kMidnight});
  // 23:30Z is already Jan 6 at +02:00, so no split before Kitchen.
  REQUIRE(traces.size() == 1);
  CHECK(traces[0].date == "2020-01-06");
  REQUIRE(traces[0].events.size() == 2);
}

TEST_CASE("mixed subjects are rejected") {
  const ParsedEvents parsed = parse_events(
      "timestamp,subject,stream,value\n"
      "2020-01-05T08:00:00Z,p1,location,Bedroom\n"
      "2020-01-05T09:00:00Z,p2,location,Kitchen\n");
  CHECK_THROWS_AS(segment_days(parsed.locations, parsed.steps, kDefaultSeg),
                  DataError);
}

// ---- module invariants ----

namespace {

// Random multi-day log: a location walk with occasional repeated readings.
std::string random_log(std::uint64_t seed, int readings) {
  static const char* rooms[] = {"Bedroom", "Kitchen", "LivingRoom", "Bathroom",
                                "Entrance"};
  Rng rng(seed);
  std::string csv = "timestamp,subject,stream,value\n";
  Instant t = parse_instant("2020-03-01T00:00:00Z");
  for (int i = 0; i < readings; ++i) {
    t += 60 + rng.uniform_int(6 * 3600);
    csv += format_instant_utc(t) + ",p1,location," +
           rooms[rng.uniform_int(5)] + "\n";
  }
  return csv;
}

}  // namespace

TEST_CASE("gap-free span: dwells tile the covered span exactly") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto traces = segment_csv(random_log(seed, 60));
    for (const auto& trace : traces) {
      std::int64_t sum = 0;
      Instant cursor = trace.span_begin();
      for (const auto& ev : trace.events) {
        CHECK(ev.entry == cursor);
        CHECK(ev.dwell_seconds > 0);
        sum += ev.dwell_seconds;
        cursor = ev.entry + ev.dwell_seconds;
      }
      CHECK(sum == trace.span_end() - trace.span_begin());
    }
  }
}

TEST_CASE("consecutive events never share a location") {
  for (std::uint64_t seed = 21; seed <= 30; ++seed) {
    const auto traces = segment_csv(random_log(seed, 80));
    for (const auto& trace : traces)
      for (std::size_t i = 0; i + 1 < trace.events.size(); ++i)
        CHECK(trace.events[i].location != trace.events[i + 1].location);
  }
}

TEST_CASE("midnight splits conserve per-location dwell across zones") {
  for (std::uint64_t seed = 31; seed <= 40; ++seed) {
    const std::string csv = random_log(seed, 60);
    const auto utc_totals = dwell_per_location(segment_csv(csv));
    const auto shifted_totals = dwell_per_location(segment_csv(
        csv, SegmentOptions{parse_timezone("+05:30"), DayClose::kMidnight}));
    // Zones shift where midnight falls; only the final close-out differs, and
    // it lands in the same (last) location.
    auto utc_copy = utc_totals;
    auto shifted_copy = shifted_totals;
    for (auto& [loc, total] : utc_copy) {
      CHECK(shifted_copy.count(loc));
    }
    // Compare after removing the close-out difference: re-segment with
    // last_event close, where totals must match exactly.
    const auto a = dwell_per_location(segment_csv(
        csv, SegmentOptions{kUtc, DayClose::kLastEvent}));
    const auto b = dwell_per_location(segment_csv(
        csv, SegmentOptions{parse_timezone("+05:30"), DayClose::kLastEvent}));
    CHECK(a == b);
  }
}

TEST_CASE("round-trip: trace -> rows -> identical trace") {
  for (std::uint64_t seed = 41; seed <= 55; ++seed) {
    const auto traces = segment_csv(random_log(seed, 50));
    for (const auto& trace : traces) {
      const ParsedEvents parsed = parse_events(day_trace_to_csv(trace));
      const auto again = segment_days(
          parsed.locations, parsed.steps,
          SegmentOptions{kUtc, DayClose::kLastEvent});
      REQUIRE(again.size() == 1);
      CHECK(again[0] == trace);
    }
  }
}

TEST_CASE("segmentation is idempotent on its own output") {
  for (std::uint64_t seed = 56; seed <= 65; ++seed) {
    const auto traces = segment_csv(random_log(seed, 50));
    std::string csv = "timestamp,subject,stream,value\n";
    for (const auto& trace : traces)
      for (const auto& ev : trace.events)
        csv += format_instant_utc(ev.entry) + ",p1,location," + ev.location +
               "\n";
    const auto again = segment_csv(csv);
    REQUIRE(again.size() == traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
      REQUIRE(again[i].events.size() == traces[i].events.size());
      for (std::size_t j = 0; j < traces[i].events.size(); ++j) {
        CHECK(again[i].events[j].location == traces[i].events[j].location);
        CHECK(again[i].events[j].entry == traces[i].events[j].entry);
        CHECK(again[i].events[j].dwell_seconds ==
              traces[i].events[j].dwell_seconds);
      }
    }
  }
}
