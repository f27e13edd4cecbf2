#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dayflow/errors.hpp"
#include "dayflow/event_log.hpp"

namespace dayflow {

// Per-location visit statistics. Dwell sums are kept as exact integers so
// that merging two models is identical to discovering over the union of
// their traces.
struct TpaState {
  std::int64_t visit_count = 0;
  std::int64_t total_dwell = 0;    // seconds
  std::int64_t sum_sq_dwell = 0;   // seconds^2

  double mean_dwell() const {
    return visit_count == 0 ? 0.0
                            : static_cast<double>(total_dwell) /
                                  static_cast<double>(visit_count);
  }
  // Population variance over the observed visits.
  double dwell_variance() const {
    if (visit_count == 0) return 0.0;
    const double n = static_cast<double>(visit_count);
    const double mean = mean_dwell();
    return static_cast<double>(sum_sq_dwell) / n - mean * mean;
  }

  friend bool operator==(const TpaState&, const TpaState&) = default;
};

using Transition = std::pair<std::string, std::string>;

// Timed automaton discovered from day traces: one state per location with
// timing statistics, synthetic __start__/__end__ states, and
// frequency-counted directly-follows transitions.
struct Tpa {
  std::map<std::string, TpaState> states;
  std::map<Transition, std::int64_t> transitions;
  std::int64_t trace_count = 0;

  std::int64_t total_dwell() const {
    std::int64_t sum = 0;
    for (const auto& [loc, st] : states) sum += st.total_dwell;
    return sum;
  }
  std::int64_t transition_count(const std::string& from,
                                const std::string& to) const {
    auto it = transitions.find({from, to});
    return it == transitions.end() ? 0 : it->second;
  }

  friend bool operator==(const Tpa&, const Tpa&) = default;
};

inline Tpa discover_tpa(std::span<const DayTrace> traces) {
  if (traces.empty())
    throw DataError("cannot discover a model from an empty trace set");
  Tpa tpa;
  for (const auto& trace : traces) {
    if (trace.events.empty())
      throw DataError("trace " + trace.date + " has no events");
    ++tpa.trace_count;
    ++tpa.transitions[{kStartState, trace.events.front().location}];
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
      const auto& ev = trace.events[i];
      TpaState& st = tpa.states[ev.location];
      ++st.visit_count;
      st.total_dwell += ev.dwell_seconds;
      st.sum_sq_dwell += ev.dwell_seconds * ev.dwell_seconds;
      if (i + 1 < trace.events.size())
        ++tpa.transitions[{ev.location, trace.events[i + 1].location}];
    }
    ++tpa.transitions[{trace.events.back().location, kEndState}];
  }
  return tpa;
}

inline Tpa discover_tpa(const std::vector<DayTrace>& traces) {
  return discover_tpa(std::span<const DayTrace>(traces));
}

// Sum of two models; equals discovery over the union of their trace sets.
inline Tpa merge_tpa(const Tpa& a, const Tpa& b) {
  Tpa out = a;
  out.trace_count += b.trace_count;
  for (const auto& [loc, st] : b.states) {
    TpaState& dst = out.states[loc];
    dst.visit_count += st.visit_count;
    dst.total_dwell += st.total_dwell;
    dst.sum_sq_dwell += st.sum_sq_dwell;
  }
  for (const auto& [tr, count] : b.transitions) out.transitions[tr] += count;
  return out;
}

struct FitnessReport {
  std::int64_t total_pairs = 0;
  std::int64_t matched_pairs = 0;

  double fitness() const {
    return total_pairs == 0 ? 1.0
                            : static_cast<double>(matched_pairs) /
                                  static_cast<double>(total_pairs);
  }
};

// Fraction of the trace's directly-follows pairs (including the
// __start__/__end__ pairs) present as transitions in the model.
inline FitnessReport replay(const Tpa& tpa, const DayTrace& trace) {
  FitnessReport report;
  auto check = [&](const std::string& from, const std::string& to) {
    ++report.total_pairs;
    if (tpa.transition_count(from, to) > 0) ++report.matched_pairs;
  };
  if (trace.events.empty()) return report;
  check(kStartState, trace.events.front().location);
  for (std::size_t i = 0; i + 1 < trace.events.size(); ++i)
    check(trace.events[i].location, trace.events[i + 1].location);
  check(trace.events.back().location, kEndState);
  return report;
}

// Per-location fraction of total dwell; fractions sum to 1 (within fp error).
inline std::map<std::string, double> duration_profile(const Tpa& tpa) {
  std::map<std::string, double> profile;
  const double grand = static_cast<double>(tpa.total_dwell());
  if (grand <= 0.0)
    throw IntegrityError("model has no dwell time");
  for (const auto& [loc, st] : tpa.states)
    profile[loc] = static_cast<double>(st.total_dwell) / grand;
  return profile;
}

// Canonical JSON: states sorted by label, transitions sorted lexicographically
// by (from, to); byte-stable for golden-file comparisons.
inline nlohmann::json tpa_to_json(const Tpa& tpa) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& [loc, st] : tpa.states) {
    states.push_back({{"location", loc},
                      {"visit_count", st.visit_count},
                      {"total_dwell_seconds", st.total_dwell},
                      {"sum_sq_dwell", st.sum_sq_dwell},
                      {"mean_dwell_seconds", st.mean_dwell()},
                      {"dwell_variance", st.dwell_variance()}});
  }
  nlohmann::json transitions = nlohmann::json::array();
  for (const auto& [tr, count] : tpa.transitions) {
    transitions.push_back(
        {{"from", tr.first}, {"to", tr.second}, {"count", count}});
  }
  return {{"trace_count", tpa.trace_count},
          {"states", std::move(states)},
          {"transitions", std::move(transitions)}};
}

inline Tpa tpa_from_json(const nlohmann::json& j) {
  Tpa tpa;
  tpa.trace_count = j.at("trace_count").get<std::int64_t>();
  for (const auto& s : j.at("states")) {
    TpaState st;
    st.visit_count = s.at("visit_count").get<std::int64_t>();
    st.total_dwell = s.at("total_dwell_seconds").get<std::int64_t>();
    st.sum_sq_dwell = s.at("sum_sq_dwell").get<std::int64_t>();
    tpa.states[s.at("location").get<std::string>()] = st;
  }
  for (const auto& t : j.at("transitions")) {
    tpa.transitions[{t.at("from").get<std::string>(),
                     t.at("to").get<std::string>()}] =
        t.at("count").get<std::int64_t>();
  }
  return tpa;
}

}  // namespace dayflow
