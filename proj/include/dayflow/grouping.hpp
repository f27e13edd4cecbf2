#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dayflow/errors.hpp"
#include "dayflow/event_log.hpp"

namespace dayflow {

// Physical-activity level of a day, ordered Insufficient < Sufficient <
// Desirable.
enum class ActivityLevel { kInsufficient = 0, kSufficient = 1, kDesirable = 2 };

inline constexpr std::array<ActivityLevel, 3> kAllLevels = {
    ActivityLevel::kInsufficient, ActivityLevel::kSufficient,
    ActivityLevel::kDesirable};

inline std::string to_string(ActivityLevel level) {
  switch (level) {
    case ActivityLevel::kInsufficient: return "Insufficient";
    case ActivityLevel::kSufficient: return "Sufficient";
    case ActivityLevel::kDesirable: return "Desirable";
  }
  throw IntegrityError("unreachable activity level");
}

inline ActivityLevel activity_level_from_string(const std::string& s) {
  for (ActivityLevel level : kAllLevels)
    if (to_string(level) == s) return level;
  throw DataError("unknown activity level '" + s + "'");
}

struct LevelThresholds {
  std::int64_t low = 4000;
  std::int64_t high = 10000;

  void validate() const {
    if (low <= 0 || low >= high)
      throw ConfigError("level thresholds require 0 < low < high, got low=" +
                        std::to_string(low) + " high=" + std::to_string(high));
  }
};

// Day ids per level; the three lists partition the classified days and keep
// their chronological order.
struct LevelGroups {
  std::array<std::vector<std::string>, 3> days;

  std::vector<std::string>& of(ActivityLevel level) {
    return days[static_cast<std::size_t>(level)];
  }
  const std::vector<std::string>& of(ActivityLevel level) const {
    return days[static_cast<std::size_t>(level)];
  }
  std::size_t total() const {
    return days[0].size() + days[1].size() + days[2].size();
  }
};

// step_total < low -> Insufficient; low..high inclusive -> Sufficient;
// above high -> Desirable. "more than 10000" is strict in the source
// narrative, which forces the boundary itself into Sufficient.
inline ActivityLevel classify_day(std::int64_t step_total,
                                  const LevelThresholds& thresholds) {
  thresholds.validate();
  if (step_total < thresholds.low) return ActivityLevel::kInsufficient;
  if (step_total <= thresholds.high) return ActivityLevel::kSufficient;
  return ActivityLevel::kDesirable;
}

inline LevelGroups group_days(const std::vector<DayTrace>& traces,
                              const LevelThresholds& thresholds) {
  LevelGroups groups;
  for (const auto& trace : traces)
    groups.of(classify_day(trace.step_total, thresholds)).push_back(trace.date);
  return groups;
}

}  // namespace dayflow
