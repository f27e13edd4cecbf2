#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "dayflow/errors.hpp"

namespace dayflow {

// Instants are UTC epoch seconds; all inputs carry explicit offsets and all
// outputs are serialized as ISO 8601 UTC with second precision.
using Instant = std::int64_t;

constexpr std::int64_t kSecondsPerDay = 86400;

struct CivilDate {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  friend bool operator==(const CivilDate&, const CivilDate&) = default;
};

namespace detail {

// Howard Hinnant's civil-date algorithms.
inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
                   static_cast<int>(d)};
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline bool is_leap(int y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

inline int days_in_month(int y, int m) {
  static constexpr int lengths[] = {31, 28, 31, 30, 31, 30,
                                    31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return lengths[m - 1];
}

inline bool parse_fixed_digits(std::string_view s, std::size_t pos, int count,
                               int& out) {
  int v = 0;
  for (int i = 0; i < count; ++i) {
    if (pos + i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[pos + i])))
      return false;
    v = v * 10 + (s[pos + i] - '0');
  }
  out = v;
  return true;
}

}  // namespace detail

// Day boundaries use a fixed-offset zone ("UTC", "+02:00", "UTC-05:30", ...).
// Single-site monitoring data has no use for DST transitions and std::chrono
// time zones are not available on all supported toolchains.
struct TimeZone {
  std::string name = "UTC";
  std::int64_t offset_seconds = 0;
};

inline TimeZone parse_timezone(std::string_view spec) {
  std::string_view rest = spec;
  if (rest.rfind("UTC", 0) == 0) rest.remove_prefix(3);
  if (rest.empty() || rest == "Z") return TimeZone{std::string(spec), 0};
  const char sign_ch = rest.front();
  if (sign_ch != '+' && sign_ch != '-')
    throw ConfigError("invalid timezone '" + std::string(spec) +
                      "': expected UTC or a fixed offset like +02:00");
  rest.remove_prefix(1);
  int hours = 0;
  int minutes = 0;
  if (rest.size() == 1 && std::isdigit(static_cast<unsigned char>(rest[0]))) {
    hours = rest[0] - '0';
  } else if (rest.size() == 2 && detail::parse_fixed_digits(rest, 0, 2, hours)) {
  } else if (rest.size() == 5 && rest[2] == ':' &&
             detail::parse_fixed_digits(rest, 0, 2, hours) &&
             detail::parse_fixed_digits(rest, 3, 2, minutes)) {
  } else {
    throw ConfigError("invalid timezone offset '" + std::string(spec) + "'");
  }
  if (hours > 18 || minutes > 59)
    throw ConfigError("timezone offset out of range: " + std::string(spec));
  const std::int64_t off = (sign_ch == '-' ? -1 : 1) *
                           (hours * 3600LL + minutes * 60LL);
  return TimeZone{std::string(spec), off};
}

// Strict ISO 8601 with explicit offset: YYYY-MM-DDTHH:MM:SS(Z|+HH:MM|-HH:MM).
inline Instant parse_instant(std::string_view s) {
  int Y, M, D, h, m, sec;
  const bool shape_ok =
      s.size() >= 20 && detail::parse_fixed_digits(s, 0, 4, Y) && s[4] == '-' &&
      detail::parse_fixed_digits(s, 5, 2, M) && s[7] == '-' &&
      detail::parse_fixed_digits(s, 8, 2, D) && (s[10] == 'T' || s[10] == 't') &&
      detail::parse_fixed_digits(s, 11, 2, h) && s[13] == ':' &&
      detail::parse_fixed_digits(s, 14, 2, m) && s[16] == ':' &&
      detail::parse_fixed_digits(s, 17, 2, sec);
  if (!shape_ok)
    throw DataError("malformed timestamp '" + std::string(s) + "'");
  std::string_view tail = s.substr(19);
  std::int64_t offset = 0;
  if (tail == "Z" || tail == "z") {
  } else if (tail.size() == 6 && (tail[0] == '+' || tail[0] == '-') &&
             tail[3] == ':') {
    int oh, om;
    if (!detail::parse_fixed_digits(tail, 1, 2, oh) ||
        !detail::parse_fixed_digits(tail, 4, 2, om) || oh > 18 || om > 59)
      throw DataError("malformed timestamp offset '" + std::string(s) + "'");
    offset = (tail[0] == '-' ? -1 : 1) * (oh * 3600LL + om * 60LL);
  } else {
    throw DataError("timestamp '" + std::string(s) +
                    "' lacks a valid explicit offset");
  }
  if (M < 1 || M > 12 || D < 1 || D > detail::days_in_month(Y, M) || h > 23 ||
      m > 59 || sec > 59)
    throw DataError("timestamp field out of range '" + std::string(s) + "'");
  const std::int64_t days = detail::days_from_civil(Y, M, D);
  return days * kSecondsPerDay + h * 3600LL + m * 60LL + sec - offset;
}

inline std::string format_instant_utc(Instant t) {
  const std::int64_t day = detail::floor_div(t, kSecondsPerDay);
  std::int64_t rem = t - day * kSecondsPerDay;
  const CivilDate d = detail::civil_from_days(day);
  char buf[44];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02lld:%02lld:%02lldZ", d.year,
                d.month, d.day, static_cast<long long>(rem / 3600),
                static_cast<long long>((rem % 3600) / 60),
                static_cast<long long>(rem % 60));
  return buf;
}

inline CivilDate local_date(Instant t, const TimeZone& zone) {
  return detail::civil_from_days(
      detail::floor_div(t + zone.offset_seconds, kSecondsPerDay));
}

inline std::string format_date(const CivilDate& d) {
  char buf[12];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

inline CivilDate parse_date(std::string_view s) {
  int Y, M, D;
  if (s.size() != 10 || !detail::parse_fixed_digits(s, 0, 4, Y) || s[4] != '-' ||
      !detail::parse_fixed_digits(s, 5, 2, M) || s[7] != '-' ||
      !detail::parse_fixed_digits(s, 8, 2, D) || M < 1 || M > 12 || D < 1 ||
      D > detail::days_in_month(Y, M))
    throw DataError("malformed date '" + std::string(s) + "'");
  return CivilDate{Y, M, D};
}

// First instant of the given local calendar day.
inline Instant day_start(const CivilDate& d, const TimeZone& zone) {
  return detail::days_from_civil(d.year, d.month, d.day) * kSecondsPerDay -
         zone.offset_seconds;
}

// The local midnight strictly after t (== t + 86400 when t is a midnight).
inline Instant next_local_midnight(Instant t, const TimeZone& zone) {
  const std::int64_t local = t + zone.offset_seconds;
  return (detail::floor_div(local, kSecondsPerDay) + 1) * kSecondsPerDay -
         zone.offset_seconds;
}

}  // namespace dayflow
