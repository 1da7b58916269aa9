#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace relrec {

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;
/// Signed duration in seconds.
using Seconds = std::int64_t;

inline constexpr Seconds kMinute = 60;
inline constexpr Seconds kHour = 3600;
inline constexpr Seconds kDay = 86400;

Timestamp from_civil(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                     int second = 0);

struct CivilTime {
  int year;
  unsigned month;
  unsigned day;
  int hour;
  int minute;
  int second;
};

CivilTime to_civil(Timestamp t);

/// Calendar (year, month) in UTC.
bool in_same_month(Timestamp a, Timestamp b);

/// First instant of the UTC calendar month containing t.
Timestamp month_start(Timestamp t);
/// Shift a month start by a number of calendar months (negative allowed).
Timestamp add_months(Timestamp month_begin, int months);
/// Whole calendar months from the month of `from` to the month of `to`.
int months_between(Timestamp from, Timestamp to);

/// Parses "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SSZ", "YYYY-MM-DD HH:MM:SS" (UTC) or an
/// integer number of epoch seconds.
std::optional<Timestamp> parse_time(std::string_view text);
std::string format_date(Timestamp t);
std::string format_datetime(Timestamp t);

/// Parses durations like "30m", "8h", "90s", "2d", "1800" (seconds).
std::optional<Seconds> parse_duration(std::string_view text);

/// Local-time rule of a log source: a fixed UTC offset or a named zone with
/// daylight-saving transitions.
class TimeZoneRule {
 public:
  static TimeZoneRule fixed(Seconds utc_offset);
  /// Supported names: "UTC", "America/New_York", "America/Denver",
  /// "America/Chicago", "America/Los_Angeles", "Europe/Berlin", "Europe/London".
  static std::optional<TimeZoneRule> named(std::string_view name);
  /// Either a zone name or an offset like "+0100" / "-0700".
  static std::optional<TimeZoneRule> parse(std::string_view spec);

  /// Local wall-clock time to UTC. Times inside a DST fold resolve to the
  /// earlier UTC instant; times inside a DST gap are shifted by the standard
  /// offset.
  Timestamp to_utc(const CivilTime& local) const;
  Seconds offset_at(Timestamp utc) const;

  const std::string& name() const { return name_; }

 private:
  enum class DstRule { None, UnitedStates, EuropeanUnion };

  TimeZoneRule(std::string name, Seconds standard, DstRule rule)
      : name_(std::move(name)), standard_offset_(standard), dst_(rule) {}

  std::string name_;
  Seconds standard_offset_ = 0;
  DstRule dst_ = DstRule::None;

  bool dst_active_utc(Timestamp utc) const;
};

}  // namespace relrec
