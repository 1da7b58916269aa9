#include "relrec/timeutil.hpp"

#include <charconv>
#include <cstdio>

namespace relrec {

namespace chr = std::chrono;

Timestamp from_civil(int year, unsigned month, unsigned day, int hour, int minute, int second) {
  const chr::sys_days d{chr::year{year} / chr::month{month} / chr::day{day}};
  return static_cast<Timestamp>(d.time_since_epoch().count()) * kDay + hour * kHour +
         minute * kMinute + second;
}

CivilTime to_civil(Timestamp t) {
  const chr::sys_seconds s{chr::seconds{t}};
  const auto day_point = chr::floor<chr::days>(s);
  const chr::year_month_day ymd{day_point};
  const chr::hh_mm_ss hms{s - day_point};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
          static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
          static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count())};
}

bool in_same_month(Timestamp a, Timestamp b) {
  const auto ca = to_civil(a);
  const auto cb = to_civil(b);
  return ca.year == cb.year && ca.month == cb.month;
}

Timestamp month_start(Timestamp t) {
  const auto c = to_civil(t);
  return from_civil(c.year, c.month, 1);
}

Timestamp add_months(Timestamp month_begin, int months) {
  const auto c = to_civil(month_begin);
  int index = c.year * 12 + static_cast<int>(c.month) - 1 + months;
  // floor division keeps negative years well-formed
  int year = index >= 0 ? index / 12 : -((-index + 11) / 12);
  int month = index - year * 12 + 1;
  return from_civil(year, static_cast<unsigned>(month), c.day, c.hour, c.minute, c.second);
}

int months_between(Timestamp from, Timestamp to) {
  const auto a = to_civil(from);
  const auto b = to_civil(to);
  return (b.year - a.year) * 12 + static_cast<int>(b.month) - static_cast<int>(a.month);
}

namespace {

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool valid_civil(int y, int mo, int d, int h, int mi, int s) {
  if (mo < 1 || mo > 12 || d < 1 || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 || s > 60) {
    return false;
  }
  const chr::year_month_day ymd{chr::year{y} / chr::month{static_cast<unsigned>(mo)} /
                                chr::day{static_cast<unsigned>(d)}};
  return ymd.ok();
}

}  // namespace

std::optional<Timestamp> parse_time(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return std::nullopt;

  if (text.size() < 10 || text[4] != '-') {
    Timestamp value = 0;
    if (parse_int(text, value)) return value;
    return std::nullopt;
  }

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (text[7] != '-' || !parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) ||
      !parse_int(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  if (text.size() > 10) {
    auto rest = text.substr(10);
    if (rest.front() != 'T' && rest.front() != ' ') return std::nullopt;
    rest.remove_prefix(1);
    if (!rest.empty() && rest.back() == 'Z') rest.remove_suffix(1);
    if (rest.size() != 8 || rest[2] != ':' || rest[5] != ':' || !parse_int(rest.substr(0, 2), h) ||
        !parse_int(rest.substr(3, 2), mi) || !parse_int(rest.substr(6, 2), s)) {
      return std::nullopt;
    }
  }
  if (!valid_civil(y, mo, d, h, mi, s)) return std::nullopt;
  return from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s);
}

std::string format_date(Timestamp t) {
  const auto c = to_civil(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", c.year, c.month, c.day);
  return buf;
}

std::string format_datetime(Timestamp t) {
  const auto c = to_civil(t);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", c.year, c.month, c.day, c.hour,
                c.minute, c.second);
  return buf;
}

std::optional<Seconds> parse_duration(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::size_t digits = 0;
  while (digits < text.size() && text[digits] >= '0' && text[digits] <= '9') ++digits;
  Seconds value = 0;
  if (!parse_int(text.substr(0, digits), value)) return std::nullopt;
  const auto unit = text.substr(digits);
  if (unit.empty() || unit == "s") return value;
  if (unit == "m" || unit == "min") return value * kMinute;
  if (unit == "h") return value * kHour;
  if (unit == "d") return value * kDay;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Time zones

namespace {

// Day of month of the n-th (1-based) Sunday, or the last Sunday when n == 0.
unsigned sunday_of_month(int year, unsigned month, int n) {
  if (n == 0) {
    const chr::sys_days last{chr::year{year} / chr::month{month} / chr::last};
    const chr::weekday wd{last};
    const unsigned back = wd.c_encoding();  // days since Sunday
    return static_cast<unsigned>(chr::year_month_day{last - chr::days{back}}.day());
  }
  const chr::year_month_day ymd{chr::year{year} / chr::month{month} /
                                chr::weekday_indexed{chr::Sunday, static_cast<unsigned>(n)}};
  return static_cast<unsigned>(ymd.day());
}

}  // namespace

TimeZoneRule TimeZoneRule::fixed(Seconds utc_offset) {
  char buf[40];
  const Seconds a = utc_offset < 0 ? -utc_offset : utc_offset;
  std::snprintf(buf, sizeof buf, "%c%02lld%02lld", utc_offset < 0 ? '-' : '+',
                static_cast<long long>(a / kHour), static_cast<long long>((a % kHour) / kMinute));
  return TimeZoneRule(buf, utc_offset, DstRule::None);
}

std::optional<TimeZoneRule> TimeZoneRule::named(std::string_view name) {
  if (name == "UTC" || name == "Etc/UTC") return TimeZoneRule("UTC", 0, DstRule::None);
  if (name == "America/New_York") return TimeZoneRule(std::string(name), -5 * kHour, DstRule::UnitedStates);
  if (name == "America/Chicago") return TimeZoneRule(std::string(name), -6 * kHour, DstRule::UnitedStates);
  if (name == "America/Denver") return TimeZoneRule(std::string(name), -7 * kHour, DstRule::UnitedStates);
  if (name == "America/Los_Angeles") return TimeZoneRule(std::string(name), -8 * kHour, DstRule::UnitedStates);
  if (name == "Europe/London") return TimeZoneRule(std::string(name), 0, DstRule::EuropeanUnion);
  if (name == "Europe/Berlin") return TimeZoneRule(std::string(name), kHour, DstRule::EuropeanUnion);
  return std::nullopt;
}

std::optional<TimeZoneRule> TimeZoneRule::parse(std::string_view spec) {
  if (spec.size() == 5 && (spec[0] == '+' || spec[0] == '-')) {
    int hh = 0, mm = 0;
    if (!parse_int(spec.substr(1, 2), hh) || !parse_int(spec.substr(3, 2), mm) || mm > 59) {
      return std::nullopt;
    }
    const Seconds off = hh * kHour + mm * kMinute;
    return fixed(spec[0] == '-' ? -off : off);
  }
  return named(spec);
}

bool TimeZoneRule::dst_active_utc(Timestamp utc) const {
  if (dst_ == DstRule::None) return false;
  const int year = to_civil(utc + standard_offset_).year;
  Timestamp begin = 0, end = 0;
  if (dst_ == DstRule::UnitedStates) {
    unsigned start_month = 4, end_month = 10;
    int start_n = 0, end_n = 0;  // last Sunday
    if (year >= 2007) {
      start_month = 3; start_n = 2; end_month = 11; end_n = 1;
    } else if (year >= 1987) {
      start_n = 1;
    }
    begin = from_civil(year, start_month, sunday_of_month(year, start_month, start_n), 2) -
            standard_offset_;
    end = from_civil(year, end_month, sunday_of_month(year, end_month, end_n), 2) -
          (standard_offset_ + kHour);
  } else {
    begin = from_civil(year, 3, sunday_of_month(year, 3, 0), 1);
    end = from_civil(year, 10, sunday_of_month(year, 10, 0), 1);
  }
  return utc >= begin && utc < end;
}

Seconds TimeZoneRule::offset_at(Timestamp utc) const {
  return standard_offset_ + (dst_active_utc(utc) ? kHour : 0);
}

Timestamp TimeZoneRule::to_utc(const CivilTime& local) const {
  const Timestamp wall =
      from_civil(local.year, local.month, local.day, local.hour, local.minute, local.second);
  const Timestamp as_standard = wall - standard_offset_;
  if (dst_ == DstRule::None) return as_standard;
  const Timestamp as_daylight = wall - standard_offset_ - kHour;
  // In a fold both readings are valid and the daylight one is earlier; in a
  // gap neither is, and the standard reading is used.
  if (dst_active_utc(as_daylight)) return as_daylight;
  return as_standard;
}

}  // namespace relrec
