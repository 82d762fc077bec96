#include "psychflow/util/time.hpp"

#include <fmt/format.h>

#include <cctype>

#include "psychflow/errors.hpp"

namespace psychflow::util {

const std::array<std::string, kDaysPerWeek> kWeekdayNames = {
    "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"};

int parse_weekday(const std::string& name) {
  for (int d = 0; d < kDaysPerWeek; ++d) {
    if (kWeekdayNames[static_cast<std::size_t>(d)] == name) return d;
  }
  throw ParseError(fmt::format("unknown weekday name '{}'", name));
}

std::int64_t days_from_civil(int year, int month, int day) {
  // Howard Hinnant's branchless civil-days algorithm.
  year -= month <= 2;
  const std::int64_t era = (year >= 0 ? year : year - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(year - era * 400);            // [0, 399]
  const unsigned doy = (153u * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;  // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;              // [0, 146096]
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

int weekday_of_serial(std::int64_t serial) {
  // 1970-01-01 (serial 0) was a Thursday = index 3 with Monday = 0.
  return static_cast<int>(((serial % 7) + 10) % 7);
}

CivilDate civil_from_serial(std::int64_t serial) {
  // Inverse of the civil-days algorithm above.
  std::int64_t z = serial + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

std::string format_date(std::int64_t serial) {
  CivilDate c = civil_from_serial(serial);
  return fmt::format("{:04d}-{:02d}-{:02d}", c.year, c.month, c.day);
}

namespace {

[[noreturn]] void bad(const std::string& text, const char* why) {
  throw ParseError(fmt::format("cannot parse timestamp '{}': {}", text, why));
}

int digits(const std::string& s, std::size_t pos, std::size_t n, const std::string& text,
           const char* what) {
  if (pos + n > s.size()) bad(text, what);
  int v = 0;
  for (std::size_t i = 0; i < n; ++i) {
    char c = s[pos + i];
    if (!std::isdigit(static_cast<unsigned char>(c))) bad(text, what);
    v = v * 10 + (c - '0');
  }
  return v;
}

std::int64_t parse_date_at(const std::string& s, const std::string& text) {
  int year = digits(s, 0, 4, text, "expected YYYY-MM-DD");
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') bad(text, "expected YYYY-MM-DD");
  int month = digits(s, 5, 2, text, "bad month");
  int day = digits(s, 8, 2, text, "bad day");
  if (month < 1 || month > 12 || day < 1 || day > 31) bad(text, "month/day out of range");
  return days_from_civil(year, month, day);
}

}  // namespace

std::int64_t parse_date_serial(const std::string& text) {
  if (text.size() != 10) bad(text, "expected YYYY-MM-DD");
  return parse_date_at(text, text);
}

Timestamp parse_timestamp(const std::string& text) {
  if (text.size() < 16) bad(text, "too short");
  Timestamp ts;
  ts.day_serial = parse_date_at(text, text);
  if (text[10] != ' ' && text[10] != 'T') bad(text, "expected ' ' or 'T' after date");
  int hh = digits(text, 11, 2, text, "bad hour");
  if (text[13] != ':') bad(text, "expected ':' in time");
  int mm = digits(text, 14, 2, text, "bad minute");
  int ss = 0;
  if (text.size() > 16) {
    if (text.size() != 19 || text[16] != ':') bad(text, "expected HH:MM or HH:MM:SS");
    ss = digits(text, 17, 2, text, "bad second");
  }
  if (hh > 23 || mm > 59 || ss > 59) bad(text, "time out of range");
  ts.hour = hh + mm / 60.0 + ss / 3600.0;
  return ts;
}

}  // namespace psychflow::util
