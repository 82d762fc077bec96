#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace psychflow::util {

/// Day-of-week indices used throughout: 0 = Monday ... 6 = Sunday.
inline constexpr int kDaysPerWeek = 7;

extern const std::array<std::string, kDaysPerWeek> kWeekdayNames;  // "monday".."sunday"

/// Parses a lowercase weekday name; throws ParseError otherwise.
int parse_weekday(const std::string& name);

/// Days since 1970-01-01 for a proleptic-Gregorian civil date.
std::int64_t days_from_civil(int year, int month, int day);

/// Day-of-week (0 = Monday) for a day serial as produced by days_from_civil.
int weekday_of_serial(std::int64_t serial);

struct CivilDate {
  int year = 1970;
  int month = 1;
  int day = 1;
};

/// Inverse of days_from_civil.
CivilDate civil_from_serial(std::int64_t serial);

/// "YYYY-MM-DD" for a day serial.
std::string format_date(std::int64_t serial);

/// One wall-clock instant split into a civil day serial plus hour-of-day.
struct Timestamp {
  std::int64_t day_serial = 0;  ///< days since 1970-01-01
  double hour = 0.0;            ///< [0, 24)

  int weekday() const { return weekday_of_serial(day_serial); }
  double hours_since_epoch() const { return static_cast<double>(day_serial) * 24.0 + hour; }
};

/// Parses "YYYY-MM-DD HH:MM" or "YYYY-MM-DD HH:MM:SS" (a 'T' separator is
/// also accepted). Throws ParseError naming the bad text.
Timestamp parse_timestamp(const std::string& text);

/// Parses "YYYY-MM-DD"; throws ParseError.
std::int64_t parse_date_serial(const std::string& text);

}  // namespace psychflow::util
