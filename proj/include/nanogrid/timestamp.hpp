#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace nanogrid {

/// An instant in UTC plus the local offset it was declared with.
///
/// Ordering and equality compare only the instant. Calendar fields (month,
/// day) are evaluated in the declared local offset.
struct Timestamp {
  std::int64_t utc_seconds = 0;
  int offset_minutes = 0;

  /// Parses `YYYY-MM-DDTHH:MM[:SS]` followed by `Z` or `+HH:MM`/`-HH:MM`.
  /// A space is accepted in place of `T`. Throws InvalidInput.
  static Timestamp parse(std::string_view text);

  /// Builds a timestamp from local wall-clock fields.
  static Timestamp from_local(int year, unsigned month, unsigned day, int hour, int minute,
                              int second, int offset_minutes);

  std::string to_string() const;

  Timestamp plus_seconds(std::int64_t s) const { return {utc_seconds + s, offset_minutes}; }
  Timestamp with_offset(int minutes) const { return {utc_seconds, minutes}; }

  std::int64_t local_seconds() const { return utc_seconds + std::int64_t{offset_minutes} * 60; }

  /// "YYYY-MM" in local time.
  std::string month_label() const;
  /// "YYYY-MM-DD" in local time.
  std::string day_label() const;
  /// Days since 1970-01-01 in local time.
  std::int64_t local_day() const;
  /// Hour of day in local time, fractional.
  double local_hour() const;
  /// Day of year in local time, 1-based.
  int local_day_of_year() const;

  friend bool operator==(const Timestamp& a, const Timestamp& b) { return a.utc_seconds == b.utc_seconds; }
  friend auto operator<=>(const Timestamp& a, const Timestamp& b) { return a.utc_seconds <=> b.utc_seconds; }
};

}  // namespace nanogrid
