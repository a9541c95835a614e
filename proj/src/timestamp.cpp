#include "nanogrid/timestamp.hpp"

#include <fmt/format.h>

#include <charconv>
#include <chrono>

#include "nanogrid/error.hpp"

namespace nanogrid {
namespace {

namespace chr = std::chrono;

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw InvalidInput(fmt::format("truncated timestamp '{}'", text));
  int value = 0;
  auto first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len)
    throw InvalidInput(fmt::format("malformed timestamp '{}'", text));
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c)
    throw InvalidInput(fmt::format("malformed timestamp '{}'", text));
}

chr::year_month_day civil(std::int64_t local_seconds) {
  return chr::year_month_day{chr::sys_days{chr::days{floor_div(local_seconds, kSecondsPerDay)}}};
}

}  // namespace

Timestamp Timestamp::from_local(int year, unsigned month, unsigned day, int hour, int minute,
                                int second, int offset_minutes) {
  chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
  if (!ymd.ok()) throw InvalidInput(fmt::format("invalid date {}-{}-{}", year, month, day));
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 || second > 59)
    throw InvalidInput(fmt::format("invalid time {:02}:{:02}:{:02}", hour, minute, second));
  if (offset_minutes < -18 * 60 || offset_minutes > 18 * 60)
    throw InvalidInput("utc offset out of range");
  const std::int64_t days = chr::sys_days{ymd}.time_since_epoch().count();
  const std::int64_t local = days * kSecondsPerDay + hour * 3600 + minute * 60 + second;
  return {local - std::int64_t{offset_minutes} * 60, offset_minutes};
}

Timestamp Timestamp::parse(std::string_view text) {
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);

  const int year = read_int(text, 0, 4);
  expect(text, 4, '-');
  const int month = read_int(text, 5, 2);
  expect(text, 7, '-');
  const int day = read_int(text, 8, 2);
  if (text.size() <= 10 || (text[10] != 'T' && text[10] != ' '))
    throw InvalidInput(fmt::format("timestamp '{}' lacks a time of day", text));
  const int hour = read_int(text, 11, 2);
  expect(text, 13, ':');
  const int minute = read_int(text, 14, 2);
  std::size_t pos = 16;
  int second = 0;
  if (pos < text.size() && text[pos] == ':') {
    second = read_int(text, pos + 1, 2);
    pos += 3;
  }

  if (pos >= text.size())
    throw InvalidInput(fmt::format("timestamp '{}' has no utc offset", text));
  int offset = 0;
  if (text[pos] == 'Z') {
    ++pos;
  } else if (text[pos] == '+' || text[pos] == '-') {
    const int sign = text[pos] == '-' ? -1 : 1;
    const int oh = read_int(text, pos + 1, 2);
    expect(text, pos + 3, ':');
    const int om = read_int(text, pos + 4, 2);
    offset = sign * (oh * 60 + om);
    pos += 6;
  } else {
    throw InvalidInput(fmt::format("malformed utc offset in '{}'", text));
  }
  if (pos != text.size()) throw InvalidInput(fmt::format("trailing characters in '{}'", text));

  return from_local(year, static_cast<unsigned>(month), static_cast<unsigned>(day), hour, minute,
                    second, offset);
}

std::string Timestamp::to_string() const {
  const std::int64_t local = local_seconds();
  const auto ymd = civil(local);
  const std::int64_t sod = local - floor_div(local, kSecondsPerDay) * kSecondsPerDay;
  const std::string date =
      fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), sod / 3600,
                  (sod / 60) % 60, sod % 60);
  if (offset_minutes == 0) return date + "Z";
  const int mag = offset_minutes < 0 ? -offset_minutes : offset_minutes;
  return fmt::format("{}{}{:02}:{:02}", date, offset_minutes < 0 ? '-' : '+', mag / 60, mag % 60);
}

std::string Timestamp::month_label() const {
  const auto ymd = civil(local_seconds());
  return fmt::format("{:04}-{:02}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()));
}

std::string Timestamp::day_label() const {
  const auto ymd = civil(local_seconds());
  return fmt::format("{:04}-{:02}-{:02}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::int64_t Timestamp::local_day() const { return floor_div(local_seconds(), kSecondsPerDay); }

double Timestamp::local_hour() const {
  const std::int64_t local = local_seconds();
  return static_cast<double>(local - floor_div(local, kSecondsPerDay) * kSecondsPerDay) / 3600.0;
}

int Timestamp::local_day_of_year() const {
  const auto ymd = civil(local_seconds());
  const chr::sys_days jan1{chr::year_month_day{ymd.year(), chr::January, chr::day{1}}};
  return static_cast<int>((chr::sys_days{ymd} - jan1).count()) + 1;
}

}  // namespace nanogrid
