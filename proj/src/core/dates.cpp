#include "core/dates.hpp"

#include <charconv>
#include <chrono>

#include "core/errors.hpp"

namespace momlab {

namespace chr = std::chrono;

namespace {

chr::year_month_day to_ymd(Date d) {
  return chr::year_month_day{chr::sys_days{chr::days{d.days}}};
}

int parse_int_field(std::string_view s) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return -1;
  return value;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-')
    throw Error(ErrorCode::MalformedRow, "bad date '" + std::string(text) + "' (want YYYY-MM-DD)");
  const int y = parse_int_field(text.substr(0, 4));
  const int m = parse_int_field(text.substr(5, 2));
  const int d = parse_int_field(text.substr(8, 2));
  if (y < 0 || m < 0 || d < 0)
    throw Error(ErrorCode::MalformedRow, "bad date '" + std::string(text) + "'");
  const chr::year_month_day ymd{chr::year{y}, chr::month{unsigned(m)}, chr::day{unsigned(d)}};
  if (!ymd.ok())
    throw Error(ErrorCode::MalformedRow, "invalid calendar date '" + std::string(text) + "'");
  return Date{int32_t(chr::sys_days{ymd}.time_since_epoch().count())};
}

std::string format_date(Date d) {
  const auto ymd = to_ymd(d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return std::string(buf);
}

int month_key(Date d) {
  const auto ymd = to_ymd(d);
  return int(ymd.year()) * 100 + int(unsigned(ymd.month()));
}

int iso_week_key(Date d) {
  // ISO week = week of the Thursday in the same Mon..Sun block.
  const chr::sys_days sd{chr::days{d.days}};
  const chr::weekday wd{sd};
  const int iso_dow = wd.iso_encoding();  // Mon=1 .. Sun=7
  const chr::sys_days thursday = sd + chr::days{4 - iso_dow};
  const chr::year_month_day t{thursday};
  const chr::sys_days jan1{chr::year_month_day{t.year(), chr::January, chr::day{1}}};
  const int week = int((thursday - jan1).count() / 7) + 1;
  return int(t.year()) * 100 + week;
}

}  // namespace momlab
