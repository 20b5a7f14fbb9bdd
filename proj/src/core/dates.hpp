// dates.hpp — calendar dates as day counts, ISO-8601 parsing/formatting.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace momlab {

/// A calendar date stored as days since 1970-01-01.
struct Date {
  int32_t days = 0;

  friend auto operator<=>(const Date&, const Date&) = default;
};

/// Parses "YYYY-MM-DD". Throws Error(MalformedRow) on anything else.
Date parse_date(std::string_view text);

/// Formats as "YYYY-MM-DD".
std::string format_date(Date d);

/// Key yyyymm identifying the calendar month of d.
int month_key(Date d);

/// Key (iso_year * 100 + iso_week) identifying the ISO-8601 week of d.
int iso_week_key(Date d);

}  // namespace momlab
