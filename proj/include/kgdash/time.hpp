#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace kgdash {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Parses ISO-8601 date-times: `YYYY-MM-DD[T| ]HH:MM:SS[.fraction][Z|+HH:MM|-HH:MM]`.
/// A missing zone designator is read as UTC. Fractional seconds are truncated.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Strict `YYYY-MM-DD`.
std::optional<Date> parse_date(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_timestamp(Timestamp ts);
std::string format_date(Date d);
/// `YYYY-MM`
std::string format_year_month(Timestamp ts);

inline Date date_of(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

Timestamp utc_now();

}  // namespace kgdash
