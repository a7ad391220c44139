#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>

namespace fq {

// Calendar date without a time zone. Ordered, hashable via days_since_epoch.
struct CivilDate {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    auto operator<=>(const CivilDate&) const = default;

    std::int64_t days_since_epoch() const;
    static CivilDate from_days(std::int64_t days);
    static CivilDate parse(std::string_view iso);  // YYYY-MM-DD
    std::string to_string() const;

    unsigned weekday() const;  // 0 = Sunday
    CivilDate plus_days(std::int64_t n) const { return from_days(days_since_epoch() + n); }
};

struct YearMonth {
    int year = 1970;
    unsigned month = 1;

    auto operator<=>(const YearMonth&) const = default;
    YearMonth next() const { return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1}; }
    std::string to_string() const;  // YYYY-MM
    static YearMonth parse(std::string_view text);
};

struct IsoWeek {
    int year = 1970;
    unsigned week = 1;
    auto operator<=>(const IsoWeek&) const = default;
    std::string to_string() const;  // YYYY-Www
};

IsoWeek iso_week(const CivilDate& date);

// US/Eastern wall clock <-> UTC. DST follows the US federal rules
// (2007 onward: second Sunday of March to first Sunday of November;
// 1987-2006: first Sunday of April to last Sunday of October).
std::int64_t eastern_to_utc(const CivilDate& date, int hour, int minute = 0, int second = 0);
CivilDate eastern_date_of(std::int64_t utc_seconds);

// Market close (16:00 US/Eastern) of the given session date, in UTC seconds.
inline std::int64_t market_close_utc(const CivilDate& date) { return eastern_to_utc(date, 16); }

}  // namespace fq
