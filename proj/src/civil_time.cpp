#include "forumquant/civil_time.hpp"

#include <charconv>
#include <cstdio>

#include "forumquant/errors.hpp"

namespace fq {

namespace {

namespace chr = std::chrono;

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

// n-th (1-based) Sunday of a month; n = -1 selects the last one.
CivilDate nth_sunday(int year, unsigned month, int n) {
    if (n > 0) {
        CivilDate first{year, month, 1};
        const unsigned wd = first.weekday();
        const unsigned offset = (7 - wd) % 7;
        return first.plus_days(static_cast<std::int64_t>(offset) + 7 * (n - 1));
    }
    const YearMonth next = YearMonth{year, month}.next();
    const CivilDate last = CivilDate{next.year, next.month, 1}.plus_days(-1);
    return last.plus_days(-static_cast<std::int64_t>(last.weekday()));
}

struct DstWindow {
    CivilDate start;  // DST begins 02:00 local standard time
    CivilDate end;    // DST ends 02:00 local daylight time
};

DstWindow dst_window(int year) {
    if (year >= 2007) return {nth_sunday(year, 3, 2), nth_sunday(year, 11, 1)};
    return {nth_sunday(year, 4, 1), nth_sunday(year, 10, -1)};
}

std::int64_t local_seconds(const CivilDate& d, int h, int m, int s) {
    return d.days_since_epoch() * kSecondsPerDay + h * 3600 + m * 60 + s;
}

unsigned parse_unsigned(std::string_view text, std::string_view whole) {
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorKind::kSchema, "invalid date '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

std::int64_t CivilDate::days_since_epoch() const {
    const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
    return chr::sys_days{ymd}.time_since_epoch().count();
}

CivilDate CivilDate::from_days(std::int64_t days) {
    const chr::year_month_day ymd{chr::sys_days{chr::days{days}}};
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
            static_cast<unsigned>(ymd.day())};
}

CivilDate CivilDate::parse(std::string_view iso) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        throw Error(ErrorKind::kSchema, "invalid date '" + std::string(iso) + "', expected YYYY-MM-DD");
    }
    CivilDate d{static_cast<int>(parse_unsigned(iso.substr(0, 4), iso)), parse_unsigned(iso.substr(5, 2), iso),
                parse_unsigned(iso.substr(8, 2), iso)};
    const chr::year_month_day ymd{chr::year{d.year}, chr::month{d.month}, chr::day{d.day}};
    if (!ymd.ok()) throw Error(ErrorKind::kSchema, "invalid date '" + std::string(iso) + "'");
    return d;
}

std::string CivilDate::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
    return buf;
}

unsigned CivilDate::weekday() const {
    return chr::weekday{chr::sys_days{chr::days{days_since_epoch()}}}.c_encoding();
}

std::string YearMonth::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
    return buf;
}

YearMonth YearMonth::parse(std::string_view text) {
    if (text.size() < 7 || text[4] != '-') {
        throw Error(ErrorKind::kSchema, "invalid month '" + std::string(text) + "', expected YYYY-MM");
    }
    YearMonth ym{static_cast<int>(parse_unsigned(text.substr(0, 4), text)), parse_unsigned(text.substr(5, 2), text)};
    if (ym.month < 1 || ym.month > 12) throw Error(ErrorKind::kSchema, "invalid month '" + std::string(text) + "'");
    return ym;
}

std::string IsoWeek::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-W%02u", year, week);
    return buf;
}

IsoWeek iso_week(const CivilDate& date) {
    // ISO weeks start on Monday; week 1 contains the year's first Thursday.
    const std::int64_t days = date.days_since_epoch();
    const unsigned wd = (date.weekday() + 6) % 7;  // Monday = 0
    const CivilDate thursday = CivilDate::from_days(days - wd + 3);
    const std::int64_t jan1 = CivilDate{thursday.year, 1, 1}.days_since_epoch();
    const auto week = static_cast<unsigned>((thursday.days_since_epoch() - jan1) / 7 + 1);
    return {thursday.year, week};
}

std::int64_t eastern_to_utc(const CivilDate& date, int hour, int minute, int second) {
    const DstWindow w = dst_window(date.year);
    const std::int64_t local = local_seconds(date, hour, minute, second);
    const bool dst = local >= local_seconds(w.start, 2, 0, 0) && local < local_seconds(w.end, 2, 0, 0);
    return local + (dst ? 4 : 5) * 3600;
}

CivilDate eastern_date_of(std::int64_t utc_seconds) {
    const CivilDate utc_date = CivilDate::from_days(floor_div(utc_seconds, kSecondsPerDay));
    const DstWindow w = dst_window(utc_date.year);
    const std::int64_t start_utc = local_seconds(w.start, 2, 0, 0) + 5 * 3600;
    const std::int64_t end_utc = local_seconds(w.end, 2, 0, 0) + 4 * 3600;
    const bool dst = utc_seconds >= start_utc && utc_seconds < end_utc;
    const std::int64_t local = utc_seconds - (dst ? 4 : 5) * 3600;
    return CivilDate::from_days(floor_div(local, kSecondsPerDay));
}

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kValidation: return "validation";
        case ErrorKind::kSchema: return "schema";
        case ErrorKind::kIo: return "io";
        case ErrorKind::kOutOfRange: return "out_of_range";
        case ErrorKind::kSingular: return "singular";
        case ErrorKind::kInsufficient: return "insufficient_data";
    }
    return "unknown";
}

}  // namespace fq
