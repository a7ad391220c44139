#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forumquant/civil_time.hpp"

namespace fq {

// Sorted list of trading sessions. Day indices used throughout the library
// are positions in this list.
class TradingCalendar {
public:
    TradingCalendar() = default;
    explicit TradingCalendar(std::vector<CivilDate> dates);

    std::size_t size() const { return dates_.size(); }
    bool empty() const { return dates_.empty(); }
    const std::vector<CivilDate>& dates() const { return dates_; }
    const CivilDate& date(std::size_t day) const { return dates_.at(day); }
    std::int64_t close_utc(std::size_t day) const { return closes_utc_.at(day); }
    const std::vector<std::int64_t>& closes_utc() const { return closes_utc_; }

    std::optional<int> index_of(const CivilDate& date) const;
    // First session whose date is >= `date`, if any.
    std::optional<int> first_on_or_after(const CivilDate& date) const;

private:
    std::vector<CivilDate> dates_;
    std::vector<std::int64_t> closes_utc_;
};

// A price file as read from disk, before calendar alignment.
struct RawPriceFile {
    std::string ticker;
    std::vector<CivilDate> dates;
    std::vector<double> adj_close;
};

// Adjusted close prices on calendar day indices. Missing sessions are gaps
// and are never filled.
struct PriceSeries {
    std::string ticker;
    std::vector<int> days;          // strictly increasing calendar indices
    std::vector<double> adj_close;  // > 0, one per entry in `days`

    std::optional<double> price_at(int day) const;
    bool empty() const { return days.empty(); }
};

struct DatedValue {
    int day = 0;
    double value = 0.0;
    bool operator==(const DatedValue&) const = default;
};

inline constexpr int kTradingDaysPerWeek = 5;
inline constexpr int weeks_to_trading_days(int weeks) { return weeks * kTradingDaysPerWeek; }

// CSV with header `date,adjusted_close`. Rows may be in any order.
RawPriceFile read_price_csv(const std::filesystem::path& path, const std::string& ticker);

TradingCalendar infer_calendar(const RawPriceFile& index_series);

// Re-index onto the calendar; rows on non-trading dates are dropped.
PriceSeries align_to_calendar(const RawPriceFile& raw, const TradingCalendar& calendar);

// Reads `<dir>/<TICKER>.csv` for every ticker requested (all CSV files in
// the directory when `tickers` is empty).
std::map<std::string, PriceSeries> load_prices(const std::filesystem::path& dir, const TradingCalendar& calendar,
                                               const std::vector<std::string>& tickers = {});

// r_t = ln(p_t / p_{t-1}) for each pair of adjacent calendar days that are
// both priced. A return is never formed across a gap.
std::vector<DatedValue> log_return_series(const PriceSeries& series);

// Same returns laid out densely over `n_days` calendar days (NaN where undefined).
std::vector<double> dense_log_returns(const PriceSeries& series, std::size_t n_days);

// ln(p_{t+m} / p_t); throws kOutOfRange naming the missing endpoint.
double forward_return(const PriceSeries& series, int t, int m_days);

}  // namespace fq
