#include "forumquant/marketdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "forumquant/errors.hpp"
#include "forumquant/numeric.hpp"

namespace fq {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

void check_price(double p, const std::string& where) {
    if (!(p > 0.0) || !std::isfinite(p)) {
        throw Error(ErrorKind::kValidation, where + ": price must be positive and finite");
    }
}

}  // namespace

TradingCalendar::TradingCalendar(std::vector<CivilDate> dates) : dates_(std::move(dates)) {
    for (std::size_t i = 1; i < dates_.size(); ++i) {
        if (!(dates_[i - 1] < dates_[i])) {
            throw Error(ErrorKind::kValidation, "trading calendar must be strictly increasing at " + dates_[i].to_string());
        }
    }
    closes_utc_.reserve(dates_.size());
    for (const auto& d : dates_) closes_utc_.push_back(market_close_utc(d));
}

std::optional<int> TradingCalendar::index_of(const CivilDate& date) const {
    auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
    if (it == dates_.end() || *it != date) return std::nullopt;
    return static_cast<int>(it - dates_.begin());
}

std::optional<int> TradingCalendar::first_on_or_after(const CivilDate& date) const {
    auto it = std::lower_bound(dates_.begin(), dates_.end(), date);
    if (it == dates_.end()) return std::nullopt;
    return static_cast<int>(it - dates_.begin());
}

std::optional<double> PriceSeries::price_at(int day) const {
    auto it = std::lower_bound(days.begin(), days.end(), day);
    if (it == days.end() || *it != day) return std::nullopt;
    return adj_close[static_cast<std::size_t>(it - days.begin())];
}

RawPriceFile read_price_csv(const std::filesystem::path& path, const std::string& ticker) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kIo, "cannot open price file " + path.string());
    RawPriceFile raw;
    raw.ticker = ticker;
    std::string line;
    if (!std::getline(in, line) || trim(line) != "date,adjusted_close") {
        throw Error(ErrorKind::kSchema, path.string() + ": expected header 'date,adjusted_close'");
    }
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        const std::string where = path.string() + " row " + std::to_string(row);
        if (comma == std::string::npos) throw Error(ErrorKind::kSchema, where + ": expected two columns");
        const std::string date_text = trim(line.substr(0, comma));
        const std::string price_text = trim(line.substr(comma + 1));
        CivilDate date;
        try {
            date = CivilDate::parse(date_text);
        } catch (const Error& e) {
            throw Error(ErrorKind::kSchema, where + ": " + e.what());
        }
        double price = 0.0;
        auto [ptr, ec] = std::from_chars(price_text.data(), price_text.data() + price_text.size(), price);
        if (ec != std::errc() || ptr != price_text.data() + price_text.size()) {
            throw Error(ErrorKind::kSchema, where + ": non-numeric price '" + price_text + "'");
        }
        check_price(price, where);
        raw.dates.push_back(date);
        raw.adj_close.push_back(price);
    }
    return raw;
}

TradingCalendar infer_calendar(const RawPriceFile& index_series) {
    if (index_series.dates.empty()) {
        throw Error(ErrorKind::kValidation, "market index series '" + index_series.ticker + "' is empty");
    }
    std::vector<CivilDate> dates = index_series.dates;
    std::sort(dates.begin(), dates.end());
    auto dup = std::adjacent_find(dates.begin(), dates.end());
    if (dup != dates.end()) {
        throw Error(ErrorKind::kValidation, "duplicate date " + dup->to_string() + " in market index series");
    }
    return TradingCalendar(std::move(dates));
}

PriceSeries align_to_calendar(const RawPriceFile& raw, const TradingCalendar& calendar) {
    std::vector<std::size_t> order(raw.dates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw.dates[a] < raw.dates[b]; });

    PriceSeries series;
    series.ticker = raw.ticker;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        if (k > 0 && raw.dates[order[k - 1]] == raw.dates[i]) {
            throw Error(ErrorKind::kValidation,
                        "duplicate date " + raw.dates[i].to_string() + " in price series " + raw.ticker);
        }
        if (auto day = calendar.index_of(raw.dates[i])) {
            series.days.push_back(*day);
            series.adj_close.push_back(raw.adj_close[i]);
        }
    }
    return series;
}

std::map<std::string, PriceSeries> load_prices(const std::filesystem::path& dir, const TradingCalendar& calendar,
                                               const std::vector<std::string>& tickers) {
    std::map<std::string, PriceSeries> out;
    if (!std::filesystem::is_directory(dir)) throw Error(ErrorKind::kIo, "price directory not found: " + dir.string());
    if (tickers.empty()) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
        }
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const std::string ticker = f.stem().string();
            out.emplace(ticker, align_to_calendar(read_price_csv(f, ticker), calendar));
        }
        return out;
    }
    for (const auto& ticker : tickers) {
        const auto path = dir / (ticker + ".csv");
        if (!std::filesystem::exists(path)) {
            throw Error(ErrorKind::kValidation, "missing price file for ticker " + ticker + " (" + path.string() + ")");
        }
        out.emplace(ticker, align_to_calendar(read_price_csv(path, ticker), calendar));
    }
    return out;
}

std::vector<DatedValue> log_return_series(const PriceSeries& series) {
    if (series.days.size() != series.adj_close.size()) {
        throw Error(ErrorKind::kValidation, "price series " + series.ticker + " has mismatched lengths");
    }
    if (series.days.size() < 2) {
        throw Error(ErrorKind::kInsufficient, "price series " + series.ticker + " needs at least two prices");
    }
    std::vector<DatedValue> out;
    out.reserve(series.days.size() - 1);
    for (std::size_t k = 0; k < series.adj_close.size(); ++k) {
        check_price(series.adj_close[k], series.ticker + " day " + std::to_string(series.days[k]));
        if (k == 0) continue;
        if (series.days[k] <= series.days[k - 1]) {
            throw Error(ErrorKind::kValidation, "price series " + series.ticker + " days not strictly increasing");
        }
        if (series.days[k] == series.days[k - 1] + 1) {
            out.push_back({series.days[k], std::log(series.adj_close[k] / series.adj_close[k - 1])});
        }
    }
    return out;
}

std::vector<double> dense_log_returns(const PriceSeries& series, std::size_t n_days) {
    std::vector<double> out(n_days, kUndefined);
    if (series.days.size() < 2) return out;
    for (const auto& r : log_return_series(series)) {
        if (r.day >= 0 && static_cast<std::size_t>(r.day) < n_days) out[static_cast<std::size_t>(r.day)] = r.value;
    }
    return out;
}

double forward_return(const PriceSeries& series, int t, int m_days) {
    if (m_days < 0) throw Error(ErrorKind::kValidation, "forward horizon must be non-negative");
    const auto start = series.price_at(t);
    if (!start) {
        throw Error(ErrorKind::kOutOfRange, series.ticker + ": no price at start day " + std::to_string(t));
    }
    const auto end = series.price_at(t + m_days);
    if (!end) {
        throw Error(ErrorKind::kOutOfRange, series.ticker + ": no price at end day " + std::to_string(t + m_days));
    }
    return std::log(*end / *start);
}

}  // namespace fq
