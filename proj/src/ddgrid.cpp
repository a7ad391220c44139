#include "forumquant/ddgrid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "forumquant/errors.hpp"
#include "forumquant/eventstudy.hpp"
#include "forumquant/numeric.hpp"

namespace fq {

const char* to_string(DdFeature f) {
    switch (f) {
        case DdFeature::kNone: return "none";
        case DdFeature::kNumComments: return "num_comments";
        case DdFeature::kWordCount: return "word_count";
        case DdFeature::kMaxDepth: return "max_depth";
        case DdFeature::kUrl: return "url";
        case DdFeature::kProactive: return "proactive";
    }
    return "none";
}

const char* to_string(TimeFilter f) {
    switch (f) {
        case TimeFilter::kAll: return "all";
        case TimeFilter::kPre2021: return "pre2021";
        case TimeFilter::kPost2021: return "post2021";
    }
    return "all";
}

std::vector<DdGridConfig> enumerate_dd_grid() {
    constexpr DdFeature features[] = {DdFeature::kNone,   DdFeature::kNumComments, DdFeature::kWordCount,
                                      DdFeature::kMaxDepth, DdFeature::kUrl,       DdFeature::kProactive};
    constexpr TimeFilter times[] = {TimeFilter::kAll, TimeFilter::kPre2021, TimeFilter::kPost2021};
    std::vector<DdGridConfig> out;
    for (Sentiment side : {Sentiment::kBullish, Sentiment::kBearish}) {
        for (int h = 1; h <= kDdMaxHorizonWeeks; ++h) {
            for (DdFeature f : features) {
                for (bool flaired : {false, true}) {
                    for (bool memes : {false, true}) {
                        for (TimeFilter tf : times) {
                            out.push_back({out.size(), side, h, f, flaired, memes, tf});
                        }
                    }
                }
            }
        }
    }
    return out;
}

int dd_comparison_day(const Post& post, const TradingCalendar& calendar) {
    return align_to_trading_day(post.created_utc + kDdCommentWindowSeconds, calendar);
}

namespace {

bool in_time_filter(const CivilDate& date, TimeFilter f) {
    static const CivilDate cut{2021, 1, 1};
    switch (f) {
        case TimeFilter::kAll: return true;
        case TimeFilter::kPre2021: return date < cut;
        case TimeFilter::kPost2021: return !(date < cut);
    }
    return true;
}

std::optional<int> safe_day(const Post& p, const TradingCalendar& cal, bool comparison) {
    try {
        return comparison ? dd_comparison_day(p, cal) : align_to_trading_day(p.created_utc, cal);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::kOutOfRange) return std::nullopt;
        throw;
    }
}

double feature_value(const Post& p, DdFeature f, const std::vector<double>* car, const TradingCalendar& cal) {
    switch (f) {
        case DdFeature::kNone: return 0.0;
        case DdFeature::kNumComments: return p.num_comments;
        case DdFeature::kWordCount: return p.word_count;
        case DdFeature::kMaxDepth: return p.normalized_depth;
        case DdFeature::kUrl: return p.contains_url ? 1.0 : 0.0;
        case DdFeature::kProactive: {
            if (car == nullptr) return 0.0;
            const auto day = safe_day(p, cal, false);
            if (!day) return 0.0;
            try {
                return proactive_flag(*car, *day) ? 1.0 : 0.0;
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::kOutOfRange || e.kind() == ErrorKind::kInsufficient) return 0.0;
                throw;
            }
        }
    }
    return 0.0;
}

struct Cell {
    double count = 0.0;
    double feature = 0.0;
};

}  // namespace

PanelData build_dd_panel(const DdGridInputs& in, const DdGridConfig& config, std::size_t* post_rows) {
    const auto& cal = in.calendar;
    int lo = -1, hi = -1;
    for (const auto& p : in.dd_posts) {
        const auto c = safe_day(p, cal, true);
        if (!c) continue;
        lo = lo < 0 ? *c : std::min(lo, *c);
        hi = std::max(hi, *c);
    }

    std::map<std::pair<std::string, int>, Cell> cells;
    for (const auto& p : in.dd_posts) {
        if (p.tickers.size() != 1 || !p.dd_label || *p.dd_label != config.side) continue;
        if (config.flaired_only && !p.flaired_dd()) continue;
        const std::string& ticker = p.tickers.front();
        if (config.exclude_memes && is_meme_ticker(ticker)) continue;
        if (!in.prices.count(ticker)) continue;
        const auto c = safe_day(p, cal, true);
        if (!c || !in_time_filter(cal.date(static_cast<std::size_t>(*c)), config.time_filter)) continue;
        auto cit = in.car.find(ticker);
        Cell& cell = cells[{ticker, *c}];
        cell.count += 1.0;
        cell.feature += feature_value(p, config.feature, cit == in.car.end() ? nullptr : &cit->second, cal);
    }

    const bool with_feature = config.feature != DdFeature::kNone;
    const bool logged = config.feature == DdFeature::kNumComments || config.feature == DdFeature::kWordCount;
    const int m_days = weeks_to_trading_days(config.horizon_weeks);

    std::vector<std::int64_t> entity, time;
    std::vector<double> ys;
    std::vector<std::array<double, 4>> xs;
    std::size_t with_posts = 0;
    std::int64_t e = 0;
    for (const auto& [ticker, series] : in.prices) {
        const std::int64_t id = e++;
        if (config.exclude_memes && is_meme_ticker(ticker)) continue;
        auto cit = in.car.find(ticker);
        if (lo < 0) break;
        for (int t = lo; t <= hi; ++t) {
            if (!in_time_filter(cal.date(static_cast<std::size_t>(t)), config.time_filter)) continue;
            const auto p0 = series.price_at(t);
            const auto pm = series.price_at(t + m_days);
            const auto pp = series.price_at(t - 1);
            if (!p0 || !pm || !pp) continue;
            const double car = (cit != in.car.end() && static_cast<std::size_t>(t) < cit->second.size())
                                   ? cit->second[static_cast<std::size_t>(t)]
                                   : kUndefined;
            if (!is_defined(car)) continue;
            Cell cell;
            if (auto it = cells.find({ticker, t}); it != cells.end()) cell = it->second;
            double x = cell.feature;
            if (logged) x = cell.count > 0.0 ? std::log(std::max(cell.feature, 1.0)) : 0.0;
            entity.push_back(id);
            time.push_back(t);
            ys.push_back(std::log(*pm / *p0));
            xs.push_back({cell.count, x, car, std::log(*p0 / *pp)});
            if (cell.count > 0.0) ++with_posts;
        }
    }

    PanelData d;
    d.entity = std::move(entity);
    d.time = std::move(time);
    const auto n = static_cast<Eigen::Index>(ys.size());
    d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);
    d.names = {"sentiment"};
    if (with_feature) d.names.push_back(to_string(config.feature));
    d.names.push_back("car");
    d.names.push_back("r_prev");
    d.X.resize(n, static_cast<Eigen::Index>(d.names.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = xs[static_cast<std::size_t>(i)];
        Eigen::Index c = 0;
        d.X(i, c++) = r[0];
        if (with_feature) d.X(i, c++) = r[1];
        d.X(i, c++) = r[2];
        d.X(i, c++) = r[3];
    }
    if (post_rows != nullptr) *post_rows = with_posts;
    return d;
}

DdGridResult fit_dd_config(const DdGridInputs& inputs, const DdGridConfig& config) {
    DdGridResult out;
    out.config = config;
    const PanelData panel = build_dd_panel(inputs, config, &out.post_rows);
    out.panel_rows = static_cast<std::size_t>(panel.y.size());
    out.sentiment_coef = out.sentiment_t = out.sentiment_p = kUndefined;
    out.feature_coef = out.feature_t = out.feature_p = kUndefined;
    if (out.post_rows == 0) {
        out.status = "empty";
        return out;
    }
    try {
        out.fit = panel_fe(panel);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::kSingular && e.kind() != ErrorKind::kInsufficient) throw;
        out.status = e.kind() == ErrorKind::kSingular ? "singular" : "insufficient";
        return out;
    }
    out.status = "ok";
    const double sign = config.side == Sentiment::kBearish ? -1.0 : 1.0;
    out.sentiment_coef = sign * out.fit.coefficients[0];
    out.sentiment_t = sign * out.fit.t_stats[0];
    out.sentiment_p = out.fit.p_values[0];
    if (config.feature != DdFeature::kNone) {
        out.feature_coef = out.fit.coefficients[1];
        out.feature_t = out.fit.t_stats[1];
        out.feature_p = out.fit.p_values[1];
    }
    return out;
}

std::vector<DdGridResult> dd_model_grid(const DdGridInputs& inputs, const std::vector<DdGridConfig>& configs,
                                        unsigned threads) {
    std::vector<DdGridResult> results(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                results[i] = fit_dd_config(inputs, configs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

}  // namespace fq
