#include "forumquant/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "forumquant/errors.hpp"
#include "forumquant/numeric.hpp"

namespace fq {

bool is_meme_ticker(std::string_view ticker) {
    return std::find(kMemeTickers.begin(), kMemeTickers.end(), ticker) != kMemeTickers.end();
}

const char* to_string(PortfolioFilter filter) {
    switch (filter) {
        case PortfolioFilter::kAll: return "all_submissions";
        case PortfolioFilter::kFlairedDd: return "flaired_dd";
        case PortfolioFilter::kLabeledDd: return "labeled_dd";
    }
    return "all_submissions";
}

int trade_direction(const Post& post, PortfolioFilter filter) {
    switch (filter) {
        case PortfolioFilter::kAll: return direction_of(post.sentiment_label);
        case PortfolioFilter::kFlairedDd: return post.flaired_dd() ? direction_of(post.sentiment_label) : 0;
        case PortfolioFilter::kLabeledDd: return (post.is_dd && post.dd_label) ? direction_of(*post.dd_label) : 0;
    }
    return 0;
}

namespace {

const Post& require_aligned(const Post& p) {
    if (!p.trading_day) throw Error(ErrorKind::kValidation, "post " + p.id + " is not aligned to a trading day");
    if (p.tickers.size() != 1) {
        throw Error(ErrorKind::kValidation, "post " + p.id + " must mention exactly one ticker");
    }
    return p;
}

std::optional<double> return_on(const PriceSeries& s, int day) {
    const auto now = s.price_at(day);
    const auto before = s.price_at(day - 1);
    if (!now || !before) return std::nullopt;
    return std::log(*now / *before);
}

}  // namespace

PortfolioResult sentiment_portfolio(const std::vector<Post>& posts, const PriceMap& prices, PortfolioFilter filter) {
    PortfolioResult out;
    for (const auto& p : posts) {
        const int dir = trade_direction(p, filter);
        if (dir == 0) continue;
        require_aligned(p);
        auto it = prices.find(p.tickers.front());
        if (it == prices.end()) {
            ++out.dropped;
            continue;
        }
        const int t = *p.trading_day;
        const auto r = return_on(it->second, t + 1);
        if (!r) {
            ++out.dropped;
            continue;
        }
        out.samples.push_back({p.id, p.tickers.front(), t, dir, dir * *r});
    }
    if (out.samples.empty()) {
        throw Error(ErrorKind::kInsufficient,
                    std::string("sentiment portfolio (") + to_string(filter) + ") has no eligible posts");
    }
    std::vector<double> x;
    x.reserve(out.samples.size());
    for (const auto& s : out.samples) x.push_back(s.realized);
    out.stats = summary_stats(x);
    return out;
}

DayChooser own_day_chooser() {
    return [](const Post& post, const std::vector<DatedValue>&, SeededRng&) { return *post.trading_day; };
}

DayChooser random_day_chooser() {
    return [](const Post&, const std::vector<DatedValue>& returns, SeededRng& rng) {
        if (returns.empty()) return -1;
        return returns[rng.below(returns.size())].day;
    };
}

std::vector<double> control_samples(const std::vector<Post>& posts, const PriceMap& prices, const DayChooser& choose,
                                    std::uint64_t seed, std::size_t* dropped) {
    SeededRng rng(seed);
    std::map<std::string, std::vector<DatedValue>> returns;
    std::vector<double> out;
    std::size_t lost = 0;
    for (const auto& p : posts) {
        const int dir = direction_of(p.sentiment_label);
        if (dir == 0) continue;
        require_aligned(p);
        auto it = prices.find(p.tickers.front());
        if (it == prices.end()) {
            ++lost;
            continue;
        }
        auto rit = returns.find(it->first);
        if (rit == returns.end()) rit = returns.emplace(it->first, log_return_series(it->second)).first;
        const int day = choose(p, rit->second, rng);
        const auto r = day >= 0 ? return_on(it->second, day) : std::nullopt;
        if (!r) {
            ++lost;
            continue;
        }
        out.push_back(dir * *r);
    }
    if (dropped != nullptr) *dropped = lost;
    return out;
}

std::vector<double> stock_return_samples(const std::vector<Post>& posts, const PriceMap& prices) {
    std::set<std::string> mentioned;
    for (const auto& p : posts) mentioned.insert(p.tickers.begin(), p.tickers.end());
    std::vector<double> out;
    for (const auto& t : mentioned) {
        auto it = prices.find(t);
        if (it == prices.end()) continue;
        for (const auto& r : log_return_series(it->second)) out.push_back(r.value);
    }
    return out;
}

ControlPortfolios control_portfolios(const std::vector<Post>& posts, const PriceMap& prices, std::uint64_t seed) {
    ControlPortfolios out;
    out.stock_returns = summary_stats(stock_return_samples(posts, prices));
    out.previous = summary_stats(control_samples(posts, prices, own_day_chooser(), seed, &out.previous_dropped));
    out.random = summary_stats(control_samples(posts, prices, random_day_chooser(), seed, &out.random_dropped));
    return out;
}

std::size_t default_cluster_min_posts(ClusterMode mode) {
    return mode == ClusterMode::kTopic ? kTopicClusterMinPosts : kInvestorClusterMinPosts;
}

std::vector<ClusterRow> cluster_portfolio(const AssetGraph& graph, const Clustering& clustering,
                                          const std::vector<Post>& posts, const PriceMap& prices,
                                          std::size_t min_posts) {
    if (clustering.membership.size() != graph.nodes.size()) {
        throw Error(ErrorKind::kValidation, "clustering does not match graph");
    }
    std::map<std::string, int> cluster_of;
    std::map<int, std::vector<std::string>> members;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        cluster_of[graph.nodes[i]] = clustering.membership[i];
        members[clustering.membership[i]].push_back(graph.nodes[i]);
    }
    std::map<int, std::vector<Post>> by_cluster;
    for (const auto& p : posts) {
        if (p.tickers.size() != 1) continue;
        auto it = cluster_of.find(p.tickers.front());
        if (it != cluster_of.end()) by_cluster[it->second].push_back(p);
    }
    std::vector<ClusterRow> rows;
    for (const auto& [c, tickers] : members) {
        ClusterRow row;
        row.cluster = c;
        row.tickers = tickers;
        row.within_correlation = kUndefined;
        auto it = by_cluster.find(c);
        if (it == by_cluster.end()) continue;
        std::vector<double> x;
        for (const auto& p : it->second) {
            const int dir = direction_of(p.sentiment_label);
            if (dir == 0 || !p.trading_day) continue;
            auto pit = prices.find(p.tickers.front());
            if (pit == prices.end()) continue;
            const auto r = return_on(pit->second, *p.trading_day + 1);
            if (r) x.push_back(dir * *r);
        }
        row.n_posts = x.size();
        if (x.size() < std::max<std::size_t>(min_posts, 2)) continue;
        row.stats = summary_stats(x);
        rows.push_back(std::move(row));
    }
    return rows;
}

double within_cluster_correlation(const std::vector<std::string>& tickers, const PriceMap& prices) {
    std::vector<std::map<int, double>> series;
    for (const auto& t : tickers) {
        auto it = prices.find(t);
        if (it == prices.end()) continue;
        std::map<int, double> m;
        for (const auto& r : log_return_series(it->second)) m[r.day] = r.value;
        series.push_back(std::move(m));
    }
    if (series.size() < 2) return kUndefined;
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (std::size_t j = i + 1; j < series.size(); ++j) {
            std::vector<double> a, b;
            for (const auto& [d, v] : series[i]) {
                auto it = series[j].find(d);
                if (it != series[j].end()) {
                    a.push_back(v);
                    b.push_back(it->second);
                }
            }
            if (a.size() < 3) continue;
            const double r = pearson_correlation(a, b);
            if (!is_defined(r)) continue;
            total += r;
            ++pairs;
        }
    }
    return pairs == 0 ? kUndefined : total / static_cast<double>(pairs);
}

std::vector<ClusterRow> cluster_report(const AssetGraph& graph, const Clustering& clustering,
                                       const std::vector<Post>& posts, const PriceMap& prices,
                                       std::size_t min_posts) {
    auto rows = cluster_portfolio(graph, clustering, posts, prices, min_posts);
    for (auto& row : rows) row.within_correlation = within_cluster_correlation(row.tickers, prices);
    return rows;
}

std::map<YearMonth, double> monthly_last_close(const RawPriceFile& series) {
    std::map<YearMonth, std::pair<CivilDate, double>> last;
    for (std::size_t i = 0; i < series.dates.size(); ++i) {
        const YearMonth ym{series.dates[i].year, series.dates[i].month};
        auto it = last.find(ym);
        if (it == last.end() || it->second.first < series.dates[i]) last[ym] = {series.dates[i], series.adj_close[i]};
    }
    std::map<YearMonth, double> out;
    for (const auto& [ym, v] : last) out[ym] = v.second;
    return out;
}

RegressionResult entropy_vix_regression(const std::map<YearMonth, double>& entropy,
                                        const std::map<YearMonth, double>& vix_close) {
    if (entropy.empty()) throw Error(ErrorKind::kInsufficient, "no entropy months");
    std::vector<std::string> gaps;
    std::vector<YearMonth> months;
    const YearMonth first = entropy.begin()->first;
    const YearMonth last = entropy.rbegin()->first;
    for (YearMonth m = first; m <= last; m = m.next()) {
        const bool has_entropy = entropy.count(m) > 0;
        const bool has_vix = vix_close.count(m) > 0;
        const bool has_next = vix_close.count(m.next()) > 0;
        if (!has_entropy) gaps.push_back(m.to_string() + " (entropy)");
        if (!has_vix) gaps.push_back(m.to_string() + " (vix)");
        if (has_entropy && has_vix && !has_next && m != last) gaps.push_back(m.next().to_string() + " (vix)");
        if (has_entropy && has_vix && has_next) months.push_back(m);
    }
    if (!gaps.empty()) {
        std::ostringstream msg;
        msg << "entropy/VIX months misaligned; gaps:";
        for (const auto& g : gaps) msg << ' ' << g;
        throw Error(ErrorKind::kValidation, msg.str());
    }
    if (months.size() < kEntropyVixMinMonths) {
        throw Error(ErrorKind::kInsufficient, "entropy/VIX regression needs at least " +
                                                  std::to_string(kEntropyVixMinMonths) + " aligned months, got " +
                                                  std::to_string(months.size()));
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(months.size()), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(months.size()));
    for (std::size_t i = 0; i < months.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        X(r, 0) = vix_close.at(months[i]);
        X(r, 1) = entropy.at(months[i]);
        y(r) = vix_close.at(months[i].next());
    }
    return ols(X, y, {}, {"Adj Close", "entropy"});
}

std::vector<GrangerRow> granger_suite(const std::vector<Post>& all_posts, const std::vector<Post>& posts,
                                      const PriceMap& prices, const TradingCalendar& calendar,
                                      const std::vector<std::string>& tickers, const GrangerSuiteOptions& options) {
    std::vector<GrangerRow> rows;
    const auto floor_day = calendar.first_on_or_after(options.start_floor);
    for (const auto& ticker : tickers) {
        auto mark_all = [&](const std::string& status, int start, double adf_s, double adf_r) {
            for (int lag : options.lags) {
                GrangerRow row;
                row.ticker = ticker;
                row.lag = lag;
                row.status = status;
                row.start_day = start;
                row.adf_signal_stat = adf_s;
                row.adf_returns_stat = adf_r;
                row.result.lag = lag;
                row.result.wald_stat = kUndefined;
                row.result.p_value = kUndefined;
                rows.push_back(row);
            }
        };
        auto pit = prices.find(ticker);
        std::vector<Post> own;
        int first_mention = -1;
        for (const auto& p : posts) {
            if (std::find(p.tickers.begin(), p.tickers.end(), ticker) == p.tickers.end()) continue;
            if (!p.trading_day) throw Error(ErrorKind::kValidation, "post " + p.id + " is not aligned");
            if (first_mention < 0 || *p.trading_day < first_mention) first_mention = *p.trading_day;
            own.push_back(p);
        }
        if (pit == prices.end() || first_mention < 0) {
            mark_all("insufficient history", 0, kUndefined, kUndefined);
            continue;
        }
        int start = first_mention;
        if (floor_day) {
            start = options.start_rule == StartRule::kLaterOf ? std::max(first_mention, *floor_day)
                                                              : std::min(first_mention, *floor_day);
        }
        const auto series = build_sentiment_series(all_posts, own, ticker, calendar, options.activity);
        const auto returns = dense_log_returns(pit->second, calendar.size());
        const std::span<const double> signal(series.dS_hat.data() + start, series.dS_hat.size() - start);
        const std::span<const double> ret(returns.data() + start, returns.size() - start);

        auto defined = [](std::span<const double> s) {
            std::vector<double> v;
            for (double x : s) {
                if (is_defined(x)) v.push_back(x);
            }
            return v;
        };
        double adf_s = kUndefined, adf_r = kUndefined;
        bool passed = false;
        try {
            const auto a = adf_test(defined(signal));
            const auto b = adf_test(defined(ret));
            adf_s = a.stat;
            adf_r = b.stat;
            passed = a.stationary && b.stationary;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::kInsufficient) {
                mark_all("insufficient history", start, adf_s, adf_r);
                continue;
            }
        }
        if (!passed) {
            mark_all("screen failed", start, adf_s, adf_r);
            continue;
        }
        for (int lag : options.lags) {
            GrangerRow row;
            row.ticker = ticker;
            row.lag = lag;
            row.start_day = start;
            row.adf_signal_stat = adf_s;
            row.adf_returns_stat = adf_r;
            try {
                row.result = granger_test(signal, ret, lag, {options.f_variant});
                row.status = "ok";
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::kInsufficient && e.kind() != ErrorKind::kSingular) throw;
                row.status = e.kind() == ErrorKind::kSingular ? "singular" : "insufficient history";
                row.result.lag = lag;
                row.result.wald_stat = kUndefined;
                row.result.p_value = kUndefined;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

LongTermPanel long_term_signal_panel(const std::vector<Post>& all_posts, const std::vector<Post>& posts,
                                     const PriceMap& prices, const TradingCalendar& calendar, Period period) {
    std::set<std::string> tickers;
    for (const auto& p : posts) tickers.insert(p.tickers.begin(), p.tickers.end());

    struct Row {
        std::int64_t entity;
        std::int64_t time;
        double y_ret, y_vol, M, dS, S, r, vol;
    };
    std::vector<Row> rows;
    std::int64_t entity = 0;
    for (const auto& ticker : tickers) {
        auto pit = prices.find(ticker);
        if (pit == prices.end()) continue;
        const auto sig = period_signals(all_posts, posts, ticker, calendar, period);
        std::map<std::string, std::size_t> index;
        for (std::size_t k = 0; k < sig.periods.size(); ++k) index[sig.periods[k]] = k;
        std::vector<std::vector<double>> daily(sig.periods.size());
        for (const auto& r : log_return_series(pit->second)) {
            daily[index.at(period_label(calendar.date(static_cast<std::size_t>(r.day)), period))].push_back(r.value);
        }
        std::vector<double> pret(daily.size(), kUndefined), pvol(daily.size(), kUndefined);
        for (std::size_t k = 0; k < daily.size(); ++k) {
            if (daily[k].empty()) continue;
            double s = 0.0;
            for (double v : daily[k]) s += v;
            pret[k] = s;
            if (daily[k].size() >= 2) {
                const double mean = s / static_cast<double>(daily[k].size());
                double ss = 0.0;
                for (double v : daily[k]) ss += (v - mean) * (v - mean);
                pvol[k] = std::sqrt(ss / static_cast<double>(daily[k].size() - 1));
            }
        }
        for (std::size_t k = 0; k + 1 < daily.size(); ++k) {
            const double vals[] = {pret[k + 1], pvol[k + 1], sig.M[k], sig.dS_norm[k], sig.S_norm[k], pret[k], pvol[k]};
            if (!std::all_of(std::begin(vals), std::end(vals), [](double v) { return is_defined(v); })) continue;
            rows.push_back({entity, static_cast<std::int64_t>(k), vals[0], vals[1], vals[2], vals[3], vals[4], vals[5],
                            vals[6]});
        }
        ++entity;
    }
    LongTermPanel out;
    const std::vector<std::string> names{"M", "dS_norm", "S_norm", "r", "sigma"};
    const auto n = static_cast<Eigen::Index>(rows.size());
    for (PanelData* d : {&out.returns_panel, &out.volatility_panel}) {
        d->names = names;
        d->X.resize(n, 5);
        d->y.resize(n);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const Row& r = rows[static_cast<std::size_t>(i)];
        for (PanelData* d : {&out.returns_panel, &out.volatility_panel}) {
            d->entity.push_back(r.entity);
            d->time.push_back(r.time);
            d->X.row(i) << r.M, r.dS, r.S, r.r, r.vol;
        }
        out.returns_panel.y(i) = r.y_ret;
        out.volatility_panel.y(i) = r.y_vol;
    }
    out.returns_model = panel_fe(out.returns_panel);
    out.volatility_model = panel_fe(out.volatility_panel);
    return out;
}

}  // namespace fq
