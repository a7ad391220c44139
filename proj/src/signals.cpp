#include "forumquant/signals.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "forumquant/errors.hpp"
#include "forumquant/numeric.hpp"

namespace fq {

namespace {

std::vector<double> aligned_counts(const std::vector<Post>& posts, std::size_t n_days) {
    std::vector<double> counts(n_days, 0.0);
    for (const auto& p : posts) {
        if (!p.trading_day) throw Error(ErrorKind::kValidation, "post " + p.id + " is not aligned to a trading day");
        const auto d = static_cast<std::size_t>(*p.trading_day);
        if (d < n_days) counts[d] += 1.0;
    }
    return counts;
}

bool mentions(const Post& p, const std::string& ticker) {
    return std::find(p.tickers.begin(), p.tickers.end(), ticker) != p.tickers.end();
}

// Sums in sorted order so the result does not depend on post order.
double order_free_sum(std::vector<double>& values) {
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
}

}  // namespace

SentimentSeries daily_aggregate(const std::vector<Post>& posts, const std::string& ticker,
                                const TradingCalendar& calendar) {
    const std::size_t n = calendar.size();
    SentimentSeries s;
    s.ticker = ticker;
    s.S.assign(n, 0.0);
    s.n_asset.assign(n, 0.0);
    std::vector<std::vector<double>> scores(n);
    for (const auto& p : posts) {
        if (!mentions(p, ticker)) continue;
        if (!p.trading_day) throw Error(ErrorKind::kValidation, "post " + p.id + " is not aligned to a trading day");
        const auto d = static_cast<std::size_t>(*p.trading_day);
        if (d >= n) continue;
        scores[d].push_back(p.sentiment_score);
        s.n_asset[d] += 1.0;
    }
    for (std::size_t d = 0; d < n; ++d) s.S[d] = order_free_sum(scores[d]);
    return s;
}

std::vector<double> trailing_mean(std::span<const double> counts, std::size_t window) {
    std::vector<double> out(counts.size(), kUndefined);
    if (window == 0) throw Error(ErrorKind::kValidation, "trailing window must be positive");
    for (std::size_t t = window - 1; t < counts.size(); ++t) {
        double sum = 0.0;
        for (std::size_t k = t + 1 - window; k <= t; ++k) sum += counts[k];
        out[t] = sum / static_cast<double>(window);
    }
    return out;
}

std::vector<double> forum_activity(const std::vector<Post>& all_posts, const TradingCalendar& calendar,
                                   ActivityWindow mode) {
    const std::size_t n = calendar.size();
    if (mode == ActivityWindow::kTradingDays) {
        const auto counts = aligned_counts(all_posts, n);
        return trailing_mean(counts, 7);
    }
    std::vector<double> out(n, kUndefined);
    if (n == 0) return out;
    const std::int64_t first = calendar.date(0).days_since_epoch();
    const std::int64_t last = calendar.dates().back().days_since_epoch();
    std::vector<double> per_date(static_cast<std::size_t>(last - first + 1), 0.0);
    for (const auto& p : all_posts) {
        const std::int64_t d = eastern_date_of(p.created_utc).days_since_epoch();
        if (d < first || d > last) continue;
        per_date[static_cast<std::size_t>(d - first)] += 1.0;
    }
    for (std::size_t t = 0; t < n; ++t) {
        const std::int64_t d = calendar.date(t).days_since_epoch();
        if (d - 6 < first) continue;
        double sum = 0.0;
        for (std::int64_t k = d - 6; k <= d; ++k) sum += per_date[static_cast<std::size_t>(k - first)];
        out[t] = sum / 7.0;
    }
    return out;
}

NormalizedSentiment normalized_sentiment_change(std::span<const double> S, std::span<const double> n_forum) {
    if (S.size() != n_forum.size()) throw Error(ErrorKind::kValidation, "S and n_forum must be aligned");
    NormalizedSentiment out;
    out.S_hat.assign(S.size(), kUndefined);
    out.dS_hat.assign(S.size(), kUndefined);
    for (std::size_t t = 0; t < S.size(); ++t) {
        if (is_defined(n_forum[t]) && n_forum[t] > 0.0 && is_defined(S[t])) out.S_hat[t] = S[t] / n_forum[t];
        if (t > 0 && is_defined(out.S_hat[t]) && is_defined(out.S_hat[t - 1])) {
            out.dS_hat[t] = out.S_hat[t] - out.S_hat[t - 1];
        }
    }
    return out;
}

std::vector<double> momentum(std::span<const double> n_asset, std::span<const double> forum_totals) {
    if (n_asset.size() != forum_totals.size()) throw Error(ErrorKind::kValidation, "momentum inputs must be aligned");
    std::vector<double> out(n_asset.size(), kUndefined);
    const auto positive = [](double v) { return is_defined(v) && v > 0.0; };
    for (std::size_t t = 1; t < n_asset.size(); ++t) {
        if (positive(n_asset[t]) && positive(n_asset[t - 1]) && positive(forum_totals[t]) &&
            positive(forum_totals[t - 1])) {
            out[t] = std::log((n_asset[t] / forum_totals[t]) / (n_asset[t - 1] / forum_totals[t - 1]));
        }
    }
    return out;
}

Agreement agreement(std::span<const double> S, std::span<const double> n_asset) {
    if (S.size() != n_asset.size()) throw Error(ErrorKind::kValidation, "agreement inputs must be aligned");
    Agreement out;
    out.S_norm.assign(S.size(), kUndefined);
    out.dS_norm.assign(S.size(), kUndefined);
    for (std::size_t t = 0; t < S.size(); ++t) {
        if (is_defined(n_asset[t]) && n_asset[t] > 0.0) out.S_norm[t] = S[t] / n_asset[t];
        if (t > 0 && is_defined(out.S_norm[t]) && is_defined(out.S_norm[t - 1])) {
            out.dS_norm[t] = out.S_norm[t] - out.S_norm[t - 1];
        }
    }
    return out;
}

SentimentSeries build_sentiment_series(const std::vector<Post>& all_posts, const std::vector<Post>& ticker_posts,
                                       const std::string& ticker, const TradingCalendar& calendar,
                                       ActivityWindow mode) {
    SentimentSeries s = daily_aggregate(ticker_posts, ticker, calendar);
    s.n_forum = forum_activity(all_posts, calendar, mode);
    auto norm = normalized_sentiment_change(s.S, s.n_forum);
    s.S_hat = std::move(norm.S_hat);
    s.dS_hat = std::move(norm.dS_hat);
    auto agree = agreement(s.S, s.n_asset);
    s.S_norm = std::move(agree.S_norm);
    s.dS_norm = std::move(agree.dS_norm);
    s.M = momentum(s.n_asset, aligned_counts(all_posts, calendar.size()));
    return s;
}

std::string period_label(const CivilDate& date, Period period) {
    switch (period) {
        case Period::kDay: return date.to_string();
        case Period::kWeek: return iso_week(date).to_string();
        case Period::kMonth: return YearMonth{date.year, date.month}.to_string();
    }
    return date.to_string();
}

PeriodSignals period_signals(const std::vector<Post>& all_posts, const std::vector<Post>& ticker_posts,
                             const std::string& ticker, const TradingCalendar& calendar, Period period) {
    PeriodSignals out;
    out.ticker = ticker;
    std::vector<std::size_t> period_of_day(calendar.size());
    for (std::size_t d = 0; d < calendar.size(); ++d) {
        const std::string label = period_label(calendar.date(d), period);
        if (out.periods.empty() || out.periods.back() != label) out.periods.push_back(label);
        period_of_day[d] = out.periods.size() - 1;
    }
    const std::size_t P = out.periods.size();
    out.S.assign(P, 0.0);
    out.n_asset.assign(P, 0.0);
    out.forum_total.assign(P, 0.0);
    for (const auto& p : all_posts) {
        if (!p.trading_day) throw Error(ErrorKind::kValidation, "post " + p.id + " is not aligned to a trading day");
        out.forum_total[period_of_day.at(static_cast<std::size_t>(*p.trading_day))] += 1.0;
    }
    std::vector<std::vector<double>> scores(P);
    for (const auto& p : ticker_posts) {
        if (!mentions(p, ticker)) continue;
        if (!p.trading_day) throw Error(ErrorKind::kValidation, "post " + p.id + " is not aligned to a trading day");
        const std::size_t k = period_of_day.at(static_cast<std::size_t>(*p.trading_day));
        scores[k].push_back(p.sentiment_score);
        out.n_asset[k] += 1.0;
    }
    for (std::size_t k = 0; k < P; ++k) out.S[k] = order_free_sum(scores[k]);
    auto agree = agreement(out.S, out.n_asset);
    out.S_norm = std::move(agree.S_norm);
    out.dS_norm = std::move(agree.dS_norm);
    out.M = momentum(out.n_asset, out.forum_total);
    return out;
}

TopicDistribution monthly_topic_distribution(const std::vector<Post>& posts, const YearMonth& month) {
    std::map<int, std::size_t> counts;
    std::size_t total = 0;
    for (const auto& p : posts) {
        if (!p.topic_id) continue;
        const CivilDate d = eastern_date_of(p.created_utc);
        if (YearMonth{d.year, d.month} != month) continue;
        ++counts[*p.topic_id];
        ++total;
    }
    if (total == 0) {
        throw Error(ErrorKind::kInsufficient, "month " + month.to_string() + " has no topic-labelled posts");
    }
    TopicDistribution dist;
    dist.month = month;
    for (const auto& [topic, count] : counts) {
        dist.topic_ids.push_back(topic);
        dist.post_count.push_back(count);
        dist.probs.push_back(static_cast<double>(count) / static_cast<double>(total));
    }
    return dist;
}

double shannon_entropy(std::span<const double> probs) {
    // Extended precision keeps the result within rounding of the true value.
    long double h = 0.0L;
    for (double p : probs) {
        if (p < 0.0) throw Error(ErrorKind::kValidation, "probabilities must be non-negative");
        if (p > 0.0) h -= static_cast<long double>(p) * std::log(static_cast<long double>(p));
    }
    return static_cast<double>(h);
}

double entropy_from_counts(std::span<const std::size_t> counts) {
    // H = ln N - (1/N) sum c ln c, exact for equal counts up to the final rounding.
    long double total = 0.0L, weighted = 0.0L;
    for (auto c : counts) {
        if (c == 0) continue;
        const auto x = static_cast<long double>(c);
        total += x;
        weighted += x * std::log(x);
    }
    if (total == 0.0L) throw Error(ErrorKind::kInsufficient, "entropy of an empty distribution");
    return static_cast<double>(std::log(total) - weighted / total);
}

double shannon_entropy(const TopicDistribution& dist) {
    if (dist.post_count.size() == dist.probs.size() && !dist.post_count.empty()) {
        return entropy_from_counts(dist.post_count);
    }
    return shannon_entropy(std::span<const double>(dist.probs));
}

std::map<YearMonth, double> monthly_entropy(const std::vector<Post>& posts) {
    std::map<YearMonth, std::map<int, std::size_t>> counts;
    for (const auto& p : posts) {
        if (!p.topic_id) continue;
        const CivilDate d = eastern_date_of(p.created_utc);
        ++counts[YearMonth{d.year, d.month}][*p.topic_id];
    }
    std::map<YearMonth, double> out;
    for (const auto& [month, per_topic] : counts) {
        std::vector<std::size_t> c;
        for (const auto& kv : per_topic) c.push_back(kv.second);
        out[month] = entropy_from_counts(c);
    }
    return out;
}

}  // namespace fq
