#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "forumquant/civil_time.hpp"
#include "forumquant/corpus.hpp"
#include "forumquant/marketdata.hpp"

namespace fq {

// Per-ticker daily sentiment and attention series on the trading calendar.
// Undefined cells are NaN.
struct SentimentSeries {
    std::string ticker;
    std::vector<double> S;        // net sentiment sum
    std::vector<double> n_asset;  // post count for the ticker
    std::vector<double> n_forum;  // trailing 7-day mean of forum post counts
    std::vector<double> S_hat;    // S / n_forum
    std::vector<double> dS_hat;   // S_hat_t - S_hat_{t-1}
    std::vector<double> S_norm;   // S / n_asset
    std::vector<double> dS_norm;  // S_norm_t - S_norm_{t-1}
    std::vector<double> M;        // log ratio of attention share between consecutive days

    std::size_t size() const { return S.size(); }
};

enum class ActivityWindow { kCalendarDays, kTradingDays };

// Fills S and n_asset. Posts must be aligned to trading days.
SentimentSeries daily_aggregate(const std::vector<Post>& posts, const std::string& ticker,
                                const TradingCalendar& calendar);

// Trailing `window`-point mean, inclusive of the current point; the first
// window-1 points are undefined.
std::vector<double> trailing_mean(std::span<const double> counts, std::size_t window = 7);

// n_t on each trading day. Calendar mode buckets every forum post by its
// US/Eastern civil date and averages the 7 calendar dates ending on the
// session date; trading mode averages aligned counts over 7 sessions.
std::vector<double> forum_activity(const std::vector<Post>& all_posts, const TradingCalendar& calendar,
                                   ActivityWindow mode = ActivityWindow::kCalendarDays);

struct NormalizedSentiment {
    std::vector<double> S_hat;
    std::vector<double> dS_hat;
};
NormalizedSentiment normalized_sentiment_change(std::span<const double> S, std::span<const double> n_forum);

// M_t = ln((n_t / N_t) / (n_{t-1} / N_{t-1})), undefined unless all four counts are positive.
std::vector<double> momentum(std::span<const double> n_asset, std::span<const double> forum_totals);

struct Agreement {
    std::vector<double> S_norm;
    std::vector<double> dS_norm;
};
Agreement agreement(std::span<const double> S, std::span<const double> n_asset);

// Complete daily series for one ticker. `all_posts` feeds forum activity
// (every post on the forum), `ticker_posts` the ticker aggregates.
SentimentSeries build_sentiment_series(const std::vector<Post>& all_posts, const std::vector<Post>& ticker_posts,
                                       const std::string& ticker, const TradingCalendar& calendar,
                                       ActivityWindow mode = ActivityWindow::kCalendarDays);

enum class Period { kDay, kWeek, kMonth };

// Sortable label for the period containing a date ("2021-03-15",
// "2021-W11", "2021-03").
std::string period_label(const CivilDate& date, Period period);

// Signals aggregated over ISO weeks or calendar months. Periods are the
// consecutive labels spanned by the trading calendar.
struct PeriodSignals {
    std::string ticker;
    std::vector<std::string> periods;
    std::vector<double> S;
    std::vector<double> n_asset;
    std::vector<double> forum_total;
    std::vector<double> S_norm;
    std::vector<double> dS_norm;
    std::vector<double> M;
};

PeriodSignals period_signals(const std::vector<Post>& all_posts, const std::vector<Post>& ticker_posts,
                             const std::string& ticker, const TradingCalendar& calendar, Period period);

struct TopicDistribution {
    YearMonth month;
    std::vector<int> topic_ids;     // ascending
    std::vector<double> probs;      // aligned with topic_ids
    std::vector<std::size_t> post_count;
};

// Share of topic-labelled posts per topic in the month (US/Eastern dates).
TopicDistribution monthly_topic_distribution(const std::vector<Post>& posts, const YearMonth& month);

// -sum p ln p in nats, with 0 ln 0 = 0.
double shannon_entropy(const TopicDistribution& dist);
double shannon_entropy(std::span<const double> probs);
// Same quantity from raw counts: ln N - (1/N) sum c ln c.
double entropy_from_counts(std::span<const std::size_t> counts);

// Entropy for every month that has topic-labelled posts.
std::map<YearMonth, double> monthly_entropy(const std::vector<Post>& posts);

}  // namespace fq
