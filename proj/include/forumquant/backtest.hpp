#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "forumquant/civil_time.hpp"
#include "forumquant/corpus.hpp"
#include "forumquant/econometrics.hpp"
#include "forumquant/marketdata.hpp"
#include "forumquant/networks.hpp"
#include "forumquant/rng.hpp"
#include "forumquant/signals.hpp"

namespace fq {

inline constexpr std::array<std::string_view, 4> kMemeTickers{"GME", "AMC", "BB", "NOK"};
bool is_meme_ticker(std::string_view ticker);

using PriceMap = std::map<std::string, PriceSeries>;

struct TradeSample {
    std::string post_id;
    std::string ticker;
    int day = 0;
    int direction = 0;  // +1 bullish, -1 bearish
    double realized = 0.0;
};

enum class PortfolioFilter { kAll, kFlairedDd, kLabeledDd };
const char* to_string(PortfolioFilter filter);

struct PortfolioResult {
    std::vector<TradeSample> samples;
    SummaryStats stats;
    std::size_t dropped = 0;  // eligible posts without a next-day return
};

// +1 / -1 for the post under `filter`, 0 when it does not trade.
int trade_direction(const Post& post, PortfolioFilter filter);

// One sample per trading post: direction x ln(p_{t+1} / p_t) with t the
// post's aligned trading day. Throws kInsufficient without eligible samples.
PortfolioResult sentiment_portfolio(const std::vector<Post>& posts, const PriceMap& prices,
                                    PortfolioFilter filter = PortfolioFilter::kAll);

// Picks the day whose return a control sample uses; `returns` is the
// ticker's return series. Returning a negative day drops the sample.
using DayChooser = std::function<int(const Post& post, const std::vector<DatedValue>& returns, SeededRng& rng)>;

// direction x r_d for the chosen day d of every trading post.
std::vector<double> control_samples(const std::vector<Post>& posts, const PriceMap& prices, const DayChooser& choose,
                                    std::uint64_t seed, std::size_t* dropped = nullptr);
// Chooser for the Previous control: the post's own trading day.
DayChooser own_day_chooser();
// Chooser for the Random control: a uniform draw among the ticker's return days.
DayChooser random_day_chooser();

struct ControlPortfolios {
    SummaryStats stock_returns;
    SummaryStats previous;
    SummaryStats random;
    std::size_t previous_dropped = 0;
    std::size_t random_dropped = 0;
};

ControlPortfolios control_portfolios(const std::vector<Post>& posts, const PriceMap& prices, std::uint64_t seed);

// Every daily log return of every ticker mentioned by the posts.
std::vector<double> stock_return_samples(const std::vector<Post>& posts, const PriceMap& prices);

enum class ClusterMode { kTopic, kInvestor };
inline constexpr std::size_t kTopicClusterMinPosts = 1000;
inline constexpr std::size_t kInvestorClusterMinPosts = 100;
std::size_t default_cluster_min_posts(ClusterMode mode);

struct ClusterRow {
    int cluster = 0;
    std::vector<std::string> tickers;
    SummaryStats stats;
    std::size_t n_posts = 0;            // trade samples in the cluster
    double within_correlation = 0.0;    // NaN unless computed and defined
};

// Sentiment portfolio per community; clusters with fewer than `min_posts`
// samples are omitted.
std::vector<ClusterRow> cluster_portfolio(const AssetGraph& graph, const Clustering& clustering,
                                          const std::vector<Post>& posts, const PriceMap& prices,
                                          std::size_t min_posts);

// cluster_portfolio plus the mean pairwise return correlation of member
// tickers, each pair over the days where both returns exist.
std::vector<ClusterRow> cluster_report(const AssetGraph& graph, const Clustering& clustering,
                                       const std::vector<Post>& posts, const PriceMap& prices,
                                       std::size_t min_posts);

double within_cluster_correlation(const std::vector<std::string>& tickers, const PriceMap& prices);

// Last close of each calendar month.
std::map<YearMonth, double> monthly_last_close(const RawPriceFile& series);

inline constexpr std::size_t kEntropyVixMinMonths = 24;

// OLS of VIX_{m+1} on VIX_m ("Adj Close") and entropy_m with intercept.
RegressionResult entropy_vix_regression(const std::map<YearMonth, double>& entropy,
                                        const std::map<YearMonth, double>& vix_close);

enum class StartRule { kLaterOf, kEarlierOf };

struct GrangerSuiteOptions {
    std::vector<int> lags{1, 2, 5, 10};
    StartRule start_rule = StartRule::kLaterOf;
    CivilDate start_floor{2016, 1, 1};
    ActivityWindow activity = ActivityWindow::kCalendarDays;
    bool f_variant = false;
};

struct GrangerRow {
    std::string ticker;
    int lag = 0;
    std::string status;  // "ok", "screen failed", "insufficient history"
    GrangerResult result;
    double adf_signal_stat = 0.0;
    double adf_returns_stat = 0.0;
    int start_day = 0;
};

// Does the normalised sentiment change lead daily returns? Both series
// must pass the ADF screen from the start day on.
std::vector<GrangerRow> granger_suite(const std::vector<Post>& all_posts, const std::vector<Post>& posts,
                                      const PriceMap& prices, const TradingCalendar& calendar,
                                      const std::vector<std::string>& tickers, const GrangerSuiteOptions& options = {});

// Period returns and next-period returns/volatility regressed on attention
// momentum, agreement and its change, with period fixed effects.
struct LongTermPanel {
    PanelData returns_panel;
    PanelData volatility_panel;
    RegressionResult returns_model;
    RegressionResult volatility_model;
};

LongTermPanel long_term_signal_panel(const std::vector<Post>& all_posts, const std::vector<Post>& posts,
                                     const PriceMap& prices, const TradingCalendar& calendar, Period period);

}  // namespace fq
