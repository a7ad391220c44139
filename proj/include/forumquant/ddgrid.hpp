#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "forumquant/backtest.hpp"
#include "forumquant/corpus.hpp"
#include "forumquant/econometrics.hpp"
#include "forumquant/marketdata.hpp"

namespace fq {

enum class DdFeature { kNone, kNumComments, kWordCount, kMaxDepth, kUrl, kProactive };
enum class TimeFilter { kAll, kPre2021, kPost2021 };

const char* to_string(DdFeature f);
const char* to_string(TimeFilter f);

inline constexpr int kDdMaxHorizonWeeks = 26;

struct DdGridConfig {
    std::size_t index = 0;
    Sentiment side = Sentiment::kBullish;  // bullish or bearish
    int horizon_weeks = 1;
    DdFeature feature = DdFeature::kNone;
    bool flaired_only = false;
    bool exclude_memes = false;
    TimeFilter time_filter = TimeFilter::kAll;
};

// side x horizon x feature x flaired x memes x time, in that nesting order.
std::vector<DdGridConfig> enumerate_dd_grid();

struct DdGridInputs {
    std::vector<Post> dd_posts;  // annotated DD posts with one ticker and dd_label
    PriceMap prices;             // panel tickers (the market index excluded)
    TradingCalendar calendar;
    std::map<std::string, std::vector<double>> car;  // CAR per ticker on the calendar
};

struct DdGridResult {
    DdGridConfig config;
    std::string status;  // "ok", "empty", "singular"
    std::size_t panel_rows = 0;
    std::size_t post_rows = 0;  // rows with at least one qualifying post
    RegressionResult fit;
    // Reported sentiment effect; sign flipped for bearish models.
    double sentiment_coef = 0.0;
    double sentiment_t = 0.0;
    double sentiment_p = 0.0;
    double feature_coef = 0.0;
    double feature_t = 0.0;
    double feature_p = 0.0;
};

// Comparison day: first session closing at or after created_utc + 24h.
int dd_comparison_day(const Post& post, const TradingCalendar& calendar);

// Panel for one configuration (exposed for testing).
PanelData build_dd_panel(const DdGridInputs& inputs, const DdGridConfig& config, std::size_t* post_rows = nullptr);

DdGridResult fit_dd_config(const DdGridInputs& inputs, const DdGridConfig& config);

// Every configuration, fitted on up to `threads` workers; results are in
// configuration order.
std::vector<DdGridResult> dd_model_grid(const DdGridInputs& inputs, const std::vector<DdGridConfig>& configs,
                                        unsigned threads = 1);

}  // namespace fq
