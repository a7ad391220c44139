#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "forumquant/corpus.hpp"

namespace fq {

struct CapmOptions {
    int window = 180;   // trading days
    int min_obs = 60;
};

// Daily CAPM estimates on the calendar. The fit used for day t comes from
// the window ending at t-1; `residual` is the abnormal return on day t.
struct CapmFit {
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> residual;
    std::vector<int> window_len;  // overlapping observations used (0 when undefined)

    std::size_t size() const { return residual.size(); }
};

CapmFit fit_capm_rolling(std::span<const double> asset_returns, std::span<const double> market_returns,
                         const CapmOptions& options = {});

inline constexpr int kCarTerms = 7;

// CAR_t = sum of the residuals t-6 .. t; undefined if any term is.
std::vector<double> car7(const CapmFit& fit);
std::vector<double> car7(std::span<const double> residuals);

enum class SentimentGroup { kBullish, kBearish, kNeutral, kAll };
const char* to_string(SentimentGroup g);

struct CarProfile {
    SentimentGroup group = SentimentGroup::kAll;
    int half_width = 14;
    std::vector<int> offsets;         // -half_width .. +half_width
    std::vector<double> mean_car;
    std::vector<double> median_car;
    std::size_t post_count = 0;
};

struct PostCar {
    int day = 0;  // aligned trading day
    Sentiment label = Sentiment::kNeutral;
    const std::vector<double>* car = nullptr;  // the post's ticker CAR series
};

// Profiles per sentiment group plus the pooled group; posts whose window
// has any undefined CAR value are dropped, empty groups omitted.
std::vector<CarProfile> car_profile(const std::vector<PostCar>& posts, int half_width = 14);

// Convenience for a single ticker.
std::vector<CarProfile> car_profile(const std::vector<Post>& posts_of_ticker, const std::vector<double>& car,
                                    int half_width = 14);

inline constexpr std::size_t kProactiveMinHistory = 30;

struct ProactiveOptions {
    double alpha = 0.05;
    std::size_t history = 180;  // trailing defined CAR values used as reference
};

// Prediction t-test of CAR(t) against the trailing CAR history (values
// strictly before t): t = (x - mean) / (sd * sqrt(1 + 1/n)) on n - 1 df.
// True (proactive) when the test does not reject at `alpha`.
bool proactive_flag(std::span<const double> car, int t, const ProactiveOptions& options = {});

}  // namespace fq
