#include "forumquant/eventstudy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "forumquant/distributions.hpp"
#include "forumquant/errors.hpp"
#include "forumquant/numeric.hpp"

namespace fq {

CapmFit fit_capm_rolling(std::span<const double> asset_returns, std::span<const double> market_returns,
                         const CapmOptions& options) {
    if (asset_returns.size() != market_returns.size()) {
        throw Error(ErrorKind::kValidation, "asset and market returns must share a calendar");
    }
    if (options.window < 2 || options.min_obs < 2 || options.min_obs > options.window) {
        throw Error(ErrorKind::kValidation, "CAPM window must satisfy 2 <= min_obs <= window");
    }
    const std::size_t n = asset_returns.size();
    CapmFit fit;
    fit.alpha.assign(n, kUndefined);
    fit.beta.assign(n, kUndefined);
    fit.residual.assign(n, kUndefined);
    fit.window_len.assign(n, 0);

    const auto W = static_cast<std::size_t>(options.window);
    std::vector<std::size_t> idx;
    idx.reserve(W);
    for (std::size_t t = 1; t < n; ++t) {
        if (!is_defined(asset_returns[t]) || !is_defined(market_returns[t])) continue;
        const std::size_t lo = t >= W ? t - W : 0;
        idx.clear();
        for (std::size_t s = lo; s < t; ++s) {
            if (is_defined(asset_returns[s]) && is_defined(market_returns[s])) idx.push_back(s);
        }
        if (idx.size() < static_cast<std::size_t>(options.min_obs)) continue;
        const double m = static_cast<double>(idx.size());
        double mx = 0.0, my = 0.0;
        bool constant_market = true;
        for (auto s : idx) {
            constant_market = constant_market && market_returns[s] == market_returns[idx.front()];
            mx += market_returns[s];
            my += asset_returns[s];
        }
        mx /= m;
        my /= m;
        double sxx = 0.0, sxy = 0.0;
        for (auto s : idx) {
            const double dx = market_returns[s] - mx;
            sxx += dx * dx;
            sxy += dx * (asset_returns[s] - my);
        }
        if (constant_market || !(sxx > 0.0)) continue;
        const double beta = sxy / sxx;
        const double alpha = my - beta * mx;
        fit.alpha[t] = alpha;
        fit.beta[t] = beta;
        fit.residual[t] = asset_returns[t] - alpha - beta * market_returns[t];
        fit.window_len[t] = static_cast<int>(idx.size());
    }
    return fit;
}

std::vector<double> car7(std::span<const double> residuals) {
    std::vector<double> out(residuals.size(), kUndefined);
    for (std::size_t t = kCarTerms - 1; t < residuals.size(); ++t) {
        double sum = 0.0;
        bool ok = true;
        for (std::size_t k = t + 1 - kCarTerms; k <= t; ++k) {
            if (!is_defined(residuals[k])) {
                ok = false;
                break;
            }
            sum += residuals[k];
        }
        if (ok) out[t] = sum;
    }
    return out;
}

std::vector<double> car7(const CapmFit& fit) { return car7(std::span<const double>(fit.residual)); }

const char* to_string(SentimentGroup g) {
    switch (g) {
        case SentimentGroup::kBullish: return "bullish";
        case SentimentGroup::kBearish: return "bearish";
        case SentimentGroup::kNeutral: return "neutral";
        case SentimentGroup::kAll: return "all";
    }
    return "all";
}

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SentimentGroup group_of(Sentiment s) {
    switch (s) {
        case Sentiment::kBullish: return SentimentGroup::kBullish;
        case Sentiment::kBearish: return SentimentGroup::kBearish;
        case Sentiment::kNeutral: return SentimentGroup::kNeutral;
    }
    return SentimentGroup::kNeutral;
}

}  // namespace

std::vector<CarProfile> car_profile(const std::vector<PostCar>& posts, int half_width) {
    if (half_width < 0) throw Error(ErrorKind::kValidation, "half width must be non-negative");
    const std::size_t width = static_cast<std::size_t>(2 * half_width + 1);
    // windows[group] -> list of CAR windows
    std::map<SentimentGroup, std::vector<std::vector<double>>> windows;
    for (const auto& pc : posts) {
        if (pc.car == nullptr) continue;
        const auto& car = *pc.car;
        const long lo = static_cast<long>(pc.day) - half_width;
        const long hi = static_cast<long>(pc.day) + half_width;
        if (lo < 0 || hi >= static_cast<long>(car.size())) continue;
        std::vector<double> w(width);
        bool ok = true;
        for (std::size_t k = 0; k < width && ok; ++k) {
            w[k] = car[static_cast<std::size_t>(lo) + k];
            ok = is_defined(w[k]);
        }
        if (!ok) continue;
        windows[group_of(pc.label)].push_back(w);
        windows[SentimentGroup::kAll].push_back(std::move(w));
    }

    std::vector<CarProfile> out;
    for (auto g : {SentimentGroup::kBullish, SentimentGroup::kBearish, SentimentGroup::kNeutral, SentimentGroup::kAll}) {
        auto it = windows.find(g);
        if (it == windows.end() || it->second.empty()) continue;
        const auto& ws = it->second;
        CarProfile prof;
        prof.group = g;
        prof.half_width = half_width;
        prof.post_count = ws.size();
        for (std::size_t k = 0; k < width; ++k) {
            std::vector<double> column;
            column.reserve(ws.size());
            double sum = 0.0;
            for (const auto& w : ws) {
                column.push_back(w[k]);
                sum += w[k];
            }
            prof.offsets.push_back(static_cast<int>(k) - half_width);
            prof.mean_car.push_back(sum / static_cast<double>(ws.size()));
            prof.median_car.push_back(median_of(std::move(column)));
        }
        out.push_back(std::move(prof));
    }
    return out;
}

std::vector<CarProfile> car_profile(const std::vector<Post>& posts_of_ticker, const std::vector<double>& car,
                                    int half_width) {
    std::vector<PostCar> items;
    items.reserve(posts_of_ticker.size());
    for (const auto& p : posts_of_ticker) {
        if (!p.trading_day) throw Error(ErrorKind::kValidation, "post " + p.id + " is not aligned to a trading day");
        items.push_back({*p.trading_day, p.sentiment_label, &car});
    }
    return car_profile(items, half_width);
}

bool proactive_flag(std::span<const double> car, int t, const ProactiveOptions& options) {
    if (t < 0 || static_cast<std::size_t>(t) >= car.size() || !is_defined(car[static_cast<std::size_t>(t)])) {
        throw Error(ErrorKind::kOutOfRange, "CAR undefined at day " + std::to_string(t));
    }
    std::vector<double> history;
    for (long s = t - 1; s >= 0 && history.size() < options.history; --s) {
        if (is_defined(car[static_cast<std::size_t>(s)])) history.push_back(car[static_cast<std::size_t>(s)]);
    }
    if (history.size() < kProactiveMinHistory) {
        throw Error(ErrorKind::kInsufficient, "proactive test needs at least 30 prior CAR values, found " +
                                                  std::to_string(history.size()));
    }
    const double n = static_cast<double>(history.size());
    double mean = 0.0;
    for (double v : history) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : history) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const double x = car[static_cast<std::size_t>(t)];
    if (!(sd > 0.0)) return x == mean;
    const double t_stat = (x - mean) / (sd * std::sqrt(1.0 + 1.0 / n));
    return two_sided_t_pvalue(t_stat, n - 1.0) >= options.alpha;
}

}  // namespace fq
