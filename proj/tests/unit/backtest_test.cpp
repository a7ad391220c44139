#include <gtest/gtest.h>

#include <cmath>

#include "forumquant/backtest.hpp"
#include "forumquant/civil_time.hpp"
#include "forumquant/errors.hpp"
#include "forumquant/numeric.hpp"
#include "forumquant/rng.hpp"
#include "forumquant/signals.hpp"

using namespace fq;

namespace {

PriceSeries priced(const std::string& ticker, std::vector<double> p, int first_day = 0) {
    PriceSeries s;
    s.ticker = ticker;
    for (std::size_t i = 0; i < p.size(); ++i) s.days.push_back(first_day + static_cast<int>(i));
    s.adj_close = std::move(p);
    return s;
}

Post trade(const std::string& id, const std::string& ticker, int day, Sentiment label) {
    Post p;
    p.id = id;
    p.tickers = {ticker};
    p.trading_day = day;
    p.sentiment_label = label;
    p.sentiment_score = label == Sentiment::kBullish ? 0.5 : (label == Sentiment::kBearish ? -0.5 : 0.0);
    return p;
}

PriceMap hand_prices() {
    PriceMap m;
    m["A"] = priced("A", {100, 110, 99, 99, 120});
    m["B"] = priced("B", {50, 50, 25, 50, 50});
    return m;
}

std::vector<Post> hand_posts() {
    return {trade("1", "A", 0, Sentiment::kBullish), trade("2", "A", 1, Sentiment::kBearish),
            trade("3", "B", 1, Sentiment::kBullish), trade("4", "B", 2, Sentiment::kBearish),
            trade("5", "A", 3, Sentiment::kNeutral), trade("6", "B", 4, Sentiment::kBullish)};
}

std::vector<Post> flipped(std::vector<Post> posts) {
    for (auto& p : posts) {
        if (p.sentiment_label == Sentiment::kBullish) p.sentiment_label = Sentiment::kBearish;
        else if (p.sentiment_label == Sentiment::kBearish) p.sentiment_label = Sentiment::kBullish;
    }
    return posts;
}

std::pair<PriceMap, std::vector<Post>> random_market(std::uint64_t seed, std::size_t n_posts) {
    SeededRng rng(seed);
    PriceMap prices;
    const std::vector<std::string> tickers{"AAA", "BBB", "CCC", "DDD"};
    for (const auto& t : tickers) {
        std::vector<double> p{100.0};
        for (int d = 1; d < 250; ++d) p.push_back(p.back() * std::exp(0.02 * rng.normal()));
        prices[t] = priced(t, p);
    }
    std::vector<Post> posts;
    for (std::size_t i = 0; i < n_posts; ++i) {
        const auto label = static_cast<Sentiment>(rng.below(3));
        posts.push_back(trade(std::to_string(i), tickers[rng.below(4)], static_cast<int>(rng.below(250)), label));
    }
    return {prices, posts};
}

}  // namespace

TEST(SentimentPortfolio, HandCorpus) {
    const auto r = sentiment_portfolio(hand_posts(), hand_prices());
    const std::vector<double> expected{std::log(110.0 / 100.0), -std::log(99.0 / 110.0), std::log(25.0 / 50.0),
                                       -std::log(50.0 / 25.0)};
    ASSERT_EQ(r.samples.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(r.samples[i].realized, expected[i]);
    EXPECT_EQ(r.dropped, 1u);
    const double mean = (expected[0] + expected[1] + expected[2] + expected[3]) / 4.0;
    double ss = 0.0;
    for (double x : expected) ss += (x - mean) * (x - mean);
    EXPECT_DOUBLE_EQ(r.stats.mean, mean);
    EXPECT_DOUBLE_EQ(r.stats.sd, std::sqrt(ss / 3.0));
    EXPECT_EQ(r.stats.n, 4u);
    EXPECT_EQ(r.samples[1].direction, -1);
    EXPECT_EQ(r.samples[1].post_id, "2");
}

TEST(SentimentPortfolio, AllNeutralIsAnError) {
    const std::vector<Post> posts{trade("1", "A", 0, Sentiment::kNeutral), trade("2", "B", 1, Sentiment::kNeutral)};
    try {
        sentiment_portfolio(posts, hand_prices());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kInsufficient);
    }
}

TEST(SentimentPortfolio, DdFilters) {
    auto posts = hand_posts();
    posts[0].flair = "DD";
    posts[0].is_dd = true;
    posts[0].dd_label = Sentiment::kBearish;
    posts[2].flair = "Due Diligence";
    posts[3].is_dd = true;
    posts[3].dd_label = Sentiment::kBullish;
    const auto flaired = sentiment_portfolio(posts, hand_prices(), PortfolioFilter::kFlairedDd);
    ASSERT_EQ(flaired.samples.size(), 2u);
    EXPECT_EQ(flaired.samples[0].direction, 1);
    const auto labeled = sentiment_portfolio(posts, hand_prices(), PortfolioFilter::kLabeledDd);
    ASSERT_EQ(labeled.samples.size(), 2u);
    EXPECT_EQ(labeled.samples[0].realized, -std::log(1.1));
    EXPECT_EQ(labeled.samples[1].realized, std::log(2.0));
}

TEST(SentimentPortfolio, DirectionFlipAntisymmetry) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto [prices, posts] = random_market(seed, 300);
        const auto a = sentiment_portfolio(posts, prices).stats;
        const auto b = sentiment_portfolio(flipped(posts), prices).stats;
        EXPECT_EQ(a.n, b.n);
        EXPECT_NEAR(a.mean, -b.mean, 1e-15);
        EXPECT_NEAR(a.sd, b.sd, 1e-14);
        EXPECT_NEAR(a.skew, -b.skew, 1e-12);
        EXPECT_NEAR(a.excess_kurtosis, b.excess_kurtosis, 1e-12);
    }
}

TEST(Controls, RandomWithOwnDayEqualsPrevious) {
    const auto [prices, posts] = random_market(21, 400);
    const auto controls = control_portfolios(posts, prices, 5);
    const auto own = control_samples(posts, prices, own_day_chooser(), 5);
    const auto stats = summary_stats(own);
    EXPECT_EQ(stats.mean, controls.previous.mean);
    EXPECT_EQ(stats.sd, controls.previous.sd);
    EXPECT_EQ(stats.n, controls.previous.n);
}

TEST(Controls, PreviousUsesSubmissionDayReturn) {
    const auto r = control_samples(hand_posts(), hand_prices(), own_day_chooser(), 1);
    // Post 1 sits on day 0 which has no return; the rest use ln(p_t / p_{t-1}).
    std::size_t dropped = 0;
    const auto again = control_samples(hand_posts(), hand_prices(), own_day_chooser(), 1, &dropped);
    const std::vector<double> expected{-std::log(110.0 / 100.0), std::log(50.0 / 50.0), -std::log(25.0 / 50.0),
                                       std::log(50.0 / 50.0)};
    EXPECT_EQ(r, expected);
    EXPECT_EQ(dropped, 1u);
}

TEST(Controls, RandomBitReproducible) {
    const auto [prices, posts] = random_market(22, 400);
    const auto a = control_samples(posts, prices, random_day_chooser(), 77);
    const auto b = control_samples(posts, prices, random_day_chooser(), 77);
    const auto c = control_samples(posts, prices, random_day_chooser(), 78);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_EQ(control_portfolios(posts, prices, 9).random.mean, control_portfolios(posts, prices, 9).random.mean);
}

TEST(Controls, DegenerateRandomDraw) {
    PriceMap prices;
    prices["A"] = priced("A", {10, 12});
    const std::vector<Post> posts{trade("1", "A", 1, Sentiment::kBearish)};
    const auto r = control_samples(posts, prices, random_day_chooser(), 3);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0], -std::log(1.2));
}

TEST(Controls, ConstantPricesGiveZeroReturns) {
    PriceMap prices;
    prices["A"] = priced("A", std::vector<double>(30, 7.0));
    prices["B"] = priced("B", std::vector<double>(30, 3.0));
    const std::vector<Post> posts{trade("1", "A", 3, Sentiment::kBullish), trade("2", "B", 9, Sentiment::kBearish)};
    const auto r = stock_return_samples(posts, prices);
    EXPECT_EQ(r.size(), 58u);
    for (double x : r) EXPECT_EQ(x, 0.0);
    EXPECT_EQ(control_portfolios(posts, prices, 1).stock_returns.mean, 0.0);
}

TEST(ClusterPortfolio, ThresholdAndConstantCluster) {
    AssetGraph g;
    g.nodes = {"A", "B", "C"};
    g.edges = {{0, 1, 1.0}};
    Clustering c;
    c.membership = {0, 0, 1};
    PriceMap prices;
    SeededRng rng(4);
    std::vector<double> walk{100.0};
    for (int d = 1; d < 1200; ++d) walk.push_back(walk.back() * std::exp(0.01 * rng.normal()));
    prices["A"] = priced("A", walk);
    prices["B"] = priced("B", walk);
    prices["C"] = priced("C", std::vector<double>(1200, 5.0));
    std::vector<Post> posts;
    for (int i = 0; i < 999; ++i) posts.push_back(trade("a" + std::to_string(i), i % 2 ? "A" : "B", i, Sentiment::kBullish));
    for (int i = 0; i < 1000; ++i) posts.push_back(trade("c" + std::to_string(i), "C", i, Sentiment::kBearish));
    const auto rows = cluster_portfolio(g, c, posts, prices, kTopicClusterMinPosts);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].cluster, 1);
    EXPECT_EQ(rows[0].n_posts, 1000u);
    EXPECT_EQ(rows[0].stats.mean, 0.0);
    EXPECT_EQ(rows[0].tickers, std::vector<std::string>{"C"});

    posts.push_back(trade("extra", "A", 1100, Sentiment::kBullish));
    const auto report = cluster_report(g, c, posts, prices, kTopicClusterMinPosts);
    ASSERT_EQ(report.size(), 2u);
    EXPECT_NEAR(report[0].within_correlation, 1.0, 1e-12);
    EXPECT_TRUE(std::isnan(report[1].within_correlation));
    EXPECT_EQ(default_cluster_min_posts(ClusterMode::kTopic), 1000u);
}

TEST(EntropyVix, ConstantEntropyIsSingular) {
    std::map<YearMonth, double> entropy, vix;
    YearMonth m{2015, 1};
    SeededRng rng(1);
    for (int i = 0; i < 40; ++i, m = m.next()) {
        entropy[m] = 2.0;
        vix[m] = 15.0 + rng.normal();
    }
    try {
        entropy_vix_regression(entropy, vix);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kSingular);
    }
}

TEST(EntropyVix, GapsAndShortSamples) {
    std::map<YearMonth, double> entropy, vix;
    YearMonth m{2015, 1};
    SeededRng rng(2);
    for (int i = 0; i < 30; ++i, m = m.next()) {
        entropy[m] = rng.uniform();
        vix[m] = 15.0 + rng.normal();
    }
    auto holey = vix;
    holey.erase(YearMonth{2016, 3});
    try {
        entropy_vix_regression(entropy, holey);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kValidation);
        EXPECT_NE(std::string(e.what()).find("2016-03"), std::string::npos);
    }
    std::map<YearMonth, double> short_e(entropy.begin(), std::next(entropy.begin(), 20));
    EXPECT_THROW(entropy_vix_regression(short_e, vix), Error);
    const auto fit = entropy_vix_regression(entropy, vix);
    EXPECT_EQ(fit.names, (std::vector<std::string>{"const", "Adj Close", "entropy"}));
    EXPECT_EQ(fit.n_obs, 29u);
}

TEST(EntropyVix, NoiseEntropyRarelySignificant) {
    int quiet = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        SeededRng rng(seed);
        std::map<YearMonth, double> entropy, vix;
        YearMonth m{2014, 1};
        double v = 18.0;
        for (int i = 0; i < 78; ++i, m = m.next()) {
            vix[m] = v;
            entropy[m] = 2.0 + 0.3 * rng.normal();
            v = 6.0 + 0.65 * v + 3.0 * rng.normal();
        }
        const auto fit = entropy_vix_regression(entropy, vix);
        if (fit.p_values[2] > 0.05) ++quiet;
    }
    EXPECT_GE(quiet, 90);
}

TEST(GrangerSuite, PlantedLeadDetected) {
    std::vector<CivilDate> dates;
    for (CivilDate d{2016, 1, 4}; dates.size() < 600; d = d.plus_days(1)) {
        if (d.weekday() != 0 && d.weekday() != 6) dates.push_back(d);
    }
    const TradingCalendar cal(dates);
    SeededRng rng(31);
    std::vector<Post> posts;
    for (int d = 0; d < static_cast<int>(dates.size()); ++d) {
        const int n = 1 + static_cast<int>(rng.below(6));
        for (int k = 0; k < n; ++k) {
            Post p = trade(std::to_string(d) + "_" + std::to_string(k), "AAA", d, Sentiment::kBullish);
            p.sentiment_score = rng.uniform() * 2.0 - 1.0;
            p.sentiment_label = p.sentiment_score >= 0 ? Sentiment::kBullish : Sentiment::kBearish;
            p.created_utc = eastern_to_utc(dates[static_cast<std::size_t>(d)], 11);
            posts.push_back(p);
        }
    }
    const auto s = build_sentiment_series(posts, posts, "AAA", cal);
    std::vector<double> p{100.0};
    for (std::size_t t = 1; t < dates.size(); ++t) {
        const double lead = is_defined(s.dS_hat[t - 1]) ? 0.05 * s.dS_hat[t - 1] : 0.0;
        p.push_back(p.back() * std::exp(lead + 0.005 * rng.normal()));
    }
    PriceMap prices;
    prices["AAA"] = priced("AAA", p);
    GrangerSuiteOptions opts;
    opts.lags = {1, 2};
    const auto rows = granger_suite(posts, posts, prices, cal, {"AAA"}, opts);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].status, "ok");
    EXPECT_EQ(rows[0].lag, 1);
    EXPECT_LT(rows[0].result.p_value, 0.01);

    // Shuffling posts within the corpus leaves the table unchanged.
    auto shuffled = posts;
    SeededRng shuffler(5);
    shuffler.shuffle(std::span<Post>(shuffled));
    const auto again = granger_suite(shuffled, shuffled, prices, cal, {"AAA"}, opts);
    EXPECT_EQ(again[0].result.wald_stat, rows[0].result.wald_stat);

    const auto missing = granger_suite(posts, posts, prices, cal, {"ZZZ"}, opts);
    ASSERT_EQ(missing.size(), 2u);
    EXPECT_NE(missing[0].status, "ok");
}

TEST(LongTermPanel, BuildsBothModels) {
    std::vector<CivilDate> dates;
    for (CivilDate d{2019, 1, 1}; dates.size() < 500; d = d.plus_days(1)) {
        if (d.weekday() != 0 && d.weekday() != 6) dates.push_back(d);
    }
    const TradingCalendar cal(dates);
    SeededRng rng(17);
    PriceMap prices;
    std::vector<Post> posts;
    for (const std::string t : {"AAA", "BBB", "CCC", "DDD", "EEE"}) {
        std::vector<double> p{50.0};
        for (std::size_t d = 1; d < dates.size(); ++d) p.push_back(p.back() * std::exp(0.02 * rng.normal()));
        prices[t] = priced(t, p);
        for (int i = 0; i < 300; ++i) {
            const int d = static_cast<int>(rng.below(dates.size()));
            Post post = trade(t + std::to_string(i), t, d, rng.below(2) ? Sentiment::kBullish : Sentiment::kBearish);
            post.sentiment_score = post.sentiment_label == Sentiment::kBullish ? rng.uniform() : -rng.uniform();
            post.created_utc = eastern_to_utc(dates[static_cast<std::size_t>(d)], 10);
            posts.push_back(post);
        }
    }
    const auto panel = long_term_signal_panel(posts, posts, prices, cal, Period::kMonth);
    EXPECT_GT(panel.returns_model.n_obs, 50u);
    EXPECT_EQ(panel.returns_model.n_obs, panel.volatility_model.n_obs);
    EXPECT_EQ(panel.returns_model.names.size(), 5u);
}
