// Property-based acceptance suite. Prints one PASS/FAIL line per criterion
// and exits non-zero when any criterion fails.
//
// usage: acceptance <cli binary> <fixture dir> <scratch dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "forumquant/backtest.hpp"
#include "forumquant/civil_time.hpp"
#include "forumquant/ddgrid.hpp"
#include "forumquant/distributions.hpp"
#include "forumquant/econometrics.hpp"
#include "forumquant/eventstudy.hpp"
#include "forumquant/networks.hpp"
#include "forumquant/numeric.hpp"
#include "forumquant/rng.hpp"
#include "forumquant/signals.hpp"
#include "graphs.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace fq;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<double> gaussian(SeededRng& rng, std::size_t n, double sd = 1.0) {
    std::vector<double> out(n);
    for (auto& x : out) x = sd * rng.normal();
    return out;
}

// 1. OLS against the normal equations, Wald = t^2 at one lag, chi-square tail.
Outcome econometrics_kernel() {
    Outcome o;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        SeededRng rng(seed);
        const int n = 30 + static_cast<int>(rng.below(70));
        const int k = 1 + static_cast<int>(rng.below(5));
        Eigen::MatrixXd X(n, k);
        Eigen::VectorXd y(n);
        std::vector<std::vector<double>> rows;
        std::vector<double> ys;
        for (int i = 0; i < n; ++i) {
            std::vector<double> row{1.0};
            for (int j = 0; j < k; ++j) {
                X(i, j) = rng.normal();
                row.push_back(X(i, j));
            }
            y(i) = 0.5 + X.row(i).sum() + rng.normal();
            rows.push_back(row);
            ys.push_back(y(i));
        }
        const auto fit = ols(X, y);
        const auto ref = oracle::normal_equations(rows, ys);
        for (std::size_t j = 0; j < ref.beta.size(); ++j) {
            worst = std::max(worst, std::abs(fit.coefficients[j] - ref.beta[j]));
            worst = std::max(worst, std::abs(fit.standard_errors[j] - ref.se[j]));
        }
    }
    o.check(worst <= 1e-10, "OLS max deviation " + fmt(worst));

    double wald_gap = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SeededRng rng(seed + 1000);
        const int T = 400;
        std::vector<double> x(T), yv(T);
        for (int t = 0; t < T; ++t) {
            x[t] = rng.normal();
            yv[t] = (t ? 0.3 * yv[t - 1] + 0.1 * x[t - 1] : 0.0) + rng.normal();
        }
        const auto g = granger_test(x, yv, 1);
        Eigen::MatrixXd Z(T - 1, 2);
        Eigen::VectorXd Y(T - 1);
        for (int t = 1; t < T; ++t) {
            Z(t - 1, 0) = yv[t - 1];
            Z(t - 1, 1) = x[t - 1];
            Y(t - 1) = yv[t];
        }
        const auto r = ols(Z, Y);
        wald_gap = std::max(wald_gap, std::abs(g.wald_stat - r.t_stats[2] * r.t_stats[2]));
    }
    o.check(wald_gap <= 1e-10, "Wald vs t^2 deviation " + fmt(wald_gap));

    const double tail = tail_probability(Distribution::chi_square(1), 3.841459);
    o.check(std::abs(tail - 0.05) <= 1e-4, "chi2(1) tail " + fmt(tail));
    o.detail += (o.detail.empty() ? "" : "; ") + std::string("max OLS dev ") + fmt(worst);
    return o;
}

// 2. ADF verdicts on random walks and AR(0.5), T = 500.
Outcome adf_calibration() {
    Outcome o;
    int walk_ok = 0, ar_ok = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        SeededRng rng(seed);
        std::vector<double> walk(500), ar(500);
        double w = 0.0, a = 0.0;
        for (int t = 0; t < 500; ++t) {
            w += rng.normal();
            a = 0.5 * a + rng.normal();
            walk[t] = w;
            ar[t] = a;
        }
        if (!adf_test(walk).stationary) ++walk_ok;
        if (adf_test(ar).stationary) ++ar_ok;
    }
    o.check(walk_ok >= 90, "random walk correct " + std::to_string(walk_ok) + "/100");
    o.check(ar_ok >= 90, "AR(0.5) correct " + std::to_string(ar_ok) + "/100");
    if (o.pass) o.detail = "random walk " + std::to_string(walk_ok) + "/100, AR(0.5) " + std::to_string(ar_ok) + "/100";
    return o;
}

// 3. Granger power on a planted VAR and size on independent pairs.
Outcome granger_power_size() {
    Outcome o;
    int detected = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        SeededRng rng(seed);
        const int T = 1000;
        std::vector<double> x(T), y(T);
        for (int t = 0; t < T; ++t) {
            x[t] = rng.normal();
            y[t] = (t ? 0.2 * y[t - 1] + 0.3 * x[t - 1] : 0.0) + rng.normal();
        }
        if (granger_test(x, y, 1).p_value < 0.01) ++detected;
    }
    int rejected = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        SeededRng rng(seed + 5000);
        const auto x = gaussian(rng, 1000), y = gaussian(rng, 1000);
        if (granger_test(x, y, 1).p_value < 0.05) ++rejected;
    }
    const double rate = rejected / 1000.0;
    o.check(detected >= 99, "planted detected " + std::to_string(detected) + "/100");
    o.check(std::abs(rate - 0.05) <= 0.02, "independent rejection rate " + fmt(rate));
    if (o.pass) o.detail = "power " + std::to_string(detected) + "/100, size " + fmt(rate);
    return o;
}

// 4. CAPM residuals and CAR.
Outcome event_study() {
    Outcome o;
    SeededRng rng(4);
    const auto market = gaussian(rng, 1000, 0.01);
    const auto same = fit_capm_rolling(market, market);
    const auto car_same = car7(same);
    bool zero = true;
    std::size_t defined = 0;
    for (std::size_t t = 0; t < market.size(); ++t) {
        if (is_defined(same.residual[t])) {
            ++defined;
            zero = zero && same.residual[t] == 0.0;
        }
        if (is_defined(car_same[t])) zero = zero && car_same[t] == 0.0;
    }
    o.check(defined > 900, "too few defined residuals");
    o.check(zero, "asset == market left non-zero residual or CAR");

    const auto noise = gaussian(rng, 1000, 0.02);
    std::vector<double> asset(1000);
    for (std::size_t t = 0; t < asset.size(); ++t) asset[t] = 0.0003 + 1.2 * market[t] + noise[t];
    const auto fit = fit_capm_rolling(asset, market);
    double worst = 0.0;
    for (std::size_t t = 0; t < asset.size(); ++t) {
        if (!is_defined(fit.residual[t])) continue;
        worst = std::max(worst, std::abs(fit.alpha[t] + fit.beta[t] * market[t] + fit.residual[t] - asset[t]));
    }
    o.check(worst <= 1e-12, "reconstruction deviation " + fmt(worst));
    if (o.pass) o.detail = "reconstruction max dev " + fmt(worst);
    return o;
}

// 5. Submission-network toy weight and Leiden on a planted partition.
Outcome networks() {
    Outcome o;
    std::vector<Post> posts;
    auto add = [&](const std::string& author, const std::string& ticker) {
        Post p;
        p.id = author + ticker;
        p.author_id = author;
        p.tickers = {ticker};
        posts.push_back(p);
    };
    for (int i = 1; i <= 7; ++i) add("u" + std::to_string(i), "SPY");
    for (int i = 1; i <= 3; ++i) add("u" + std::to_string(i), "AAPL");
    add("v1", "AAPL");
    add("v2", "AAPL");
    const auto g = build_submission_network(posts, 1, 0.2);
    o.check(g.edges.size() == 1 && g.edges[0].weight == 3.0 / 7.0 + 3.0 / 5.0, "toy weight mismatch");

    std::vector<int> truth(200);
    for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = static_cast<int>(i / 50);
    int exact = 0;
    bool monotone = true;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto graph = testgraph::planted_partition(seed, 4, 50, 0.3, 0.01);
        const auto c = leiden(graph, {1.0, seed});
        if (testgraph::same_partition(c.membership, truth)) ++exact;
        for (std::size_t i = 1; i < c.quality_trace.size(); ++i) {
            monotone = monotone && c.quality_trace[i] >= c.quality_trace[i - 1];
        }
    }
    o.check(exact >= 95, "planted partition recovered " + std::to_string(exact) + "/100");
    o.check(monotone, "modularity decreased across iterations");
    if (o.pass) o.detail = "planted recovery " + std::to_string(exact) + "/100";
    return o;
}

// 6. Entropy, telescoping and momentum.
Outcome signals() {
    Outcome o;
    int inexact = 0;
    for (int K = 1; K <= 64; ++K) {
        std::vector<Post> labelled;
        for (int topic = 0; topic < K; ++topic) {
            for (int rep = 0; rep < 3; ++rep) {
                Post p;
                p.topic_id = topic;
                p.created_utc = eastern_to_utc({2021, 6, 15}, 12);
                labelled.push_back(p);
            }
        }
        const double lnk = std::log(static_cast<double>(K));
        const double from_counts = shannon_entropy(monthly_topic_distribution(labelled, {2021, 6}));
        if (from_counts != lnk) ++inexact;
    }
    o.check(inexact == 0, std::to_string(inexact) + " uniform distributions missed ln K");

    std::vector<CivilDate> dates;
    for (int i = 0; i < 120; ++i) dates.push_back(CivilDate{2021, 1, 4}.plus_days(i));
    const TradingCalendar cal(dates);
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        SeededRng rng(seed);
        std::vector<Post> posts;
        for (int i = 0; i < 500; ++i) {
            Post p;
            p.id = std::to_string(i);
            const auto day = rng.below(dates.size());
            p.trading_day = static_cast<int>(day);
            p.created_utc = eastern_to_utc(dates[day], 12);
            p.tickers = {rng.below(2) ? "AAA" : "BBB"};
            p.sentiment_score = rng.uniform() * 2.0 - 1.0;
            posts.push_back(p);
        }
        const auto s = build_sentiment_series(posts, posts, "AAA", cal);
        std::size_t first = s.size(), last = 0;
        for (std::size_t t = 0; t < s.size(); ++t) {
            if (!is_defined(s.S_hat[t])) continue;
            if (first == s.size()) first = t;
            last = t;
        }
        double sum = 0.0;
        for (std::size_t t = first + 1; t <= last; ++t) sum += s.dS_hat[t];
        worst = std::max(worst, std::abs(sum - (s.S_hat[last] - s.S_hat[first])));
    }
    o.check(worst <= 1e-12, "telescoping deviation " + fmt(worst));

    const std::vector<double> n{4, 8}, N{100, 100};
    o.check(momentum(n, N)[1] == std::log(2.0), "momentum of a doubled share is not ln 2");
    if (o.pass) o.detail = "telescoping max dev " + fmt(worst);
    return o;
}

// 7. Portfolio accounting.
Outcome backtest() {
    Outcome o;
    auto series = [](const std::string& t, std::vector<double> p) {
        PriceSeries s;
        s.ticker = t;
        for (std::size_t i = 0; i < p.size(); ++i) s.days.push_back(static_cast<int>(i));
        s.adj_close = std::move(p);
        return s;
    };
    auto post = [](const std::string& id, const std::string& t, int day, Sentiment label) {
        Post p;
        p.id = id;
        p.tickers = {t};
        p.trading_day = day;
        p.sentiment_label = label;
        return p;
    };
    PriceMap prices;
    prices["A"] = series("A", {100, 110, 99, 99, 120});
    prices["B"] = series("B", {50, 50, 25, 50, 50});
    std::vector<Post> posts{post("1", "A", 0, Sentiment::kBullish), post("2", "A", 1, Sentiment::kBearish),
                            post("3", "B", 1, Sentiment::kBullish), post("4", "B", 2, Sentiment::kBearish),
                            post("5", "A", 3, Sentiment::kNeutral)};
    const double r1 = std::log(110.0 / 100.0), r2 = -std::log(99.0 / 110.0), r3 = std::log(25.0 / 50.0),
                 r4 = -std::log(50.0 / 25.0);
    const double mu = (r1 + r2 + r3 + r4) / 4.0;
    const double sigma = std::sqrt(((r1 - mu) * (r1 - mu) + (r2 - mu) * (r2 - mu) + (r3 - mu) * (r3 - mu) +
                                    (r4 - mu) * (r4 - mu)) / 3.0);
    const auto hand = sentiment_portfolio(posts, prices);
    o.check(hand.stats.n == 4, "hand corpus sample count " + std::to_string(hand.stats.n));
    o.check(hand.stats.mean == mu, "hand mean " + fmt(hand.stats.mean) + " vs " + fmt(mu));
    o.check(hand.stats.sd == sigma, "hand sd " + fmt(hand.stats.sd) + " vs " + fmt(sigma));

    SeededRng rng(77);
    PriceMap market;
    for (const std::string t : {"AAA", "BBB", "CCC"}) {
        std::vector<double> p{30.0};
        for (int d = 1; d < 300; ++d) p.push_back(p.back() * std::exp(0.03 * rng.normal()));
        market[t] = series(t, p);
    }
    std::vector<Post> many, flipped;
    const std::vector<std::string> names{"AAA", "BBB", "CCC"};
    for (int i = 0; i < 500; ++i) {
        const auto label = rng.below(2) ? Sentiment::kBullish : Sentiment::kBearish;
        many.push_back(post(std::to_string(i), names[rng.below(3)], static_cast<int>(rng.below(300)), label));
        auto f = many.back();
        f.sentiment_label = label == Sentiment::kBullish ? Sentiment::kBearish : Sentiment::kBullish;
        flipped.push_back(f);
    }
    const auto a = sentiment_portfolio(many, market).stats;
    const auto b = sentiment_portfolio(flipped, market).stats;
    o.check(a.n == b.n && std::abs(a.mean + b.mean) <= 1e-15 && std::abs(a.sd - b.sd) <= 1e-15 &&
                std::abs(a.skew + b.skew) <= 1e-12 && std::abs(a.excess_kurtosis - b.excess_kurtosis) <= 1e-12,
            "direction flip not antisymmetric");

    const auto x = control_samples(many, market, random_day_chooser(), 2024);
    const auto y = control_samples(many, market, random_day_chooser(), 2024);
    bool identical = x.size() == y.size();
    for (std::size_t i = 0; identical && i < x.size(); ++i) {
        identical = std::memcmp(&x[i], &y[i], sizeof(double)) == 0;
    }
    o.check(identical, "Random control differs between runs with one seed");
    const auto own = summary_stats(control_samples(many, market, own_day_chooser(), 1));
    const auto previous = control_portfolios(many, market, 1).previous;
    o.check(own.mean == previous.mean && own.sd == previous.sd, "own-day Random differs from Previous");
    if (o.pass) o.detail = "hand mean " + fmt(mu) + ", sd " + fmt(sigma);
    return o;
}

// 8. DD grid cardinality and panel fixed effects.
Outcome dd_grid() {
    Outcome o;
    const auto grid = enumerate_dd_grid();
    o.check(grid.size() == 3744, "grid has " + std::to_string(grid.size()) + " configurations");

    SeededRng rng(8);
    PanelData d;
    const int entities = 12;
    d.X.resize(2 * entities, 3);
    d.y.resize(2 * entities);
    d.names = {"x1", "x2", "x3"};
    for (int t = 0; t < 2; ++t) {
        for (int e = 0; e < entities; ++e) {
            const int row = t * entities + e;
            d.entity.push_back(e);
            d.time.push_back(t);
            for (int c = 0; c < 3; ++c) d.X(row, c) = rng.normal();
            d.y(row) = 0.3 * t + d.X(row, 0) - 0.5 * d.X(row, 2) + 0.1 * rng.normal();
        }
    }
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (int i = 0; i < d.y.size(); ++i) {
        X.push_back({d.X(i, 0), d.X(i, 1), d.X(i, 2)});
        y.push_back(d.y(i));
    }
    const auto fit = panel_fe(d);
    const auto ref = oracle::dummy_variable_panel(X, y, d.time);
    double worst = 0.0;
    for (std::size_t j = 0; j < ref.beta.size(); ++j) {
        worst = std::max(worst, std::abs(fit.coefficients[j] - ref.beta[j]));
        worst = std::max(worst, std::abs(fit.standard_errors[j] - ref.se[j]));
    }
    o.check(worst <= 1e-10, "panel_fe deviation " + fmt(worst));
    if (o.pass) o.detail = "3744 configs, panel max dev " + fmt(worst);
    return o;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

std::map<std::string, std::string> read_tree(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        out[fs::relative(entry.path(), root).generic_string()] = ss.str();
    }
    return out;
}

// 9. Two full pipeline runs on the fixture produce identical bytes.
Outcome determinism(const fs::path& cli, const fs::path& fixture, const fs::path& scratch) {
    Outcome o;
    std::vector<fs::path> outs{scratch / "run_a", scratch / "run_b"};
    for (const auto& out : outs) {
        fs::remove_all(out);
        const std::string cmd = quoted(cli) + " report --posts " + quoted(fixture / "posts.jsonl") + " --prices " +
                                quoted(fixture / "prices") + " --index " + quoted(fixture / "index.csv") +
                                " --universe " + quoted(fixture / "universe.csv") + " --comments " +
                                quoted(fixture / "comments.jsonl") + " --vix " + quoted(fixture / "vix.csv") +
                                " --out " + quoted(out) + " --seed 7 --min-mentions 20 --cluster-min-posts 10" +
                                " > " + quoted(scratch / (out.filename().string() + ".log")) + " 2>&1";
        const int rc = std::system(cmd.c_str());
        o.check(rc == 0, "report run exited with " + std::to_string(rc));
    }
    if (!o.pass) return o;
    const auto a = read_tree(outs[0]);
    const auto b = read_tree(outs[1]);
    o.check(!a.empty(), "report produced no files");
    o.check(a == b, "outputs differ between runs");
    if (o.pass) o.detail = std::to_string(a.size()) + " files identical";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 4) {
        std::fprintf(stderr, "usage: acceptance <cli> <fixture dir> <scratch dir>\n");
        return 2;
    }
    const fs::path cli = fs::absolute(argv[1]), fixture = fs::absolute(argv[2]), scratch = fs::absolute(argv[3]);
    fs::create_directories(scratch);

    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "econometrics kernel", 5.0, econometrics_kernel},
        {2, "ADF calibration", 30.0, adf_calibration},
        {3, "Granger power and size", 60.0, granger_power_size},
        {4, "event study", 5.0, event_study},
        {5, "networks", 60.0, networks},
        {6, "signals", 0.0, signals},
        {7, "backtest accounting", 0.0, backtest},
        {8, "DD grid", 0.0, dd_grid},
        {9, "end-to-end determinism", 0.0, [&] { return determinism(cli, fixture, scratch); }},
    };

    const auto suite_start = std::chrono::steady_clock::now();
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_s > 0.0) o.check(secs < c.budget_s, "took " + fmt(secs) + " s, budget " + fmt(c.budget_s) + " s");
        if (c.id == 9) {
            const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
            o.check(total < 300.0, "suite took " + fmt(total) + " s");
        }
        std::printf("%s criterion %d: %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.empty() ? "" : " - ", o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
