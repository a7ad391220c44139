#include "forumquant/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "forumquant/backtest.hpp"
#include "forumquant/corpus.hpp"
#include "forumquant/ddgrid.hpp"
#include "forumquant/eventstudy.hpp"
#include "forumquant/marketdata.hpp"
#include "forumquant/networks.hpp"
#include "forumquant/numeric.hpp"
#include "forumquant/signals.hpp"
#include "forumquant/table.hpp"

namespace fq {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::kValidation: return 2;
        case ErrorKind::kSchema: return 3;
        case ErrorKind::kIo: return 4;
        case ErrorKind::kOutOfRange: return 5;
        case ErrorKind::kSingular: return 6;
        case ErrorKind::kInsufficient: return 7;
    }
    return 1;
}

bool command_needs_seed(const std::string& command) {
    return command == "network" || command == "cluster" || command == "backtest" || command == "report";
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorKind::kIo, "cannot read " + p.string());
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

template <typename T>
void take(const json& j, const char* key, T& into) {
    if (j.contains(key) && !j.at(key).is_null()) into = j.at(key).get<T>();
}

void take_path(const json& j, const char* key, fs::path& into) {
    if (j.contains(key) && !j.at(key).is_null()) into = j.at(key).get<std::string>();
}

}  // namespace

void apply_json_config(RunConfig& c, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::kSchema, std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::kSchema, "config must be a JSON object");
    static const std::set<std::string> keys{
        "command", "posts", "prices", "index", "universe", "comments", "vix", "out", "replicate", "seed",
        "threads", "ticker", "half_width", "capm_window", "capm_min_obs", "tickers", "lags", "start_rule",
        "f_variant", "kind", "resolution", "threshold", "similarity_threshold", "min_mentions",
        "cluster_min_posts", "activity", "period"};
    for (const auto& [k, v] : j.items()) {
        if (!keys.count(k)) throw Error(ErrorKind::kSchema, "unknown config key '" + k + "'");
    }
    try {
        take(j, "command", c.command);
        take_path(j, "posts", c.posts);
        take_path(j, "prices", c.prices);
        take_path(j, "index", c.index);
        take_path(j, "universe", c.universe);
        take_path(j, "comments", c.comments);
        take_path(j, "vix", c.vix);
        take_path(j, "out", c.out);
        if (j.contains("replicate") && !j["replicate"].is_null()) c.replicate = j["replicate"].get<std::string>();
        if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
        take(j, "threads", c.threads);
        take(j, "ticker", c.ticker);
        take(j, "half_width", c.half_width);
        take(j, "capm_window", c.capm_window);
        take(j, "capm_min_obs", c.capm_min_obs);
        take(j, "tickers", c.tickers);
        take(j, "lags", c.lags);
        take(j, "start_rule", c.start_rule);
        take(j, "f_variant", c.f_variant);
        take(j, "kind", c.kind);
        take(j, "resolution", c.resolution);
        take(j, "threshold", c.threshold);
        take(j, "similarity_threshold", c.similarity_threshold);
        take(j, "min_mentions", c.min_mentions);
        if (j.contains("cluster_min_posts") && !j["cluster_min_posts"].is_null()) {
            c.cluster_min_posts = j["cluster_min_posts"].get<std::size_t>();
        }
        take(j, "activity", c.activity);
        take(j, "period", c.period);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::kSchema, std::string("config value has the wrong type: ") + e.what());
    }
}

void apply_json_config_file(RunConfig& config, const fs::path& path) {
    apply_json_config(config, read_bytes(path));
}

namespace {

// Dataset layout used by --replicate and the bundled fixture.
void fill_from_dataset(RunConfig& c) {
    if (!c.replicate) return;
    const fs::path& d = *c.replicate;
    if (c.posts.empty()) c.posts = d / "posts.jsonl";
    if (c.prices.empty()) c.prices = d / "prices";
    if (c.index.empty()) c.index = d / "index.csv";
    if (c.universe.empty()) c.universe = d / "universe.csv";
    if (c.vix.empty()) c.vix = d / "vix.csv";
    if (c.comments.empty() && fs::exists(d / "comments.jsonl")) c.comments = d / "comments.jsonl";
}

bool needs_vix(const std::string& cmd) { return cmd == "entropy-vix" || cmd == "report"; }

}  // namespace

void validate_config(const RunConfig& in) {
    RunConfig c = in;
    fill_from_dataset(c);
    std::vector<std::string> problems;
    const auto& cmds = known_commands();
    if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end()) {
        problems.push_back("unknown command '" + c.command + "'");
    }
    auto need_file = [&](const fs::path& p, const char* what) {
        if (p.empty()) {
            problems.push_back(std::string("missing --") + what);
        } else if (!fs::is_regular_file(p)) {
            problems.push_back(std::string("--") + what + " file does not exist: " + p.string());
        }
    };
    need_file(c.posts, "posts");
    need_file(c.universe, "universe");
    need_file(c.index, "index");
    if (c.prices.empty()) {
        problems.push_back("missing --prices");
    } else if (!fs::is_directory(c.prices)) {
        problems.push_back("--prices directory does not exist: " + c.prices.string());
    }
    if (!c.comments.empty() && !fs::is_regular_file(c.comments)) {
        problems.push_back("--comments file does not exist: " + c.comments.string());
    }
    if (needs_vix(c.command)) need_file(c.vix, "vix");
    if (c.out.empty()) {
        problems.push_back("missing --out");
    } else if (fs::exists(c.out) && !fs::is_directory(c.out)) {
        problems.push_back("--out exists and is not a directory: " + c.out.string());
    }
    if (c.replicate && !fs::is_directory(*c.replicate)) {
        problems.push_back("--replicate directory does not exist: " + c.replicate->string());
    }
    if (command_needs_seed(c.command) && !c.seed) problems.push_back("command '" + c.command + "' requires --seed");
    if (c.threads < 1) problems.push_back("--threads must be at least 1");
    if (c.half_width < 0) problems.push_back("--half-width must be non-negative");
    if (c.capm_window < 2 || c.capm_min_obs < 2 || c.capm_min_obs > c.capm_window) {
        problems.push_back("CAPM window settings are inconsistent");
    }
    if (c.lags.empty() || std::any_of(c.lags.begin(), c.lags.end(), [](int l) { return l < 1; })) {
        problems.push_back("--lags must be positive integers");
    }
    if (c.start_rule != "later" && c.start_rule != "earlier") problems.push_back("--start-rule must be later|earlier");
    if (c.kind != "topic" && c.kind != "submission") problems.push_back("--kind must be topic|submission");
    if (!(c.resolution > 0.0)) problems.push_back("--resolution must be positive");
    if (!(c.threshold > 0.0 && c.threshold <= 1.0)) problems.push_back("--threshold must be in (0, 1]");
    if (!(c.similarity_threshold > 0.0 && c.similarity_threshold <= 1.0)) {
        problems.push_back("--similarity-threshold must be in (0, 1]");
    }
    if (c.activity != "calendar" && c.activity != "trading") problems.push_back("--activity must be calendar|trading");
    if (c.period != "week" && c.period != "month") problems.push_back("--period must be week|month");
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw Error(ErrorKind::kValidation, msg);
    }
}

namespace {

struct Context {
    RunConfig cfg;
    std::map<std::string, std::string> inputs;  // path -> hash

    TickerUniverse universe;
    std::vector<Post> raw_posts;
    std::string index_ticker;
    TradingCalendar calendar;
    PriceSeries index_series;
    std::vector<double> index_returns;

    std::vector<Post> all_posts;      // every post, aligned
    std::vector<Post> trade_posts;    // single-ticker, index blocked, aligned
    std::vector<Post> network_posts;  // single-ticker, index allowed, aligned
    std::size_t dropped_out_of_range = 0;
    PriceMap prices;

    std::map<std::string, std::vector<double>> car;
    bool car_ready = false;

    void hash_input(const fs::path& p) { inputs[p.generic_string()] = hex64(fnv1a64(read_bytes(p))); }

    ActivityWindow activity() const {
        return cfg.activity == "trading" ? ActivityWindow::kTradingDays : ActivityWindow::kCalendarDays;
    }
};

void load(Context& ctx) {
    auto& c = ctx.cfg;
    ctx.hash_input(c.universe);
    ctx.universe = load_universe(c.universe);
    ctx.hash_input(c.posts);
    ctx.raw_posts = load_posts(c.posts, ctx.universe);

    if (!c.comments.empty()) {
        ctx.hash_input(c.comments);
        const auto comments = load_comments(c.comments);
        static const std::vector<CommentEvent> none;
        for (auto& p : ctx.raw_posts) {
            if (!p.is_dd) continue;
            auto it = comments.find(p.id);
            p = annotate_dd_features(p, it == comments.end() ? none : it->second);
        }
    }

    ctx.hash_input(c.index);
    ctx.index_ticker = c.index.stem().string();
    const auto raw_index = read_price_csv(c.index, ctx.index_ticker);
    ctx.calendar = infer_calendar(raw_index);
    ctx.index_series = align_to_calendar(raw_index, ctx.calendar);
    ctx.index_returns = dense_log_returns(ctx.index_series, ctx.calendar.size());

    ctx.all_posts = align_posts(ctx.raw_posts, ctx.calendar, &ctx.dropped_out_of_range);
    FilterConfig trade;
    trade.extra_blocked.insert(ctx.index_ticker);
    trade.extra_blocked.insert("SPY");
    ctx.trade_posts = filter_posts(ctx.all_posts, ctx.universe, trade);
    ctx.network_posts = filter_posts(ctx.all_posts, ctx.universe, FilterConfig{});

    std::set<std::string> needed;
    for (const auto& p : ctx.trade_posts) needed.insert(p.tickers.begin(), p.tickers.end());
    const std::vector<std::string> tickers(needed.begin(), needed.end());
    for (const auto& t : tickers) {
        const fs::path f = c.prices / (t + ".csv");
        if (!fs::is_regular_file(f)) {
            throw Error(ErrorKind::kValidation, "missing price file for ticker " + t + ": " + f.string());
        }
    }
    ctx.prices = load_prices(c.prices, ctx.calendar, tickers);
    for (const auto& t : tickers) ctx.hash_input(c.prices / (t + ".csv"));
}

void ensure_car(Context& ctx) {
    if (ctx.car_ready) return;
    CapmOptions opts{ctx.cfg.capm_window, ctx.cfg.capm_min_obs};
    for (const auto& [t, series] : ctx.prices) {
        const auto r = dense_log_returns(series, ctx.calendar.size());
        ctx.car[t] = car7(fit_capm_rolling(r, ctx.index_returns, opts));
    }
    ctx.car_ready = true;
}

Row stats_row(const std::string& name, const std::optional<SummaryStats>& s) {
    if (!s) return {name, kUndefined, kUndefined, kUndefined, kUndefined, kUndefined, std::int64_t{0}};
    return {name, s->mean, s->sd, s->skew, s->excess_kurtosis, s->p_value_mean_zero, static_cast<std::int64_t>(s->n)};
}

Table regression_table(const RegressionResult& r) {
    Table t;
    t.columns = {"variable", "coef", "se", "t", "p", "stars"};
    for (std::size_t i = 0; i < r.names.size(); ++i) {
        t.add({r.names[i], r.coefficients[i], r.standard_errors[i], r.t_stats[i], r.p_values[i],
               significance_stars(r.p_values[i])});
    }
    t.add({std::string("n"), static_cast<double>(r.n_obs), Cell{}, Cell{}, Cell{}, Cell{}});
    t.add({std::string("r2"), r.r_squared, Cell{}, Cell{}, Cell{}, Cell{}});
    t.add({std::string("adj_r2"), r.adj_r_squared, Cell{}, Cell{}, Cell{}, Cell{}});
    return t;
}

using Outputs = std::map<std::string, std::string>;

void put(Outputs& out, const std::string& name, const Table& t) { out[name] = to_csv(t); }

void do_ingest(Context& ctx, Outputs& out) {
    Table posts;
    posts.columns = {"id",    "created_utc", "trading_date", "ticker",     "sentiment",     "sentiment_score",
                     "topic", "is_dd",       "dd_label",     "flaired_dd", "num_comments", "normalized_depth",
                     "word_count", "contains_url"};
    for (const auto& p : ctx.trade_posts) {
        posts.add({p.id, static_cast<std::int64_t>(p.created_utc),
                   ctx.calendar.date(static_cast<std::size_t>(*p.trading_day)).to_string(), p.tickers.front(),
                   std::string(to_string(p.sentiment_label)), p.sentiment_score,
                   p.topic_id ? Cell{static_cast<std::int64_t>(*p.topic_id)} : Cell{},
                   static_cast<std::int64_t>(p.is_dd), p.dd_label ? Cell{std::string(to_string(*p.dd_label))} : Cell{},
                   static_cast<std::int64_t>(p.flaired_dd()), static_cast<std::int64_t>(p.num_comments),
                   p.normalized_depth, static_cast<std::int64_t>(p.word_count),
                   static_cast<std::int64_t>(p.contains_url)});
    }
    put(out, "posts_clean.csv", posts);

    Table summary;
    summary.columns = {"quantity", "value"};
    summary.add({std::string("posts_loaded"), static_cast<std::int64_t>(ctx.raw_posts.size())});
    summary.add({std::string("posts_outside_calendar"), static_cast<std::int64_t>(ctx.dropped_out_of_range)});
    summary.add({std::string("posts_single_ticker"), static_cast<std::int64_t>(ctx.trade_posts.size())});
    summary.add({std::string("tickers_priced"), static_cast<std::int64_t>(ctx.prices.size())});
    summary.add({std::string("trading_days"), static_cast<std::int64_t>(ctx.calendar.size())});
    put(out, "ingest_summary.csv", summary);
}

void do_signals(Context& ctx, Outputs& out) {
    Table periodic;
    periodic.columns = {"ticker", "period", "S", "n_asset", "forum_total", "S_norm", "dS_norm", "M"};
    const Period period = ctx.cfg.period == "week" ? Period::kWeek : Period::kMonth;
    for (const auto& [t, series] : ctx.prices) {
        Table daily;
        daily.columns = {"day", "S", "n_asset", "n_forum", "S_hat", "dS_hat", "S_norm", "dS_norm", "M"};
        const auto s = build_sentiment_series(ctx.all_posts, ctx.trade_posts, t, ctx.calendar, ctx.activity());
        for (std::size_t d = 0; d < s.size(); ++d) {
            daily.add({ctx.calendar.date(d).to_string(), s.S[d], s.n_asset[d], s.n_forum[d], s.S_hat[d], s.dS_hat[d],
                       s.S_norm[d], s.dS_norm[d], s.M[d]});
        }
        put(out, "signals_" + t + ".csv", daily);
        const auto ps = period_signals(ctx.all_posts, ctx.trade_posts, t, ctx.calendar, period);
        for (std::size_t k = 0; k < ps.periods.size(); ++k) {
            periodic.add({t, ps.periods[k], ps.S[k], ps.n_asset[k], ps.forum_total[k], ps.S_norm[k], ps.dS_norm[k],
                          ps.M[k]});
        }
    }
    put(out, "signals_by_" + ctx.cfg.period + ".csv", periodic);

    Table entropy;
    entropy.columns = {"month", "entropy"};
    for (const auto& [m, h] : monthly_entropy(ctx.all_posts)) entropy.add({m.to_string(), h});
    put(out, "entropy_monthly.csv", entropy);

    Table lt;
    lt.columns = {"model", "term", "coef", "std_err", "t", "p_value", "stars", "n_obs", "status"};
    try {
        const auto panel = long_term_signal_panel(ctx.all_posts, ctx.trade_posts, ctx.prices, ctx.calendar, period);
        for (const auto& [name, fit] : {std::pair<std::string, const RegressionResult*>{"return", &panel.returns_model},
                                        {"volatility", &panel.volatility_model}}) {
            for (std::size_t i = 0; i < fit->names.size(); ++i) {
                lt.add({name, fit->names[i], fit->coefficients[i], fit->standard_errors[i], fit->t_stats[i],
                        fit->p_values[i], significance_stars(fit->p_values[i]),
                        static_cast<std::int64_t>(fit->n_obs), std::string("ok")});
            }
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::kSingular && e.kind() != ErrorKind::kInsufficient) throw;
        lt.add({std::string("all"), Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{}, Cell{},
                std::string(e.kind() == ErrorKind::kSingular ? "singular" : "insufficient")});
    }
    put(out, "long_term_panel.csv", lt);
}

void do_car(Context& ctx, Outputs& out) {
    ensure_car(ctx);
    Table t;
    t.columns = {"ticker", "offset", "group", "mean_car", "median_car", "n_posts"};
    std::vector<PostCar> pcs;
    const std::string& only = ctx.cfg.ticker;
    if (!only.empty() && !ctx.car.count(only)) {
        throw Error(ErrorKind::kValidation, "ticker " + only + " has no single-ticker posts with prices");
    }
    for (const auto& p : ctx.trade_posts) {
        const auto& tk = p.tickers.front();
        if (!only.empty() && tk != only) continue;
        pcs.push_back({*p.trading_day, p.sentiment_label, &ctx.car.at(tk)});
    }
    const std::string label = only.empty() ? "ALL" : only;
    for (const auto& prof : car_profile(pcs, ctx.cfg.half_width)) {
        for (std::size_t i = 0; i < prof.offsets.size(); ++i) {
            t.add({label, static_cast<std::int64_t>(prof.offsets[i]), std::string(to_string(prof.group)),
                   prof.mean_car[i], prof.median_car[i], static_cast<std::int64_t>(prof.post_count)});
        }
    }
    put(out, "car_profile.csv", t);
}

void do_granger(Context& ctx, Outputs& out) {
    GrangerSuiteOptions opts;
    opts.lags = ctx.cfg.lags;
    opts.start_rule = ctx.cfg.start_rule == "earlier" ? StartRule::kEarlierOf : StartRule::kLaterOf;
    opts.activity = ctx.activity();
    opts.f_variant = ctx.cfg.f_variant;
    std::vector<std::string> tickers = ctx.cfg.tickers;
    if (tickers.empty()) {
        for (const auto& [t, s] : ctx.prices) tickers.push_back(t);
    }
    for (const auto& t : tickers) {
        if (!ctx.prices.count(t)) throw Error(ErrorKind::kValidation, "granger ticker " + t + " has no prices loaded");
    }
    const auto rows = granger_suite(ctx.all_posts, ctx.trade_posts, ctx.prices, ctx.calendar, tickers, opts);
    Table t;
    t.columns = {"ticker", "lag", "wald_stat", "p_value", "stars", "n_obs", "start_date", "adf_signal", "adf_returns",
                 "status"};
    for (const auto& r : rows) {
        t.add({r.ticker, static_cast<std::int64_t>(r.lag), r.result.wald_stat, r.result.p_value,
               r.status == "ok" ? significance_stars(r.result.p_value) : std::string(),
               static_cast<std::int64_t>(r.result.n_obs),
               ctx.calendar.date(static_cast<std::size_t>(r.start_day)).to_string(), r.adf_signal_stat,
               r.adf_returns_stat, r.status});
    }
    put(out, "granger.csv", t);
}

struct NetworkRun {
    AssetGraph graph;
    Clustering clustering;
};

NetworkRun build_network(Context& ctx) {
    NetworkRun nr;
    if (ctx.cfg.kind == "topic") {
        nr.graph = build_topic_network(ctx.network_posts, ctx.cfg.min_mentions, ctx.cfg.similarity_threshold);
    } else {
        nr.graph = build_submission_network(ctx.network_posts, ctx.cfg.min_mentions, ctx.cfg.threshold);
    }
    if (nr.graph.nodes.empty()) {
        throw Error(ErrorKind::kInsufficient, "no ticker reaches " + std::to_string(ctx.cfg.min_mentions) + " mentions");
    }
    LeidenOptions lo;
    lo.resolution = ctx.cfg.resolution;
    lo.seed = *ctx.cfg.seed;
    nr.clustering = leiden(nr.graph, lo);
    return nr;
}

void do_network(Context& ctx, Outputs& out, const NetworkRun& nr) {
    Table edges;
    edges.columns = {"src", "dst", "weight"};
    for (const auto& e : nr.graph.edges) edges.add({nr.graph.nodes[e.a], nr.graph.nodes[e.b], e.weight});
    put(out, "network_edges.csv", edges);
    Table members;
    members.columns = {"ticker", "community"};
    for (std::size_t i = 0; i < nr.graph.nodes.size(); ++i) {
        members.add({nr.graph.nodes[i], static_cast<std::int64_t>(nr.clustering.membership[i])});
    }
    put(out, "network_membership.csv", members);
    Table q;
    q.columns = {"pass", "modularity"};
    for (std::size_t i = 0; i < nr.clustering.quality_trace.size(); ++i) {
        q.add({static_cast<std::int64_t>(i), nr.clustering.quality_trace[i]});
    }
    put(out, "network_quality.csv", q);
    (void)ctx;
}

void do_cluster(Context& ctx, Outputs& out, const NetworkRun& nr) {
    const ClusterMode mode = ctx.cfg.kind == "topic" ? ClusterMode::kTopic : ClusterMode::kInvestor;
    const std::size_t min_posts = ctx.cfg.cluster_min_posts.value_or(default_cluster_min_posts(mode));
    const auto rows = cluster_report(nr.graph, nr.clustering, ctx.trade_posts, ctx.prices, min_posts);
    Table t;
    t.columns = {"cluster", "tickers", "mean", "sd", "excess_kurtosis", "p_value", "n_posts", "within_correlation"};
    for (const auto& r : rows) {
        std::string names;
        for (const auto& s : r.tickers) names += (names.empty() ? "" : " ") + s;
        t.add({static_cast<std::int64_t>(r.cluster), names, r.stats.mean, r.stats.sd, r.stats.excess_kurtosis,
               r.stats.p_value_mean_zero, static_cast<std::int64_t>(r.n_posts), r.within_correlation});
    }
    put(out, "cluster_report.csv", t);
}

struct BacktestNumbers {
    std::map<std::string, std::optional<SummaryStats>> rows;
};

BacktestNumbers do_backtest(Context& ctx, Outputs& out) {
    BacktestNumbers b;
    auto portfolio = [&](PortfolioFilter f) -> std::optional<SummaryStats> {
        try {
            return sentiment_portfolio(ctx.trade_posts, ctx.prices, f).stats;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::kInsufficient || f == PortfolioFilter::kAll) throw;
            return std::nullopt;
        }
    };
    b.rows["All Submissions"] = portfolio(PortfolioFilter::kAll);
    b.rows["Flaired DD"] = portfolio(PortfolioFilter::kFlairedDd);
    b.rows["Labeled DD"] = portfolio(PortfolioFilter::kLabeledDd);
    const auto controls = control_portfolios(ctx.trade_posts, ctx.prices, *ctx.cfg.seed);
    b.rows["Stock Returns"] = controls.stock_returns;
    b.rows["Previous"] = controls.previous;
    b.rows["Random"] = controls.random;
    Table t;
    t.columns = {"portfolio", "mean", "sd", "skew", "excess_kurtosis", "p_value", "n"};
    for (const char* name : {"All Submissions", "Flaired DD", "Labeled DD", "Stock Returns", "Previous", "Random"}) {
        t.add(stats_row(name, b.rows[name]));
    }
    put(out, "portfolios.csv", t);
    return b;
}

void do_ddgrid(Context& ctx, Outputs& out) {
    ensure_car(ctx);
    DdGridInputs in;
    for (const auto& p : ctx.trade_posts) {
        if (p.is_dd && p.dd_label) in.dd_posts.push_back(p);
    }
    in.prices = ctx.prices;
    in.calendar = ctx.calendar;
    in.car = ctx.car;
    const auto results = dd_model_grid(in, enumerate_dd_grid(), ctx.cfg.threads);
    Table t;
    t.columns = {"config",        "side",       "horizon_weeks", "feature",       "flaired_only",  "exclude_memes",
                 "time_filter",   "status",     "panel_rows",    "post_rows",     "sentiment_coef", "sentiment_t",
                 "sentiment_p",   "sentiment_stars", "feature_coef", "feature_t", "feature_p",     "feature_stars",
                 "car_coef",      "r_prev_coef", "r_squared"};
    for (const auto& r : results) {
        const auto& c = r.config;
        double car_coef = kUndefined, r_prev = kUndefined, r2 = kUndefined;
        if (r.status == "ok") {
            car_coef = r.fit.coefficients[*r.fit.index_of("car")];
            r_prev = r.fit.coefficients[*r.fit.index_of("r_prev")];
            r2 = r.fit.r_squared;
        }
        t.add({static_cast<std::int64_t>(c.index), std::string(to_string(c.side)),
               static_cast<std::int64_t>(c.horizon_weeks), std::string(to_string(c.feature)),
               static_cast<std::int64_t>(c.flaired_only), static_cast<std::int64_t>(c.exclude_memes),
               std::string(to_string(c.time_filter)), r.status, static_cast<std::int64_t>(r.panel_rows),
               static_cast<std::int64_t>(r.post_rows), r.sentiment_coef, r.sentiment_t, r.sentiment_p,
               is_defined(r.sentiment_p) ? significance_stars(r.sentiment_p) : std::string(), r.feature_coef,
               r.feature_t, r.feature_p, is_defined(r.feature_p) ? significance_stars(r.feature_p) : std::string(),
               car_coef, r_prev, r2});
    }
    put(out, "ddgrid.csv", t);
}

RegressionResult do_entropy_vix(Context& ctx, Outputs& out) {
    ctx.hash_input(ctx.cfg.vix);
    const auto vix = read_price_csv(ctx.cfg.vix, "VIX");
    const auto fit = entropy_vix_regression(monthly_entropy(ctx.all_posts), monthly_last_close(vix));
    put(out, "entropy_vix.csv", regression_table(fit));
    return fit;
}

struct Replication {
    Table table;
    bool ok = true;

    Replication() { table.columns = {"quantity", "target", "computed", "decimals", "match"}; }

    void check(const std::string& what, double target, double computed, int decimals) {
        const double scale = std::pow(10.0, decimals);
        const double rounded = std::round(computed * scale) / scale;
        const bool match = is_defined(computed) && std::fabs(rounded - target) < 0.5 / scale;
        ok = ok && match;
        table.add({what, target, computed, static_cast<std::int64_t>(decimals), std::string(match ? "yes" : "no")});
    }
};

json parameters_json(const RunConfig& c) {
    json p;
    p["command"] = c.command;
    p["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    p["threads"] = c.threads;
    p["replicate"] = c.replicate ? json(c.replicate->generic_string()) : json(nullptr);
    p["ticker"] = c.ticker;
    p["half_width"] = c.half_width;
    p["capm_window"] = c.capm_window;
    p["capm_min_obs"] = c.capm_min_obs;
    p["tickers"] = c.tickers;
    p["lags"] = c.lags;
    p["start_rule"] = c.start_rule;
    p["f_variant"] = c.f_variant;
    p["kind"] = c.kind;
    p["resolution"] = c.resolution;
    p["threshold"] = c.threshold;
    p["similarity_threshold"] = c.similarity_threshold;
    p["min_mentions"] = c.min_mentions;
    p["cluster_min_posts"] = c.cluster_min_posts ? json(*c.cluster_min_posts) : json(nullptr);
    p["activity"] = c.activity;
    p["period"] = c.period;
    p["posts"] = c.posts.generic_string();
    p["prices"] = c.prices.generic_string();
    p["index"] = c.index.generic_string();
    p["universe"] = c.universe.generic_string();
    p["comments"] = c.comments.generic_string();
    p["vix"] = c.vix.generic_string();
    return p;
}

}  // namespace

RunArtifacts execute(const RunConfig& config) {
    Context ctx;
    ctx.cfg = config;
    fill_from_dataset(ctx.cfg);
    load(ctx);

    Outputs out;
    const std::string& cmd = ctx.cfg.command;
    const bool all = cmd == "report";
    std::optional<BacktestNumbers> bt;
    std::optional<RegressionResult> vix_fit;

    if (all || cmd == "ingest") do_ingest(ctx, out);
    if (all || cmd == "signals") do_signals(ctx, out);
    if (all || cmd == "car") do_car(ctx, out);
    if (all || cmd == "granger") do_granger(ctx, out);
    if (all || cmd == "network" || cmd == "cluster") {
        const auto nr = build_network(ctx);
        if (all || cmd == "network") do_network(ctx, out, nr);
        if (all || cmd == "cluster") do_cluster(ctx, out, nr);
    }
    if (all || cmd == "backtest") bt = do_backtest(ctx, out);
    if (all || cmd == "ddgrid") do_ddgrid(ctx, out);
    if (all || cmd == "entropy-vix") vix_fit = do_entropy_vix(ctx, out);

    RunArtifacts art;
    if (ctx.cfg.replicate) {
        Replication rep;
        if (bt) {
            auto stats = [&](const char* n) { return bt->rows.at(n).value_or(SummaryStats{kUndefined, kUndefined}); };
            rep.check("All Submissions mean", -0.0177, stats("All Submissions").mean, 4);
            rep.check("All Submissions sd", 0.22, stats("All Submissions").sd, 2);
            rep.check("All Submissions n", 199104, static_cast<double>(stats("All Submissions").n), 0);
            rep.check("Flaired DD mean", 0.0074, stats("Flaired DD").mean, 4);
            rep.check("Flaired DD n", 3629, static_cast<double>(stats("Flaired DD").n), 0);
            rep.check("Labeled DD mean", 0.0054, stats("Labeled DD").mean, 4);
            rep.check("Labeled DD n", 2117, static_cast<double>(stats("Labeled DD").n), 0);
            rep.check("Previous mean", 0.0238, stats("Previous").mean, 4);
            rep.check("Previous sd", 0.35, stats("Previous").sd, 2);
        }
        if (vix_fit) {
            const auto& f = *vix_fit;
            rep.check("entropy-vix const", 12.1893, f.coefficients[0], 4);
            rep.check("entropy-vix Adj Close", 0.6656, f.coefficients[1], 4);
            rep.check("entropy-vix entropy", -2.4950, f.coefficients[2], 4);
            rep.check("entropy-vix r_squared", 0.493, f.r_squared, 3);
            rep.check("entropy-vix n_obs", 77, static_cast<double>(f.n_obs), 0);
        }
        put(out, "replication.csv", rep.table);
        art.replication_ok = rep.ok;
    }

    json manifest;
    manifest["command"] = cmd;
    manifest["parameters"] = parameters_json(ctx.cfg);
    manifest["inputs"] = ctx.inputs;
    json outputs = json::object();
    for (const auto& [name, content] : out) outputs[name] = hex64(fnv1a64(content));
    manifest["outputs"] = outputs;
    out["manifest.json"] = manifest.dump(2) + "\n";
    art.files = std::move(out);
    return art;
}

int run(const RunConfig& config, std::string* error_message) {
    try {
        validate_config(config);
        const RunArtifacts art = execute(config);
        std::error_code ec;
        fs::create_directories(config.out, ec);
        if (ec) throw Error(ErrorKind::kIo, "cannot create output directory " + config.out.string() + ": " + ec.message());
        for (const auto& [name, content] : art.files) {
            const fs::path p = config.out / name;
            std::ofstream f(p, std::ios::binary | std::ios::trunc);
            if (!f) throw Error(ErrorKind::kIo, "cannot open " + p.string() + " for writing");
            f.write(content.data(), static_cast<std::streamsize>(content.size()));
            if (!f) throw Error(ErrorKind::kIo, "write failed: " + p.string());
        }
        if (!art.replication_ok) {
            if (error_message) *error_message = "replication targets not met; see replication.csv";
            return kExitReplicationMismatch;
        }
        return 0;
    } catch (const Error& e) {
        if (error_message) *error_message = std::string(to_string(e.kind())) + ": " + e.what();
        return exit_code_for(e.kind());
    }
}

}  // namespace fq
