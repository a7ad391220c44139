#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forumquant/run.hpp"

namespace {

// --config is applied before the flags so that flags override file values.
std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return argv[i + 1];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    fq::RunConfig cfg;
    try {
        const std::string config_path = find_config_path(argc, argv);
        if (!config_path.empty()) fq::apply_json_config_file(cfg, config_path);
    } catch (const fq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fq::exit_code_for(e.kind());
    }

    CLI::App app{"forumquant: forum sentiment and market analytics"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    std::string config_path;
    std::string posts, prices, index, universe, comments, vix, out, replicate;
    std::uint64_t seed = 0;

    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "seed for stochastic steps");
    app.add_option("--threads", cfg.threads, "worker threads")->check(CLI::PositiveNumber);
    auto* rep_opt = app.add_option("--replicate", replicate, "dataset directory; checks reference targets");
    app.add_option("--posts", posts, "posts.jsonl");
    app.add_option("--prices", prices, "directory of <TICKER>.csv price files");
    app.add_option("--index", index, "market index price CSV (defines the trading calendar)");
    app.add_option("--universe", universe, "ticker universe CSV");
    app.add_option("--comments", comments, "comments.jsonl for DD features");
    app.add_option("--vix", vix, "VIX price CSV");
    app.add_option("--ticker", cfg.ticker, "car: restrict to one ticker");
    app.add_option("--half-width", cfg.half_width, "car: days either side of the post");
    app.add_option("--capm-window", cfg.capm_window, "rolling CAPM window (trading days)");
    app.add_option("--capm-min-obs", cfg.capm_min_obs, "minimum observations per CAPM fit");
    app.add_option("--tickers", cfg.tickers, "granger: tickers to test")->delimiter(',');
    app.add_option("--lags", cfg.lags, "granger: lags")->delimiter(',');
    app.add_option("--start-rule", cfg.start_rule, "granger: later|earlier of the floor date and first mention");
    app.add_flag("--f-variant", cfg.f_variant, "granger: F reference distribution");
    app.add_option("--kind", cfg.kind, "network: topic|submission");
    app.add_option("--resolution", cfg.resolution, "Leiden resolution");
    app.add_option("--threshold", cfg.threshold, "submission network share threshold");
    app.add_option("--similarity-threshold", cfg.similarity_threshold, "topic network cosine threshold");
    app.add_option("--min-mentions", cfg.min_mentions, "network node mention minimum");
    std::size_t cluster_min = 0;
    auto* cmin_opt = app.add_option("--cluster-min-posts", cluster_min, "cluster rows below this are omitted");
    app.add_option("--activity", cfg.activity, "forum activity window: calendar|trading");
    app.add_option("--period", cfg.period, "signals period: week|month");

    std::vector<CLI::App*> subs;
    for (const auto& name : fq::known_commands()) subs.push_back(app.add_subcommand(name, "run " + name));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    for (auto* s : subs) {
        if (s->parsed()) cfg.command = s->get_name();
    }
    auto set_path = [](std::filesystem::path& into, const std::string& v) {
        if (!v.empty()) into = v;
    };
    set_path(cfg.posts, posts);
    set_path(cfg.prices, prices);
    set_path(cfg.index, index);
    set_path(cfg.universe, universe);
    set_path(cfg.comments, comments);
    set_path(cfg.vix, vix);
    set_path(cfg.out, out);
    if (rep_opt->count()) cfg.replicate = replicate;
    if (seed_opt->count()) cfg.seed = seed;
    if (cmin_opt->count()) cfg.cluster_min_posts = cluster_min;

    std::string message;
    const int code = fq::run(cfg, &message);
    if (code != 0) std::cerr << "error: " << message << "\n";
    return code;
}
