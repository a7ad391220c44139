#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forumquant/errors.hpp"

namespace fq {

namespace fs = std::filesystem;

struct RunConfig {
    std::string command;

    fs::path posts;
    fs::path prices;    // directory of <TICKER>.csv
    fs::path index;     // market index prices; defines the trading calendar
    fs::path universe;
    fs::path comments;  // optional
    fs::path vix;       // entropy-vix and report
    fs::path out;
    std::optional<fs::path> replicate;

    std::optional<std::uint64_t> seed;
    unsigned threads = 1;

    std::string ticker;  // car; empty pools every ticker
    int half_width = 14;
    int capm_window = 180;
    int capm_min_obs = 60;

    std::vector<std::string> tickers;  // granger; empty means every priced ticker
    std::vector<int> lags{1, 2, 5, 10};
    std::string start_rule = "later";  // later | earlier
    bool f_variant = false;

    std::string kind = "submission";   // network / cluster: topic | submission
    double resolution = 1.0;
    double threshold = 0.2;            // submission-network share threshold
    double similarity_threshold = 0.5; // topic-network cosine threshold
    std::size_t min_mentions = 150;
    std::optional<std::size_t> cluster_min_posts;

    std::string activity = "calendar";  // calendar | trading
    std::string period = "month";       // week | month
};

inline const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> c{"ingest",  "signals", "car",    "granger",     "network",
                                            "cluster", "backtest", "ddgrid", "entropy-vix", "report"};
    return c;
}

bool command_needs_seed(const std::string& command);

// Merges a JSON object (keys mirror the long flag names with '_' for '-')
// into `config`.
void apply_json_config(RunConfig& config, const std::string& json_text);
void apply_json_config_file(RunConfig& config, const fs::path& path);

// All problems are reported together in one kValidation error.
void validate_config(const RunConfig& config);

struct RunArtifacts {
    std::map<std::string, std::string> files;  // name -> content, manifest included
    bool replication_ok = true;
};

// Runs the selected analysis with every output kept in memory.
RunArtifacts execute(const RunConfig& config);

// Validates, executes and only then writes the outputs. Returns the exit code.
int run(const RunConfig& config, std::string* error_message = nullptr);

int exit_code_for(ErrorKind kind);
inline constexpr int kExitReplicationMismatch = 8;

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace fq
