#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "forumquant/marketdata.hpp"

namespace fq {

enum class Sentiment { kBullish, kBearish, kNeutral };

const char* to_string(Sentiment s);
std::optional<Sentiment> parse_sentiment(std::string_view text);
inline int direction_of(Sentiment s) { return s == Sentiment::kBullish ? 1 : (s == Sentiment::kBearish ? -1 : 0); }

struct Post {
    std::string id;
    std::int64_t created_utc = 0;
    std::string author_id;
    std::string title;
    std::string selftext;
    std::optional<std::string> flair;
    Sentiment sentiment_label = Sentiment::kNeutral;
    double sentiment_score = 0.0;  // bullish minus bearish classifier output, in [-1, 1]
    std::optional<int> topic_id;
    std::vector<std::string> tickers;
    bool is_dd = false;
    std::optional<Sentiment> dd_label;  // bullish or bearish only
    int num_comments = 1;               // the submission counts as one
    int max_comment_depth = 0;
    double normalized_depth = 0.0;      // max depth / ln(num_comments), 0 when num_comments < 2
    bool contains_url = false;
    int word_count = 0;
    std::optional<int> trading_day;     // filled by alignment

    std::string text() const { return title.empty() ? selftext : (selftext.empty() ? title : title + "\n" + selftext); }
    bool flaired_dd() const;
};

enum class Exchange { kNyse, kNasdaq, kOther };

struct TickerInfo {
    Exchange exchange = Exchange::kOther;
    bool requires_cashtag = false;
    bool blocked = false;
};

struct TickerUniverse {
    std::map<std::string, TickerInfo> entries;

    const TickerInfo* find(const std::string& symbol) const;
};

// universe.csv: symbol,exchange,requires_cashtag,blocked
TickerUniverse load_universe(const std::filesystem::path& path);

// Upper-case whole-token matches against the universe. Tokens are maximal
// runs of ASCII alphanumerics; symbols flagged requires_cashtag only match
// when the token is immediately preceded by '$'. Result is deduplicated in
// order of first appearance.
std::vector<std::string> extract_tickers(std::string_view text, const TickerUniverse& universe);

int count_words(std::string_view text);
// True when the text contains a link that is not an image link.
bool contains_non_image_url(std::string_view text);

// posts.jsonl reader. Derived fields left out or null are recomputed from
// the text; fields that are present are trusted. Result is sorted by
// created_utc (stable).
std::vector<Post> load_posts(const std::filesystem::path& path, const TickerUniverse& universe);
Post parse_post_line(std::string_view line, std::size_t line_number, const TickerUniverse& universe);

struct FilterConfig {
    bool exchange_filter = true;          // keep NYSE/NASDAQ symbols only
    std::size_t required_ticker_count = 1;
    std::set<std::string> extra_blocked;  // e.g. SPY for return-based analyses
};

// Drops blocked, unknown and (optionally) non-NYSE/NASDAQ symbols from each
// post and keeps the posts left with exactly `required_ticker_count` tickers.
std::vector<Post> filter_posts(const std::vector<Post>& posts, const TickerUniverse& universe,
                               const FilterConfig& config = {});

// Index of the first session whose 16:00 US/Eastern close is >= created_utc.
int align_to_trading_day(std::int64_t created_utc, const TradingCalendar& calendar);

// Sets trading_day on every post; posts outside the calendar span are
// dropped and counted in `dropped` when given.
std::vector<Post> align_posts(std::vector<Post> posts, const TradingCalendar& calendar, std::size_t* dropped = nullptr);

struct CommentEvent {
    std::int64_t created_utc = 0;
    int depth = 1;
};

inline constexpr std::int64_t kDdCommentWindowSeconds = 24 * 3600;

// Counts only comments within 24 hours of the submission.
Post annotate_dd_features(Post post, const std::vector<CommentEvent>& comments);

// comments.jsonl: {"post_id": ..., "created_utc": ..., "depth": ...} per line.
std::map<std::string, std::vector<CommentEvent>> load_comments(const std::filesystem::path& path);

}  // namespace fq
