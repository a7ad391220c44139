#include "forumquant/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "forumquant/errors.hpp"

namespace fq {

namespace {

using json = nlohmann::json;

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cell.erase(std::remove_if(cell.begin(), cell.end(), [](unsigned char c) { return std::isspace(c); }),
                   cell.end());
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_bool_cell(const std::string& text, const std::string& where) {
    const std::string t = lower(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no" || t.empty()) return false;
    throw Error(ErrorKind::kSchema, where + ": invalid boolean '" + text + "'");
}

constexpr std::array<std::string_view, 16> kPostKeys = {
    "id",           "created_utc", "author_id",    "title",     "selftext",          "flair",
    "sentiment_label", "sentiment_score", "topic_id", "tickers", "is_dd",            "dd_label",
    "num_comments", "max_comment_depth", "contains_url", "word_count"};

bool has_value(const json& obj, const char* key) { return obj.contains(key) && !obj.at(key).is_null(); }

[[noreturn]] void schema_error(std::size_t line_number, const std::string& field, const std::string& detail) {
    throw Error(ErrorKind::kSchema,
                "posts line " + std::to_string(line_number) + ": field '" + field + "' " + detail);
}

template <typename T>
T get_field(const json& obj, const char* key, std::size_t line_number) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        schema_error(line_number, key, "has the wrong type");
    }
}

double normalize_depth(int max_depth, int num_comments) {
    return num_comments >= 2 ? static_cast<double>(max_depth) / std::log(static_cast<double>(num_comments)) : 0.0;
}

}  // namespace

const char* to_string(Sentiment s) {
    switch (s) {
        case Sentiment::kBullish: return "bullish";
        case Sentiment::kBearish: return "bearish";
        case Sentiment::kNeutral: return "neutral";
    }
    return "neutral";
}

std::optional<Sentiment> parse_sentiment(std::string_view text) {
    if (text == "bullish") return Sentiment::kBullish;
    if (text == "bearish") return Sentiment::kBearish;
    if (text == "neutral") return Sentiment::kNeutral;
    return std::nullopt;
}

bool Post::flaired_dd() const {
    if (!flair) return false;
    const std::string f = lower(*flair);
    return f == "dd" || f == "due diligence";
}

const TickerInfo* TickerUniverse::find(const std::string& symbol) const {
    auto it = entries.find(symbol);
    return it == entries.end() ? nullptr : &it->second;
}

TickerUniverse load_universe(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kIo, "cannot open universe file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::kSchema, path.string() + ": empty universe file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_csv_line(line) != std::vector<std::string>{"symbol", "exchange", "requires_cashtag", "blocked"}) {
        throw Error(ErrorKind::kSchema, path.string() + ": expected header 'symbol,exchange,requires_cashtag,blocked'");
    }
    TickerUniverse universe;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        const std::string where = path.string() + " row " + std::to_string(row);
        if (cells.size() != 4) throw Error(ErrorKind::kSchema, where + ": expected 4 columns");
        const std::string& symbol = cells[0];
        if (symbol.empty() || std::any_of(symbol.begin(), symbol.end(), [](unsigned char c) { return std::islower(c); })) {
            throw Error(ErrorKind::kSchema, where + ": symbol must be non-empty upper case");
        }
        TickerInfo info;
        const std::string exch = lower(cells[1]);
        info.exchange = exch == "nyse" ? Exchange::kNyse : (exch == "nasdaq" ? Exchange::kNasdaq : Exchange::kOther);
        info.requires_cashtag = parse_bool_cell(cells[2], where);
        info.blocked = parse_bool_cell(cells[3], where);
        if (!universe.entries.emplace(symbol, info).second) {
            throw Error(ErrorKind::kSchema, where + ": duplicate symbol " + symbol);
        }
    }
    return universe;
}

std::vector<std::string> extract_tickers(std::string_view text, const TickerUniverse& universe) {
    std::vector<std::string> found;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_alnum(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_alnum(text[j])) ++j;
        const bool cashtag = i > 0 && text[i - 1] == '$';
        const std::string token(text.substr(i, j - i));
        i = j;
        const TickerInfo* info = universe.find(token);
        if (info == nullptr || info->blocked) continue;
        if (info->requires_cashtag && !cashtag) continue;
        if (std::find(found.begin(), found.end(), token) == found.end()) found.push_back(token);
    }
    return found;
}

int count_words(std::string_view text) {
    int n = 0;
    bool in_word = false;
    for (char c : text) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (!space && !in_word) ++n;
        in_word = !space;
    }
    return n;
}

bool contains_non_image_url(std::string_view text) {
    static constexpr std::array<std::string_view, 8> kImageSuffixes = {".jpg", ".jpeg", ".png", ".gif",
                                                                       ".gifv", ".webp", ".bmp", ".svg"};
    static constexpr std::array<std::string_view, 4> kImageHosts = {"i.redd.it", "i.imgur.com", "preview.redd.it",
                                                                    "imgur.com/a/"};
    const std::string haystack = lower(std::string(text));
    std::size_t pos = 0;
    while (pos < haystack.size()) {
        std::size_t start = std::string::npos;
        for (std::string_view scheme : {"http://", "https://", "www."}) {
            const std::size_t p = haystack.find(scheme, pos);
            if (p != std::string::npos && p < start) start = p;
        }
        if (start == std::string::npos) return false;
        std::size_t end = start;
        while (end < haystack.size() && !std::isspace(static_cast<unsigned char>(haystack[end])) &&
               haystack[end] != ')' && haystack[end] != ']' && haystack[end] != '"') {
            ++end;
        }
        std::string url = haystack.substr(start, end - start);
        while (!url.empty() && (url.back() == '.' || url.back() == ',')) url.pop_back();
        std::string path = url.substr(0, url.find_first_of("?#"));
        bool image = false;
        for (auto suffix : kImageSuffixes) {
            if (path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
                image = true;
            }
        }
        for (auto host : kImageHosts) {
            if (url.find(host) != std::string::npos) image = true;
        }
        if (!image && url.size() > 7) return true;
        pos = end;
    }
    return false;
}

Post parse_post_line(std::string_view line, std::size_t line_number, const TickerUniverse& universe) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::kSchema, "posts line " + std::to_string(line_number) + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) {
        throw Error(ErrorKind::kSchema, "posts line " + std::to_string(line_number) + ": expected a JSON object");
    }
    for (const auto& item : obj.items()) {
        if (std::find(kPostKeys.begin(), kPostKeys.end(), item.key()) == kPostKeys.end()) {
            schema_error(line_number, item.key(), "is not a recognised key");
        }
    }
    for (const char* required : {"id", "created_utc", "author_id", "sentiment_label", "sentiment_score"}) {
        if (!has_value(obj, required)) schema_error(line_number, required, "is required");
    }

    Post p;
    p.id = get_field<std::string>(obj, "id", line_number);
    p.created_utc = get_field<std::int64_t>(obj, "created_utc", line_number);
    p.author_id = get_field<std::string>(obj, "author_id", line_number);
    if (has_value(obj, "title")) p.title = get_field<std::string>(obj, "title", line_number);
    if (has_value(obj, "selftext")) p.selftext = get_field<std::string>(obj, "selftext", line_number);
    if (has_value(obj, "flair")) p.flair = get_field<std::string>(obj, "flair", line_number);

    const auto label_text = get_field<std::string>(obj, "sentiment_label", line_number);
    const auto label = parse_sentiment(label_text);
    if (!label) schema_error(line_number, "sentiment_label", "has unknown value '" + label_text + "'");
    p.sentiment_label = *label;
    p.sentiment_score = get_field<double>(obj, "sentiment_score", line_number);
    if (!(p.sentiment_score >= -1.0 && p.sentiment_score <= 1.0)) {
        schema_error(line_number, "sentiment_score", "must lie in [-1, 1]");
    }
    const bool sign_ok = (p.sentiment_label == Sentiment::kBullish && p.sentiment_score > 0.0) ||
                         (p.sentiment_label == Sentiment::kBearish && p.sentiment_score < 0.0) ||
                         (p.sentiment_label == Sentiment::kNeutral && p.sentiment_score == 0.0);
    if (!sign_ok) schema_error(line_number, "sentiment_score", "sign disagrees with sentiment_label");

    if (has_value(obj, "topic_id")) p.topic_id = get_field<int>(obj, "topic_id", line_number);
    if (has_value(obj, "is_dd")) p.is_dd = get_field<bool>(obj, "is_dd", line_number);
    if (has_value(obj, "dd_label")) {
        const auto dd_text = get_field<std::string>(obj, "dd_label", line_number);
        const auto dd = parse_sentiment(dd_text);
        if (!dd || *dd == Sentiment::kNeutral) schema_error(line_number, "dd_label", "has unknown value '" + dd_text + "'");
        p.dd_label = *dd;
    }

    const std::string text = p.text();
    if (has_value(obj, "tickers")) {
        p.tickers = get_field<std::vector<std::string>>(obj, "tickers", line_number);
        auto sorted = p.tickers;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            schema_error(line_number, "tickers", "contains duplicates");
        }
    } else {
        p.tickers = extract_tickers(text, universe);
    }

    p.num_comments = has_value(obj, "num_comments") ? get_field<int>(obj, "num_comments", line_number) : 1;
    if (p.num_comments < 1) schema_error(line_number, "num_comments", "must be >= 1");
    p.max_comment_depth = has_value(obj, "max_comment_depth") ? get_field<int>(obj, "max_comment_depth", line_number) : 0;
    if (p.max_comment_depth < 0) schema_error(line_number, "max_comment_depth", "must be >= 0");
    p.normalized_depth = normalize_depth(p.max_comment_depth, p.num_comments);
    p.contains_url = has_value(obj, "contains_url") ? get_field<bool>(obj, "contains_url", line_number)
                                                    : contains_non_image_url(text);
    p.word_count = has_value(obj, "word_count") ? get_field<int>(obj, "word_count", line_number) : count_words(text);
    if (p.word_count < 0) schema_error(line_number, "word_count", "must be >= 0");
    return p;
}

std::vector<Post> load_posts(const std::filesystem::path& path, const TickerUniverse& universe) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kIo, "cannot open posts file " + path.string());
    std::vector<Post> posts;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        posts.push_back(parse_post_line(line, line_number, universe));
    }
    std::stable_sort(posts.begin(), posts.end(),
                     [](const Post& a, const Post& b) { return a.created_utc < b.created_utc; });
    return posts;
}

std::vector<Post> filter_posts(const std::vector<Post>& posts, const TickerUniverse& universe,
                               const FilterConfig& config) {
    std::vector<Post> out;
    for (const auto& post : posts) {
        std::vector<std::string> kept;
        for (const auto& symbol : post.tickers) {
            const TickerInfo* info = universe.find(symbol);
            if (info == nullptr || info->blocked || config.extra_blocked.count(symbol) > 0) continue;
            if (config.exchange_filter && info->exchange == Exchange::kOther) continue;
            kept.push_back(symbol);
        }
        if (kept.size() != config.required_ticker_count) continue;
        Post copy = post;
        copy.tickers = std::move(kept);
        out.push_back(std::move(copy));
    }
    return out;
}

int align_to_trading_day(std::int64_t created_utc, const TradingCalendar& calendar) {
    if (calendar.empty()) throw Error(ErrorKind::kValidation, "trading calendar is empty");
    const auto& closes = calendar.closes_utc();
    // A post more than a week before the first close has no session in view.
    if (created_utc < closes.front() - 7 * 86400) {
        throw Error(ErrorKind::kOutOfRange, "timestamp " + std::to_string(created_utc) + " precedes the trading calendar");
    }
    auto it = std::lower_bound(closes.begin(), closes.end(), created_utc);
    if (it == closes.end()) {
        throw Error(ErrorKind::kOutOfRange,
                    "timestamp " + std::to_string(created_utc) + " is after the last calendar close");
    }
    return static_cast<int>(it - closes.begin());
}

std::vector<Post> align_posts(std::vector<Post> posts, const TradingCalendar& calendar, std::size_t* dropped) {
    std::vector<Post> out;
    out.reserve(posts.size());
    std::size_t n_dropped = 0;
    for (auto& p : posts) {
        try {
            p.trading_day = align_to_trading_day(p.created_utc, calendar);
            out.push_back(std::move(p));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::kOutOfRange) throw;
            ++n_dropped;
        }
    }
    if (dropped != nullptr) *dropped = n_dropped;
    return out;
}

Post annotate_dd_features(Post post, const std::vector<CommentEvent>& comments) {
    if (!post.is_dd) throw Error(ErrorKind::kValidation, "post " + post.id + " is not a DD post");
    int count = 1;
    int max_depth = 0;
    for (const auto& c : comments) {
        if (c.depth < 0) {
            throw Error(ErrorKind::kValidation, "post " + post.id + ": negative comment depth " + std::to_string(c.depth));
        }
        const std::int64_t age = c.created_utc - post.created_utc;
        if (age < 0 || age > kDdCommentWindowSeconds) continue;
        ++count;
        max_depth = std::max(max_depth, c.depth);
    }
    post.num_comments = count;
    post.max_comment_depth = max_depth;
    post.normalized_depth = normalize_depth(max_depth, count);
    post.contains_url = contains_non_image_url(post.text());
    return post;
}

std::map<std::string, std::vector<CommentEvent>> load_comments(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kIo, "cannot open comments file " + path.string());
    std::map<std::string, std::vector<CommentEvent>> out;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json obj = json::parse(line);
            CommentEvent c{obj.at("created_utc").get<std::int64_t>(), obj.at("depth").get<int>()};
            out[obj.at("post_id").get<std::string>()].push_back(c);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::kSchema, "comments line " + std::to_string(line_number) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace fq
