#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>
#include <cmath>

#include "forumquant/civil_time.hpp"
#include "forumquant/corpus.hpp"
#include "forumquant/errors.hpp"
#include "forumquant/rng.hpp"
#include "test_util.hpp"

using namespace fq;

namespace {

TickerUniverse make_universe() {
    TickerUniverse u;
    u.entries["GME"] = {Exchange::kNyse, false, false};
    u.entries["AMC"] = {Exchange::kNyse, false, false};
    u.entries["AAPL"] = {Exchange::kNasdaq, false, false};
    u.entries["WISH"] = {Exchange::kNasdaq, true, false};
    u.entries["SI"] = {Exchange::kNyse, false, true};
    u.entries["OTCX"] = {Exchange::kOther, false, false};
    u.entries["SPY"] = {Exchange::kNyse, false, false};
    return u;
}

TradingCalendar march_2021() {
    std::vector<CivilDate> d;
    for (unsigned day = 1; day <= 12; ++day) {
        CivilDate c{2021, 3, day};
        if (c.weekday() != 0 && c.weekday() != 6) d.push_back(c);
    }
    return TradingCalendar(d);
}

Post post_with(std::vector<std::string> tickers) {
    Post p;
    p.id = "x";
    p.tickers = std::move(tickers);
    return p;
}

}  // namespace

TEST(ExtractTickers, CashtagRequiredSymbols) {
    const auto u = make_universe();
    EXPECT_EQ(extract_tickers("buying $WISH calls", u), std::vector<std::string>{"WISH"});
    EXPECT_TRUE(extract_tickers("I WISH I had sold", u).empty());
}

TEST(ExtractTickers, BlockedSymbolsNeverReturned) {
    const auto u = make_universe();
    EXPECT_TRUE(extract_tickers("SI is at 140%", u).empty());
    EXPECT_TRUE(extract_tickers("$SI is at 140%", u).empty());
}

TEST(ExtractTickers, WholeTokensDeduplicatedInOrder) {
    const auto u = make_universe();
    EXPECT_EQ(extract_tickers("GME, AMC and GME again; GMEX is not GME", u),
              (std::vector<std::string>{"GME", "AMC"}));
    EXPECT_TRUE(extract_tickers("AAPLE", u).empty());
    EXPECT_EQ(extract_tickers("(AAPL)", u), std::vector<std::string>{"AAPL"});
}

TEST(ExtractTickers, CaseStrictAndIdempotent) {
    const auto u = make_universe();
    SeededRng rng(5);
    const std::vector<std::string> words{"GME", "to", "the", "moon", "$WISH", "AMC", "SI", "AAPL", "WISH", "yolo"};
    for (int rep = 0; rep < 200; ++rep) {
        std::string text;
        for (int w = 0; w < 8; ++w) text += words[rng.below(words.size())] + " ";
        const auto found = extract_tickers(text, u);
        std::string joined;
        for (const auto& s : found) joined += s + " ";
        EXPECT_EQ(extract_tickers(joined, u).size() <= found.size(), true);
        std::string lower = text;
        std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
        EXPECT_TRUE(extract_tickers(lower, u).empty());
    }
}

TEST(LoadPosts, ComputesMissingTickersAndSorts) {
    testutil::TempDir dir;
    const auto path = dir.write(
        "posts.jsonl",
        R"({"id":"b","created_utc":200,"author_id":"u1","title":"GME to the moon","sentiment_label":"bullish","sentiment_score":0.7})"
        "\n"
        R"({"id":"a","created_utc":100,"author_id":"u2","title":"x","selftext":"see https://example.com/a","sentiment_label":"neutral","sentiment_score":0,"tickers":["AMC"],"word_count":7})"
        "\n");
    const auto posts = load_posts(path, make_universe());
    ASSERT_EQ(posts.size(), 2u);
    EXPECT_EQ(posts[0].id, "a");
    EXPECT_EQ(posts[0].tickers, std::vector<std::string>{"AMC"});
    EXPECT_EQ(posts[0].word_count, 7);
    EXPECT_TRUE(posts[0].contains_url);
    EXPECT_EQ(posts[1].tickers, extract_tickers("GME to the moon", make_universe()));
    EXPECT_EQ(posts[1].word_count, 4);
}

TEST(LoadPosts, PresentFieldsEchoed) {
    const auto p = parse_post_line(
        R"({"id":"q","created_utc":5,"author_id":"u","title":"t","selftext":"s","flair":"DD","sentiment_label":"bearish","sentiment_score":-0.25,"topic_id":3,"tickers":["AAPL"],"is_dd":true,"dd_label":"bearish","num_comments":9,"max_comment_depth":4,"contains_url":false,"word_count":321})",
        1, make_universe());
    EXPECT_EQ(p.id, "q");
    EXPECT_EQ(p.created_utc, 5);
    EXPECT_EQ(p.flair, std::optional<std::string>("DD"));
    EXPECT_EQ(p.sentiment_label, Sentiment::kBearish);
    EXPECT_DOUBLE_EQ(p.sentiment_score, -0.25);
    EXPECT_EQ(p.topic_id, std::optional<int>(3));
    EXPECT_EQ(p.tickers, std::vector<std::string>{"AAPL"});
    EXPECT_TRUE(p.is_dd);
    EXPECT_EQ(p.dd_label, std::optional<Sentiment>(Sentiment::kBearish));
    EXPECT_EQ(p.num_comments, 9);
    EXPECT_EQ(p.max_comment_depth, 4);
    EXPECT_FALSE(p.contains_url);
    EXPECT_EQ(p.word_count, 321);
    EXPECT_TRUE(p.flaired_dd());
}

TEST(LoadPosts, SchemaErrorsNameFieldAndLine) {
    testutil::TempDir dir;
    const auto path = dir.write(
        "posts.jsonl",
        R"({"id":"a","created_utc":1,"author_id":"u","sentiment_label":"bullish","sentiment_score":0.5})"
        "\n"
        R"({"id":"b","created_utc":2,"author_id":"u","sentiment_label":"sideways","sentiment_score":0.5})"
        "\n");
    try {
        load_posts(path, make_universe());
        FAIL() << "expected schema error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kSchema);
        const std::string msg = e.what();
        EXPECT_NE(msg.find("sentiment_label"), std::string::npos);
        EXPECT_NE(msg.find("line 2"), std::string::npos);
    }
}

TEST(LoadPosts, RejectsInconsistentRecords) {
    const auto u = make_universe();
    auto bad = [&](const std::string& line) {
        EXPECT_THROW(parse_post_line(line, 1, u), Error) << line;
    };
    bad(R"({"id":"a","created_utc":1,"author_id":"u","sentiment_label":"bullish","sentiment_score":-0.5})");
    bad(R"({"id":"a","created_utc":1,"author_id":"u","sentiment_label":"neutral","sentiment_score":0.1})");
    bad(R"({"id":"a","created_utc":1,"author_id":"u","sentiment_label":"bullish","sentiment_score":0.5,"tickers":["GME","GME"]})");
    bad(R"({"id":"a","created_utc":1,"author_id":"u","sentiment_label":"bullish","sentiment_score":0.5,"num_comments":0})");
    bad(R"({"id":"a","created_utc":1,"author_id":"u","sentiment_label":"bullish","sentiment_score":0.5,"colour":"red"})");
    bad(R"({"id":"a","created_utc":1,"sentiment_label":"bullish","sentiment_score":0.5})");
    bad(R"(not json)");
}

TEST(Universe, LoadsAndValidates) {
    testutil::TempDir dir;
    const auto ok = dir.write("u.csv", "symbol,exchange,requires_cashtag,blocked\nGME,nyse,false,false\nWISH,nasdaq,true,false\n");
    const auto u = load_universe(ok);
    ASSERT_NE(u.find("WISH"), nullptr);
    EXPECT_TRUE(u.find("WISH")->requires_cashtag);
    EXPECT_EQ(u.find("GME")->exchange, Exchange::kNyse);
    EXPECT_THROW(load_universe(dir.write("b.csv", "symbol,exchange,requires_cashtag,blocked\ngme,nyse,false,false\n")), Error);
    EXPECT_THROW(load_universe(dir.write("c.csv", "ticker,exchange\nGME,nyse\n")), Error);
}

TEST(FilterPosts, SingleTickerRule) {
    const auto u = make_universe();
    const std::vector<Post> posts{post_with({"GME"}), post_with({"GME", "AMC"}), post_with({"GME", "OTCX"}),
                                  post_with({"SI"}), post_with({"UNKNOWN", "AAPL"})};
    const auto kept = filter_posts(posts, u);
    ASSERT_EQ(kept.size(), 3u);
    EXPECT_EQ(kept[0].tickers, std::vector<std::string>{"GME"});
    EXPECT_EQ(kept[1].tickers, std::vector<std::string>{"GME"});
    EXPECT_EQ(kept[2].tickers, std::vector<std::string>{"AAPL"});
    for (const auto& p : kept) {
        ASSERT_NE(u.find(p.tickers[0]), nullptr);
        EXPECT_FALSE(u.find(p.tickers[0])->blocked);
    }
    FilterConfig no_exchange;
    no_exchange.exchange_filter = false;
    EXPECT_EQ(filter_posts(posts, u, no_exchange).size(), 2u);
}

TEST(FilterPosts, ExtraBlockedAndSubsequence) {
    const auto u = make_universe();
    std::vector<Post> posts;
    for (int i = 0; i < 20; ++i) {
        auto p = post_with(i % 3 == 0 ? std::vector<std::string>{"SPY"} : std::vector<std::string>{"GME"});
        p.id = std::to_string(i);
        posts.push_back(p);
    }
    FilterConfig cfg;
    cfg.extra_blocked = {"SPY"};
    const auto kept = filter_posts(posts, u, cfg);
    EXPECT_EQ(kept.size(), 13u);
    std::size_t j = 0;
    for (const auto& p : posts) {
        if (j < kept.size() && kept[j].id == p.id) ++j;
    }
    EXPECT_EQ(j, kept.size());
    EXPECT_EQ(filter_posts(posts, u).size(), 20u);
}

TEST(Align, MarketCloseRule) {
    const auto cal = march_2021();
    const auto idx = [&](CivilDate d) { return *cal.index_of(d); };
    EXPECT_EQ(align_to_trading_day(eastern_to_utc({2021, 3, 6}, 12), cal), idx({2021, 3, 8}));
    EXPECT_EQ(align_to_trading_day(eastern_to_utc({2021, 3, 2}, 10), cal), idx({2021, 3, 2}));
    EXPECT_EQ(align_to_trading_day(eastern_to_utc({2021, 3, 2}, 17), cal), idx({2021, 3, 3}));
    EXPECT_EQ(align_to_trading_day(eastern_to_utc({2021, 3, 2}, 16), cal), idx({2021, 3, 2}));
    EXPECT_THROW(align_to_trading_day(eastern_to_utc({2021, 3, 12}, 16, 0, 1), cal), Error);
}

TEST(Align, Monotone) {
    const auto cal = march_2021();
    SeededRng rng(9);
    const std::int64_t lo = eastern_to_utc({2021, 3, 1}, 0), hi = eastern_to_utc({2021, 3, 12}, 15);
    std::vector<std::int64_t> ts;
    for (int i = 0; i < 500; ++i) ts.push_back(lo + static_cast<std::int64_t>(rng.below(hi - lo)));
    std::sort(ts.begin(), ts.end());
    int prev = -1;
    for (auto t : ts) {
        const int d = align_to_trading_day(t, cal);
        EXPECT_GE(d, prev);
        prev = d;
    }
}

TEST(Align, DropsPostsOutsideCalendar) {
    const auto cal = march_2021();
    std::vector<Post> posts(3);
    posts[0].created_utc = eastern_to_utc({2021, 3, 3}, 9);
    posts[1].created_utc = eastern_to_utc({2021, 4, 3}, 9);
    posts[2].created_utc = eastern_to_utc({2020, 1, 3}, 9);
    std::size_t dropped = 0;
    const auto kept = align_posts(posts, cal, &dropped);
    EXPECT_EQ(kept.size(), 1u);
    EXPECT_EQ(dropped, 2u);
}

TEST(DdFeatures, Cascades) {
    Post p;
    p.id = "dd";
    p.is_dd = true;
    p.created_utc = 1000;
    const auto none = annotate_dd_features(p, {});
    EXPECT_EQ(none.num_comments, 1);
    EXPECT_EQ(none.normalized_depth, 0.0);

    const auto three = annotate_dd_features(p, {{1100, 1}, {2000, 1}, {50000, 2}});
    EXPECT_EQ(three.num_comments, 4);
    EXPECT_EQ(three.max_comment_depth, 2);
    EXPECT_DOUBLE_EQ(three.normalized_depth, 2.0 / std::log(4.0));

    const auto late = annotate_dd_features(p, {{1000 + 25 * 3600, 3}});
    EXPECT_EQ(late.num_comments, 1);
    EXPECT_EQ(late.max_comment_depth, 0);

    EXPECT_THROW(annotate_dd_features(p, {{1100, -1}}), Error);
    Post plain = p;
    plain.is_dd = false;
    EXPECT_THROW(annotate_dd_features(plain, {}), Error);
}

TEST(DdFeatures, UrlScanSkipsImages) {
    EXPECT_TRUE(contains_non_image_url("read https://www.sec.gov/x.htm now"));
    EXPECT_FALSE(contains_non_image_url("chart https://i.imgur.com/abc.png"));
    EXPECT_FALSE(contains_non_image_url("pic http://example.com/a.JPG"));
    EXPECT_FALSE(contains_non_image_url("no links here"));
}

TEST(CountWords, Whitespace) {
    EXPECT_EQ(count_words(""), 0);
    EXPECT_EQ(count_words("  one two\tthree\nfour "), 4);
}
