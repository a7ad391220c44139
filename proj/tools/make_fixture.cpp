// Writes the deterministic synthetic dataset used by the end-to-end tests:
// posts.jsonl, comments.jsonl, universe.csv, index.csv, vix.csv, prices/*.csv.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "forumquant/civil_time.hpp"
#include "forumquant/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Asset {
    const char* symbol;
    const char* exchange;
    bool cashtag;
    double beta;
    double idio;
    double start;
};

const Asset kAssets[] = {
    {"AAPL", "nasdaq", false, 1.1, 0.012, 150.0}, {"MSFT", "nasdaq", false, 0.9, 0.010, 210.0},
    {"TSLA", "nasdaq", false, 1.6, 0.030, 60.0},  {"GME", "nyse", false, 0.7, 0.045, 18.0},
    {"AMC", "nyse", false, 0.8, 0.045, 9.0},      {"BB", "nyse", false, 1.0, 0.030, 7.5},
    {"NOK", "nyse", false, 0.9, 0.022, 4.2},      {"F", "nyse", true, 1.2, 0.018, 9.8},
    {"AI", "nyse", true, 1.3, 0.035, 40.0},
};

std::string fmt(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void write_file(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << s;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: make_fixture <output-dir>\n";
        return 2;
    }
    const fs::path dir = argv[1];
    fs::create_directories(dir / "prices");
    fq::SeededRng rng(20240501);

    // Weekday sessions; a few closures.
    std::vector<fq::CivilDate> days;
    for (auto d = fq::CivilDate{2019, 6, 3}; d <= fq::CivilDate{2021, 12, 31}; d = d.plus_days(1)) {
        const unsigned wd = d.weekday();
        if (wd == 0 || wd == 6) continue;
        if ((d.month == 12 && d.day == 25) || (d.month == 1 && d.day == 1) || (d.month == 7 && d.day == 4)) continue;
        days.push_back(d);
    }

    std::vector<double> market(days.size());
    {
        double p = 280.0;
        std::string csv = "date,adjusted_close\n";
        for (std::size_t i = 0; i < days.size(); ++i) {
            if (i) p *= std::exp(0.0003 + 0.011 * rng.normal());
            market[i] = p;
            csv += days[i].to_string() + "," + fmt(p, 4) + "\n";
        }
        write_file(dir / "index.csv", csv);
    }
    {
        std::string csv = "date,adjusted_close\n";
        double v = 16.0;
        for (std::size_t i = 0; i < days.size(); ++i) {
            v = std::max(9.0, 16.0 + 0.97 * (v - 16.0) + 1.2 * rng.normal());
            csv += days[i].to_string() + "," + fmt(v, 2) + "\n";
        }
        write_file(dir / "vix.csv", csv);
    }
    for (const auto& a : kAssets) {
        std::string csv = "date,adjusted_close\n";
        double p = a.start;
        for (std::size_t i = 0; i < days.size(); ++i) {
            if (i) {
                const double rm = std::log(market[i] / market[i - 1]);
                p *= std::exp(a.beta * rm + a.idio * rng.normal());
            }
            // A short data gap for one ticker.
            if (std::string(a.symbol) == "BB" && i >= 300 && i < 303) continue;
            csv += days[i].to_string() + "," + fmt(p, 4) + "\n";
        }
        write_file(dir / "prices" / (std::string(a.symbol) + ".csv"), csv);
    }
    {
        std::string csv = "date,adjusted_close\n";
        for (std::size_t i = 0; i < days.size(); ++i) csv += days[i].to_string() + "," + fmt(market[i], 4) + "\n";
        write_file(dir / "prices" / "SPY.csv", csv);
    }

    std::string uni = "symbol,exchange,requires_cashtag,blocked\n";
    for (const auto& a : kAssets) {
        uni += std::string(a.symbol) + "," + a.exchange + "," + (a.cashtag ? "true" : "false") + ",false\n";
    }
    uni += "SPY,nyse,false,false\nYOLO,other,false,true\nDD,other,false,true\n";
    write_file(dir / "universe.csv", uni);

    // Posts: spread evenly over 29 months from 2019-07.
    const int n_posts = 500;
    const int n_months = 29;
    const int n_assets = static_cast<int>(std::size(kAssets));
    std::string posts_out, comments_out;
    int comment_id = 0;
    for (int i = 0; i < n_posts; ++i) {
        const int month_index = i % n_months;
        const int year = 2019 + (6 + month_index) / 12;
        const unsigned month = static_cast<unsigned>((6 + month_index) % 12 + 1);
        const unsigned day = static_cast<unsigned>(1 + rng.below(28));
        const int hour = static_cast<int>(rng.below(24));
        const int minute = static_cast<int>(rng.below(60));
        const std::int64_t created = fq::eastern_to_utc({year, month, day}, hour, minute, 0);

        // Authors cluster around groups of tickers.
        const int group = static_cast<int>(rng.below(3));
        const int author = group * 20 + static_cast<int>(rng.below(20));
        int asset;
        if (group == 0) {
            asset = static_cast<int>(rng.below(3));           // AAPL MSFT TSLA
        } else if (group == 1) {
            asset = 3 + static_cast<int>(rng.below(4));       // meme names
        } else {
            asset = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_assets)));
        }
        const Asset& a = kAssets[asset];
        std::string sym = a.cashtag ? "$" + std::string(a.symbol) : std::string(a.symbol);

        std::string title = sym + " thoughts for the week";
        const std::uint64_t variant = rng.below(20);
        if (variant == 0) title = sym + " and " + kAssets[(asset + 1) % n_assets].symbol + " both look stretched";
        if (variant == 1) title = "YOLO into " + sym;
        if (variant == 2) title = "Index check: SPY";

        json p;
        p["id"] = "p" + std::to_string(1000 + i);
        p["created_utc"] = created;
        p["author_id"] = "u" + std::to_string(author);
        p["title"] = title;

        const double u = rng.uniform();
        const double score = 0.05 + 0.9 * rng.uniform();
        if (u < 0.45) {
            p["sentiment_label"] = "bullish";
            p["sentiment_score"] = std::round(score * 1e4) / 1e4;
        } else if (u < 0.80) {
            p["sentiment_label"] = "bearish";
            p["sentiment_score"] = -std::round(score * 1e4) / 1e4;
        } else {
            p["sentiment_label"] = "neutral";
            p["sentiment_score"] = 0.0;
        }
        if (rng.uniform() < 0.92) p["topic_id"] = static_cast<int>((group * 2 + rng.below(3)) % 6);

        const bool dd = rng.uniform() < 0.2;
        std::string body = "Position update on " + sym + ". ";
        for (std::uint64_t w = 0, n = 5 + rng.below(40); w < n; ++w) body += "analysis ";
        if (dd) {
            p["is_dd"] = true;
            p["dd_label"] = rng.uniform() < 0.6 ? "bullish" : "bearish";
            if (rng.uniform() < 0.7) p["flair"] = rng.uniform() < 0.8 ? "DD" : "Due Diligence";
            if (rng.uniform() < 0.4) body += " Filing: https://www.sec.gov/filing" + std::to_string(i);
            if (rng.uniform() < 0.3) body += " Chart: https://i.imgur.com/x" + std::to_string(i) + ".png";
            for (std::uint64_t c = 0, n = rng.below(8); c < n; ++c) {
                json cm;
                cm["post_id"] = p["id"];
                cm["created_utc"] = created + static_cast<std::int64_t>(rng.below(40 * 3600));
                cm["depth"] = 1 + static_cast<int>(rng.below(5));
                comments_out += cm.dump() + "\n";
                ++comment_id;
            }
        } else if (rng.uniform() < 0.3) {
            p["flair"] = "Discussion";
        }
        p["selftext"] = body;
        posts_out += p.dump() + "\n";
    }
    write_file(dir / "posts.jsonl", posts_out);
    write_file(dir / "comments.jsonl", comments_out);
    std::cout << "wrote " << n_posts << " posts and " << comment_id << " comments to " << dir << "\n";
    return 0;
}
