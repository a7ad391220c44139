#include <algorithm>
#include <cmath>
#include <set>

#include "forumquant/networks.hpp"

namespace fq {

const char* to_string(GraphKind kind) {
    return kind == GraphKind::kTopic ? "topic" : "submission";
}

namespace {

// Post counts per ticker; only tickers reaching `min_mentions` survive.
std::map<std::string, std::size_t> mention_counts(const std::vector<Post>& posts, std::size_t min_mentions) {
    std::map<std::string, std::size_t> counts;
    for (const auto& p : posts) {
        for (const auto& t : p.tickers) ++counts[t];
    }
    std::erase_if(counts, [&](const auto& kv) { return kv.second < min_mentions; });
    return counts;
}

}  // namespace

AssetGraph build_submission_network(const std::vector<Post>& posts, std::size_t min_mentions, double threshold) {
    const auto counts = mention_counts(posts, min_mentions);
    std::map<std::string, std::set<std::string>> authors;
    for (const auto& [t, n] : counts) authors[t];
    for (const auto& p : posts) {
        for (const auto& t : p.tickers) {
            auto it = authors.find(t);
            if (it != authors.end()) it->second.insert(p.author_id);
        }
    }

    AssetGraph g;
    g.provenance = GraphKind::kSubmission;
    std::vector<const std::set<std::string>*> sets;
    for (const auto& [t, s] : authors) {
        g.nodes.push_back(t);
        sets.push_back(&s);
    }
    for (std::size_t a = 0; a < sets.size(); ++a) {
        for (std::size_t b = a + 1; b < sets.size(); ++b) {
            const auto& ua = *sets[a];
            const auto& ub = *sets[b];
            if (ua.empty() || ub.empty()) continue;
            std::size_t shared = 0;
            for (const auto& u : ua) shared += ub.count(u);
            if (shared == 0) continue;
            const double ab = static_cast<double>(shared) / static_cast<double>(ua.size());
            const double ba = static_cast<double>(shared) / static_cast<double>(ub.size());
            const double w = (ab >= threshold ? ab : 0.0) + (ba >= threshold ? ba : 0.0);
            if (w > 0.0) g.edges.push_back({a, b, w});
        }
    }
    return g;
}

AssetGraph build_topic_network(const std::vector<Post>& posts, std::size_t min_mentions, double similarity_threshold,
                               std::vector<std::string>* excluded) {
    const auto counts = mention_counts(posts, min_mentions);
    std::map<std::string, std::map<int, double>> profiles;
    for (const auto& p : posts) {
        if (!p.topic_id) continue;
        for (const auto& t : p.tickers) {
            if (counts.count(t)) profiles[t][*p.topic_id] += 1.0;
        }
    }
    if (excluded != nullptr) excluded->clear();

    AssetGraph g;
    g.provenance = GraphKind::kTopic;
    std::vector<std::map<int, double>> vecs;
    for (const auto& [t, n] : counts) {
        auto it = profiles.find(t);
        if (it == profiles.end()) {
            if (excluded != nullptr) excluded->push_back(t);
            continue;
        }
        double total = 0.0;
        for (const auto& [k, c] : it->second) total += c;
        for (auto& [k, c] : it->second) c /= total;
        g.nodes.push_back(t);
        vecs.push_back(it->second);
    }
    std::vector<double> norms;
    for (const auto& v : vecs) {
        double s = 0.0;
        for (const auto& [k, x] : v) s += x * x;
        norms.push_back(std::sqrt(s));
    }
    for (std::size_t a = 0; a < vecs.size(); ++a) {
        for (std::size_t b = a + 1; b < vecs.size(); ++b) {
            double dot = 0.0;
            for (const auto& [k, x] : vecs[a]) {
                auto it = vecs[b].find(k);
                if (it != vecs[b].end()) dot += x * it->second;
            }
            const double cosine = std::min(1.0, dot / (norms[a] * norms[b]));
            if (cosine > 0.0 && cosine >= similarity_threshold) g.edges.push_back({a, b, cosine});
        }
    }
    return g;
}

}  // namespace fq
