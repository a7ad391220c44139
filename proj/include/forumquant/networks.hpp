#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "forumquant/corpus.hpp"
#include "forumquant/econometrics.hpp"
#include "forumquant/marketdata.hpp"

namespace fq {

enum class GraphKind { kTopic, kSubmission };
const char* to_string(GraphKind kind);

struct Edge {
    std::size_t a = 0;  // a < b
    std::size_t b = 0;
    double weight = 0.0;
};

// Weighted undirected ticker graph; nodes sorted by symbol.
struct AssetGraph {
    std::vector<std::string> nodes;
    std::vector<Edge> edges;  // sorted by (a, b), no self-loops, weight > 0
    GraphKind provenance = GraphKind::kSubmission;
};

// Shared-author network. For tickers A, B with author sets U_A, U_B the
// directed share |U_A & U_B| / |U_A| contributes to the undirected weight
// only when it reaches `threshold`. Tickers with fewer than `min_mentions`
// posts are dropped first.
AssetGraph build_submission_network(const std::vector<Post>& posts, std::size_t min_mentions = 150,
                                    double threshold = 0.2);

// Topic-profile network: each ticker's share of posts per topic; edge
// weight is the cosine similarity of two profiles, kept when >= threshold.
// Tickers without topic-labelled posts are skipped and listed in `excluded`.
AssetGraph build_topic_network(const std::vector<Post>& posts, std::size_t min_mentions = 150,
                               double similarity_threshold = 0.5, std::vector<std::string>* excluded = nullptr);

struct Clustering {
    std::vector<int> membership;  // per node, dense ids from 0
    double quality = 0.0;         // modularity at `resolution`
    std::uint64_t seed = 0;
    double resolution = 1.0;
    std::vector<double> quality_trace;  // modularity after each pass

    int community_count() const;
};

// Modularity with resolution: (1/2m) sum_ij [A_ij - gamma k_i k_j / 2m] delta(c_i, c_j).
double modularity(const AssetGraph& graph, const std::vector<int>& membership, double resolution = 1.0);

struct LeidenOptions {
    double resolution = 1.0;
    std::uint64_t seed = 0;
    double randomness = 0.01;  // temperature of the refinement merge step
    int max_iterations = 100;  // full passes; stops early once a pass does not improve quality
};

Clustering leiden(const AssetGraph& graph, const LeidenOptions& options = {});

// True when every community induces a connected subgraph.
bool communities_connected(const AssetGraph& graph, const std::vector<int>& membership);

}  // namespace fq
