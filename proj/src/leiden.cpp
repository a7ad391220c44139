#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

#include "forumquant/errors.hpp"
#include "forumquant/networks.hpp"
#include "forumquant/rng.hpp"

namespace fq {

namespace {

// One level of the multilevel graph. Aggregated nodes carry their internal
// weight as `self_weight` (each undirected edge counted once).
struct LevelGraph {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // no self entries
    std::vector<double> self_weight;
    std::vector<double> degree;  // original-graph degree mass
    double two_m = 0.0;

    std::size_t size() const { return adj.size(); }
};

LevelGraph from_asset_graph(const AssetGraph& g) {
    LevelGraph lg;
    const std::size_t n = g.nodes.size();
    lg.adj.resize(n);
    lg.self_weight.assign(n, 0.0);
    lg.degree.assign(n, 0.0);
    for (const auto& e : g.edges) {
        lg.adj[e.a].emplace_back(e.b, e.weight);
        lg.adj[e.b].emplace_back(e.a, e.weight);
        lg.degree[e.a] += e.weight;
        lg.degree[e.b] += e.weight;
    }
    for (auto& row : lg.adj) std::sort(row.begin(), row.end());
    lg.two_m = std::accumulate(lg.degree.begin(), lg.degree.end(), 0.0);
    return lg;
}

// Community bookkeeping over the nodes of one level.
struct Partition {
    std::vector<std::size_t> community;  // node -> community id
    std::vector<double> total_degree;    // community -> sum of degrees
    std::vector<std::size_t> size;       // community -> node count
    std::vector<std::size_t> empty_ids;  // free community ids

    explicit Partition(const LevelGraph& g, std::vector<std::size_t> initial) : community(std::move(initial)) {
        const std::size_t n = g.size();
        total_degree.assign(n, 0.0);
        size.assign(n, 0);
        for (std::size_t v = 0; v < n; ++v) {
            total_degree[community[v]] += g.degree[v];
            ++size[community[v]];
        }
        for (std::size_t c = n; c-- > 0;) {
            if (size[c] == 0) empty_ids.push_back(c);
        }
    }

    void move(std::size_t v, std::size_t to, double k_v) {
        const std::size_t from = community[v];
        if (from == to) return;
        total_degree[from] -= k_v;
        if (--size[from] == 0) {
            total_degree[from] = 0.0;
            empty_ids.push_back(from);
        }
        if (size[to] == 0) {
            auto it = std::find(empty_ids.begin(), empty_ids.end(), to);
            if (it != empty_ids.end()) empty_ids.erase(it);
        }
        total_degree[to] += k_v;
        ++size[to];
        community[v] = to;
    }
};

constexpr double kGainEps = 1e-12;

// Queue-based local moving. Each node moves to the community with the
// largest strictly positive improvement; ties go to the lowest id.
bool move_nodes_fast(const LevelGraph& g, Partition& part, double gamma, SeededRng& rng) {
    const std::size_t n = g.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    std::deque<std::size_t> queue(order.begin(), order.end());
    std::vector<char> queued(n, 1);
    std::vector<double> w_to(n, 0.0);
    std::vector<std::size_t> touched;
    bool any_move = false;

    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        queued[v] = 0;
        const std::size_t current = part.community[v];
        const double k_v = g.degree[v];

        touched.clear();
        for (const auto& [u, w] : g.adj[v]) {
            const std::size_t c = part.community[u];
            if (w_to[c] == 0.0) touched.push_back(c);
            w_to[c] += w;
        }
        const double k_current_without_v = part.total_degree[current] - k_v;
        const double stay_gain = w_to[current] - gamma * k_v * k_current_without_v / g.two_m;

        double best_gain = stay_gain;
        std::size_t best = current;
        std::sort(touched.begin(), touched.end());
        for (std::size_t c : touched) {
            if (c == current) continue;
            const double gain = w_to[c] - gamma * k_v * part.total_degree[c] / g.two_m;
            if (gain > best_gain + kGainEps) {
                best_gain = gain;
                best = c;
            }
        }
        // Moving out to a fresh community has zero gain.
        if (part.size[current] > 1 && 0.0 > best_gain + kGainEps && !part.empty_ids.empty()) {
            best = *std::min_element(part.empty_ids.begin(), part.empty_ids.end());
            best_gain = 0.0;
        }
        for (std::size_t c : touched) w_to[c] = 0.0;

        if (best != current) {
            part.move(v, best, k_v);
            any_move = true;
            for (const auto& [u, w] : g.adj[v]) {
                if (!queued[u] && part.community[u] != best) {
                    queued[u] = 1;
                    queue.push_back(u);
                }
            }
        }
    }
    return any_move;
}

// Refinement: inside each community, merge singleton, well-connected nodes
// into well-connected sub-communities, picking randomly with probability
// proportional to exp(gain / randomness) among non-negative gains.
std::vector<std::size_t> refine_partition(const LevelGraph& g, const Partition& part, double gamma,
                                          double randomness, SeededRng& rng) {
    const std::size_t n = g.size();
    std::vector<std::size_t> refined(n);
    std::iota(refined.begin(), refined.end(), std::size_t{0});
    std::vector<double> refined_degree = g.degree;
    std::vector<std::size_t> refined_size(n, 1);
    std::vector<double> external(n, 0.0);  // weight from refined community to rest of its parent

    std::vector<std::vector<std::size_t>> members(n);
    for (std::size_t v = 0; v < n; ++v) members[part.community[v]].push_back(v);
    for (std::size_t v = 0; v < n; ++v) {
        for (const auto& [u, w] : g.adj[v]) {
            if (part.community[u] == part.community[v]) external[v] += w;
        }
    }

    std::vector<double> w_to(n, 0.0);
    std::vector<std::size_t> touched;
    for (std::size_t c = 0; c < n; ++c) {
        auto& nodes = members[c];
        if (nodes.size() < 2) continue;
        const double K_c = part.total_degree[c];
        rng.shuffle(std::span<std::size_t>(nodes));
        for (std::size_t v : nodes) {
            if (refined_size[refined[v]] != 1) continue;
            const double k_v = g.degree[v];
            if (external[v] < gamma * k_v * (K_c - k_v) / g.two_m) continue;

            touched.clear();
            for (const auto& [u, w] : g.adj[v]) {
                if (part.community[u] != c) continue;
                const std::size_t r = refined[u];
                if (r == refined[v]) continue;
                if (w_to[r] == 0.0) touched.push_back(r);
                w_to[r] += w;
            }
            std::sort(touched.begin(), touched.end());
            std::vector<std::pair<std::size_t, double>> candidates;
            double max_gain = -std::numeric_limits<double>::infinity();
            for (std::size_t r : touched) {
                const double K_r = refined_degree[r];
                if (external[r] < gamma * K_r * (K_c - K_r) / g.two_m) continue;
                const double gain = w_to[r] - gamma * k_v * K_r / g.two_m;
                if (gain < 0.0) continue;
                candidates.emplace_back(r, gain);
                max_gain = std::max(max_gain, gain);
            }
            for (std::size_t r : touched) w_to[r] = 0.0;
            if (candidates.empty()) continue;

            std::size_t chosen = candidates.front().first;
            if (randomness > 0.0) {
                std::vector<double> cumulative;
                double total = 0.0;
                for (const auto& [r, gain] : candidates) {
                    total += std::exp((gain - max_gain) / randomness);
                    cumulative.push_back(total);
                }
                const double draw = rng.uniform() * total;
                const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), draw);
                chosen = candidates[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                                                          candidates.size() - 1)]
                             .first;
            } else {
                double best = -1.0;
                for (const auto& [r, gain] : candidates) {
                    if (gain > best) {
                        best = gain;
                        chosen = r;
                    }
                }
            }

            // Merge v into `chosen`.
            double w_v_chosen = 0.0;
            for (const auto& [u, w] : g.adj[v]) {
                if (refined[u] == chosen) w_v_chosen += w;
            }
            const std::size_t old = refined[v];
            external[chosen] = external[chosen] + external[v] - 2.0 * w_v_chosen;
            refined_degree[chosen] += k_v;
            ++refined_size[chosen];
            refined_degree[old] = 0.0;
            refined_size[old] = 0;
            external[old] = 0.0;
            refined[v] = chosen;
        }
    }
    return refined;
}

// Dense renumbering in order of first appearance.
std::vector<std::size_t> renumber(const std::vector<std::size_t>& labels, std::size_t* count) {
    std::vector<std::size_t> map(labels.size() + 1, SIZE_MAX);
    std::vector<std::size_t> out(labels.size());
    std::size_t next = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (map[labels[i]] == SIZE_MAX) map[labels[i]] = next++;
        out[i] = map[labels[i]];
    }
    if (count != nullptr) *count = next;
    return out;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<std::size_t>& groups, std::size_t n_groups) {
    LevelGraph agg;
    agg.adj.resize(n_groups);
    agg.self_weight.assign(n_groups, 0.0);
    agg.degree.assign(n_groups, 0.0);
    agg.two_m = g.two_m;
    std::vector<std::map<std::size_t, double>> rows(n_groups);
    for (std::size_t v = 0; v < g.size(); ++v) {
        const std::size_t gv = groups[v];
        agg.degree[gv] += g.degree[v];
        agg.self_weight[gv] += g.self_weight[v];
        for (const auto& [u, w] : g.adj[v]) {
            const std::size_t gu = groups[u];
            if (gu == gv) {
                if (u > v) agg.self_weight[gv] += w;
            } else {
                rows[gv][gu] += w;
            }
        }
    }
    for (std::size_t a = 0; a < n_groups; ++a) agg.adj[a].assign(rows[a].begin(), rows[a].end());
    return agg;
}

// Splits communities into connected components on the original graph.
std::vector<std::size_t> split_disconnected(const AssetGraph& graph, const std::vector<std::size_t>& membership) {
    const std::size_t n = graph.nodes.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : graph.edges) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    std::vector<std::size_t> out(n, SIZE_MAX);
    std::size_t next = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (out[s] != SIZE_MAX) continue;
        std::vector<std::size_t> stack{s};
        out[s] = next;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t u : adj[v]) {
                if (out[u] == SIZE_MAX && membership[u] == membership[s]) {
                    out[u] = next;
                    stack.push_back(u);
                }
            }
        }
        ++next;
    }
    return out;
}

std::vector<int> to_int(const std::vector<std::size_t>& v) {
    return std::vector<int>(v.begin(), v.end());
}

}  // namespace

int Clustering::community_count() const {
    return membership.empty() ? 0 : *std::max_element(membership.begin(), membership.end()) + 1;
}

double modularity(const AssetGraph& graph, const std::vector<int>& membership, double resolution) {
    if (membership.size() != graph.nodes.size()) {
        throw Error(ErrorKind::kValidation, "membership must label every node");
    }
    double two_m = 0.0;
    for (const auto& e : graph.edges) two_m += 2.0 * e.weight;
    if (!(two_m > 0.0)) return 0.0;
    const std::size_t n_comm =
        membership.empty() ? 0 : static_cast<std::size_t>(*std::max_element(membership.begin(), membership.end()) + 1);
    std::vector<double> internal(n_comm, 0.0), total(n_comm, 0.0);
    for (const auto& e : graph.edges) {
        const auto ca = static_cast<std::size_t>(membership[e.a]);
        const auto cb = static_cast<std::size_t>(membership[e.b]);
        total[ca] += e.weight;
        total[cb] += e.weight;
        if (ca == cb) internal[ca] += e.weight;
    }
    const double m = 0.5 * two_m;
    double q = 0.0;
    for (std::size_t c = 0; c < n_comm; ++c) {
        q += internal[c] / m - resolution * (total[c] / two_m) * (total[c] / two_m);
    }
    return q;
}

bool communities_connected(const AssetGraph& graph, const std::vector<int>& membership) {
    std::vector<std::size_t> labels(membership.begin(), membership.end());
    const auto split = split_disconnected(graph, labels);
    std::size_t a = 0, b = 0;
    renumber(labels, &a);
    renumber(split, &b);
    return a == b;
}

Clustering leiden(const AssetGraph& graph, const LeidenOptions& options) {
    const std::size_t n = graph.nodes.size();
    if (n == 0) throw Error(ErrorKind::kValidation, "leiden: graph has no nodes");
    Clustering result;
    result.seed = options.seed;
    result.resolution = options.resolution;

    std::vector<std::size_t> membership(n);
    std::iota(membership.begin(), membership.end(), std::size_t{0});
    const LevelGraph base = from_asset_graph(graph);
    if (!(base.two_m > 0.0)) {
        result.membership = to_int(membership);
        result.quality = 0.0;
        result.quality_trace = {0.0};
        return result;
    }

    SeededRng rng(options.seed);
    const double gamma = options.resolution;
    double quality = modularity(graph, to_int(membership), gamma);
    result.quality_trace.push_back(quality);

    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        LevelGraph g = base;
        std::vector<std::size_t> node_of(n);  // original node -> node of current level
        std::iota(node_of.begin(), node_of.end(), std::size_t{0});
        Partition part(g, membership);

        while (true) {
            move_nodes_fast(g, part, gamma, rng);
            std::size_t n_comm = 0;
            const auto comm = renumber(part.community, &n_comm);
            if (n_comm == g.size()) break;

            auto refined = refine_partition(g, part, gamma, options.randomness, rng);
            std::size_t n_refined = 0;
            refined = renumber(refined, &n_refined);
            if (n_refined == g.size()) {
                // No merge happened; aggregate by the moved partition to make progress.
                refined = comm;
                n_refined = n_comm;
            }
            std::vector<std::size_t> next_initial(n_refined);
            for (std::size_t v = 0; v < g.size(); ++v) next_initial[refined[v]] = comm[v];
            g = aggregate(g, refined, n_refined);
            for (auto& x : node_of) x = refined[x];
            part = Partition(g, next_initial);
        }

        std::vector<std::size_t> flat(n);
        for (std::size_t i = 0; i < n; ++i) flat[i] = part.community[node_of[i]];
        flat = split_disconnected(graph, renumber(flat, nullptr));
        flat = renumber(flat, nullptr);
        const double q = modularity(graph, to_int(flat), gamma);
        if (q > quality + 1e-14) {
            membership = std::move(flat);
            quality = q;
            result.quality_trace.push_back(q);
        } else {
            break;
        }
    }

    result.membership = to_int(renumber(membership, nullptr));
    result.quality = quality;
    return result;
}

}  // namespace fq
