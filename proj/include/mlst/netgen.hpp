#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mlst/graph.hpp"

namespace mlst {

// splitmix64, used for seeding and seed mixing.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256** seeded through splitmix64. Uniform integers by rejection, so
// draws are exactly uniform; the stream is stable within this code base.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw data_error("rng: empty range");
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

    // Independent child stream; used to restart generation attempts.
    Rng spawn() { return Rng(next()); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

namespace detail {

inline WeightedGraph graph_from_pairs(int n, std::vector<std::pair<Vertex, Vertex>> pairs) {
    for (auto& [u, v] : pairs)
        if (u > v) std::swap(u, v);
    std::sort(pairs.begin(), pairs.end());
    std::vector<Edge> edges;
    edges.reserve(pairs.size());
    for (auto [u, v] : pairs) edges.push_back({u, v, Rat(1)});
    return WeightedGraph(n, std::move(edges));
}

constexpr int kConnectivityRetries = 1000;

}  // namespace detail

inline double er_edge_probability(int n, double epsilon) {
    double p = (1.0 + epsilon) * std::log(static_cast<double>(n)) / static_cast<double>(n);
    return p > 1.0 ? 1.0 : p;
}

// Erdos-Renyi G(n, p) with p = (1+eps) ln(n)/n, regenerated on a fresh
// substream until connected.
inline WeightedGraph gen_er(int n, double epsilon, Rng& rng) {
    if (n < 2 || epsilon <= 0) throw data_error("gen_er: need n >= 2 and epsilon > 0");
    double p = er_edge_probability(n, epsilon);
    for (int attempt = 0; attempt < detail::kConnectivityRetries; ++attempt) {
        Rng child = rng.spawn();
        std::vector<std::pair<Vertex, Vertex>> pairs;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v)
                if (child.bernoulli(p)) pairs.push_back({u, v});
        WeightedGraph g = detail::graph_from_pairs(n, std::move(pairs));
        if (g.connected()) return g;
    }
    throw guard_error("gen_er: connectivity retry cap reached");
}

// Watts-Strogatz ring lattice of even degree K with rewiring probability
// beta; rewiring keeps the edge count and avoids self-loops and duplicates.
inline WeightedGraph gen_ws(int n, int k, double beta, Rng& rng) {
    if (k < 2 || k % 2 != 0 || k >= n) throw data_error("gen_ws: need even K with 2 <= K < n");
    if (beta < 0.0 || beta > 1.0) throw data_error("gen_ws: beta outside [0,1]");
    for (int attempt = 0; attempt < detail::kConnectivityRetries; ++attempt) {
        Rng child = rng.spawn();
        std::vector<std::pair<Vertex, Vertex>> edges;
        std::vector<std::set<Vertex>> adj(n);
        auto link = [&](Vertex a, Vertex b) {
            adj[a].insert(b);
            adj[b].insert(a);
        };
        for (int j = 1; j <= k / 2; ++j)
            for (Vertex v = 0; v < n; ++v) {
                Vertex w = (v + j) % n;
                edges.push_back({v, w});
                link(v, w);
            }
        for (auto& [u, v] : edges) {
            if (!child.bernoulli(beta)) continue;
            if (static_cast<int>(adj[u].size()) >= n - 1) continue;  // nowhere to go
            for (;;) {
                Vertex w = static_cast<Vertex>(child.below(static_cast<std::uint64_t>(n)));
                if (w == u || adj[u].count(w)) continue;
                adj[u].erase(v);
                adj[v].erase(u);
                link(u, w);
                v = w;
                break;
            }
        }
        WeightedGraph g = detail::graph_from_pairs(n, std::move(edges));
        if (g.connected()) return g;
    }
    throw guard_error("gen_ws: connectivity retry cap reached");
}

// Barabasi-Albert preferential attachment: ring seed on m0 vertices, then
// each arrival attaches m distinct edges with probability proportional to
// current degree. Edge count is exactly m0 + m*(n - m0).
inline WeightedGraph gen_ba(int n, int m0, int m, Rng& rng) {
    if (m < 1 || m > m0 || m0 >= n) throw data_error("gen_ba: need 1 <= m <= m0 < n");
    if (m0 < 3) throw data_error("gen_ba: seed ring needs m0 >= 3");
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::vector<int> degree(n, 0);
    std::vector<std::set<Vertex>> adj(n);
    auto link = [&](Vertex a, Vertex b) {
        edges.push_back({a, b});
        ++degree[a];
        ++degree[b];
        adj[a].insert(b);
        adj[b].insert(a);
    };
    for (Vertex v = 0; v < m0; ++v) link(v, (v + 1) % m0);
    for (Vertex v = m0; v < n; ++v) {
        std::vector<Vertex> chosen;
        std::uint64_t total = 2ull * edges.size();
        while (static_cast<int>(chosen.size()) < m) {
            std::uint64_t r = rng.below(total);
            Vertex target = 0;
            std::uint64_t acc = 0;
            for (Vertex w = 0; w < v; ++w) {
                acc += static_cast<std::uint64_t>(degree[w]);
                if (r < acc) {
                    target = w;
                    break;
                }
            }
            bool dup = false;
            for (Vertex w : chosen)
                if (w == target) dup = true;
            if (!dup) chosen.push_back(target);
        }
        for (Vertex w : chosen) link(v, w);
    }
    return detail::graph_from_pairs(n, std::move(edges));
}

// Fresh copy of the graph with i.i.d. integer weights uniform on 1..10.
inline WeightedGraph assign_weights(const WeightedGraph& g, Rng& rng) {
    std::vector<Edge> edges = g.edges();
    for (Edge& e : edges) e.cost = Rat(1 + static_cast<long long>(rng.below(10)));
    return WeightedGraph(g.vertex_count(), std::move(edges));
}

enum class Tsm { linear, exponential };

inline const char* to_string(Tsm t) { return t == Tsm::linear ? "linear" : "exponential"; }

inline std::vector<int> terminal_sizes(int n, int ell, Tsm tsm) {
    std::vector<int> sizes(ell);
    for (int i = 1; i <= ell; ++i) {
        if (tsm == Tsm::linear)
            sizes[i - 1] = static_cast<int>(static_cast<long long>(n) * (ell - i + 1) / (ell + 1));
        else
            sizes[i - 1] = static_cast<int>(static_cast<long long>(n) >> (i < 62 ? i : 62));  // floor(n / 2^i)
    }
    return sizes;
}

// Nested terminal sets, level i sampled uniformly without replacement from
// level i-1 (from V for i = 1). Linear sizes floor(n(ell-i+1)/(ell+1)),
// exponential sizes floor(n/2^i).
inline std::vector<std::vector<Vertex>> pick_terminals(const WeightedGraph& g, int ell, Tsm tsm,
                                                       Rng& rng) {
    if (ell < 1) throw data_error("pick_terminals: need at least one level");
    int n = g.vertex_count();
    std::vector<int> sizes = terminal_sizes(n, ell, tsm);
    if (sizes.back() < 1) throw data_error("pick_terminals: empty top level");

    std::vector<Vertex> parent(n);
    for (Vertex v = 0; v < n; ++v) parent[v] = v;
    std::vector<std::vector<Vertex>> out;
    out.reserve(ell);
    for (int i = 1; i <= ell; ++i) {
        int k = sizes[i - 1];
        std::vector<Vertex> pool = parent;
        for (int j = 0; j < k; ++j) {
            std::uint64_t r = rng.below(static_cast<std::uint64_t>(pool.size() - j));
            std::swap(pool[j], pool[j + r]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        out.push_back(pool);
        parent = std::move(pool);
    }
    return out;
}

enum class GraphModel { er, ws, ba };

inline const char* to_string(GraphModel m) {
    switch (m) {
        case GraphModel::er: return "er";
        case GraphModel::ws: return "ws";
        default: return "ba";
    }
}

struct GenSpec {
    GraphModel model = GraphModel::er;
    int n = 0;
    int ell = 1;
    Tsm tsm = Tsm::linear;
    std::uint64_t seed = 0;
    double er_epsilon = 1.0;
    int ws_k = 6;
    double ws_beta = 0.2;
    int ba_m0 = 10;
    int ba_m = 5;
    int max_edges = 0;  // 0 = unlimited; otherwise regenerate until |E| fits
};

inline MlstInstance generate_instance(const GenSpec& spec) {
    Rng rng(spec.seed);
    auto build = [&]() -> WeightedGraph {
        switch (spec.model) {
            case GraphModel::er: return gen_er(spec.n, spec.er_epsilon, rng);
            case GraphModel::ws: return gen_ws(spec.n, spec.ws_k, spec.ws_beta, rng);
            default: return gen_ba(spec.n, spec.ba_m0, spec.ba_m, rng);
        }
    };
    WeightedGraph topology = build();
    for (int attempt = 0; spec.max_edges > 0 && topology.edge_count() > spec.max_edges; ++attempt) {
        if (attempt >= detail::kConnectivityRetries)
            throw guard_error("generate_instance: edge budget retry cap reached");
        topology = build();
    }
    WeightedGraph weighted = assign_weights(topology, rng);
    std::vector<std::vector<Vertex>> terminals = pick_terminals(weighted, spec.ell, spec.tsm, rng);
    MlstInstance inst{std::move(weighted), std::move(terminals)};
    ValidationReport report = validate_instance(inst);
    if (!report.ok()) throw data_error("generate_instance: produced invalid instance");
    return inst;
}

}  // namespace mlst
