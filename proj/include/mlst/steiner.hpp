#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <span>
#include <vector>

#include "mlst/graph.hpp"

namespace mlst {

// Marks a set of edges as cost-free without touching the graph. Used by the
// top-down style passes that fix a higher-level tree and re-solve below it.
class WeightOverlay {
public:
    WeightOverlay() = default;
    static WeightOverlay none() { return WeightOverlay(); }
    static WeightOverlay zeroing(std::span<const EdgeId> edges, int edge_count) {
        WeightOverlay ov;
        ov.zeroed_.assign(edge_count, 0);
        for (EdgeId id : edges) ov.zeroed_.at(id) = 1;
        return ov;
    }

    bool is_zeroed(EdgeId id) const {
        return id >= 0 && id < static_cast<EdgeId>(zeroed_.size()) && zeroed_[id];
    }

    Rat effective_cost(const WeightedGraph& g, EdgeId id) const {
        return is_zeroed(id) ? Rat(0) : g.edge(id).cost;
    }

private:
    std::vector<char> zeroed_;
};

enum class SteinerMode { approx2, exact };

inline const char* to_string(SteinerMode m) { return m == SteinerMode::approx2 ? "approx2" : "exact"; }

struct SteinerResult {
    std::vector<EdgeId> edges;  // a tree spanning the requested terminals
    Rat cost;                   // under the effective (overlay) weights
    SteinerMode mode = SteinerMode::approx2;
};

namespace detail {

struct ShortestPaths {
    std::vector<Rat> dist;
    std::vector<char> reached;
    std::vector<EdgeId> pred_edge;    // -1 at source / unreached
    std::vector<Vertex> pred_vertex;  // -1 at source / unreached
};

// Dijkstra with deterministic tie-breaking: the queue pops by (dist, vertex)
// and among equal-length paths the smaller predecessor vertex id wins.
inline ShortestPaths dijkstra(const WeightedGraph& g, Vertex source, const WeightOverlay& overlay) {
    int n = g.vertex_count();
    ShortestPaths sp;
    sp.dist.assign(n, Rat(0));
    sp.reached.assign(n, 0);
    sp.pred_edge.assign(n, -1);
    sp.pred_vertex.assign(n, -1);
    std::vector<char> done(n, 0);

    using Entry = std::pair<Rat, Vertex>;
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.first != b.first) return b.first < a.first;
        return b.second < a.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    sp.reached[source] = 1;
    heap.push({Rat(0), source});
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (done[v]) continue;
        done[v] = 1;
        for (auto [w, id] : g.neighbors(v)) {
            Rat nd = d + overlay.effective_cost(g, id);
            if (!sp.reached[w] || nd < sp.dist[w]) {
                sp.reached[w] = 1;
                sp.dist[w] = nd;
                sp.pred_edge[w] = id;
                sp.pred_vertex[w] = v;
                heap.push({nd, w});
            } else if (!done[w] && nd == sp.dist[w] && v < sp.pred_vertex[w]) {
                sp.pred_edge[w] = id;
                sp.pred_vertex[w] = v;
            }
        }
    }
    return sp;
}

inline std::vector<Vertex> endpoints_of(const WeightedGraph& g, std::span<const EdgeId> edges) {
    std::vector<Vertex> vs;
    vs.reserve(edges.size() * 2);
    for (EdgeId id : edges) {
        vs.push_back(g.edge(id).u);
        vs.push_back(g.edge(id).v);
    }
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

}  // namespace detail

// Complete graph over the terminals weighted by shortest-path distances,
// with enough predecessor state to expand any closure edge back into a path.
struct MetricClosure {
    std::vector<Vertex> terminals;
    std::vector<std::vector<Rat>> dist;  // [i][j] over terminal indices
    std::vector<detail::ShortestPaths> trees;

    std::vector<EdgeId> path(int from_index, Vertex target) const {
        std::vector<EdgeId> edges;
        const auto& sp = trees.at(from_index);
        Vertex cur = target;
        while (sp.pred_edge.at(cur) != -1) {
            edges.push_back(sp.pred_edge[cur]);
            cur = sp.pred_vertex[cur];
        }
        return edges;
    }
};

inline MetricClosure metric_closure(const WeightedGraph& g, std::span<const Vertex> terminals,
                                    const WeightOverlay& overlay = WeightOverlay::none()) {
    if (terminals.empty()) throw data_error("metric closure: no terminals");
    if (!g.connected()) throw data_error("graph not connected");
    MetricClosure mc;
    mc.terminals.assign(terminals.begin(), terminals.end());
    std::sort(mc.terminals.begin(), mc.terminals.end());
    mc.terminals.erase(std::unique(mc.terminals.begin(), mc.terminals.end()), mc.terminals.end());
    int t = static_cast<int>(mc.terminals.size());
    mc.trees.reserve(t);
    for (Vertex src : mc.terminals) mc.trees.push_back(detail::dijkstra(g, src, overlay));
    mc.dist.assign(t, std::vector<Rat>(t));
    for (int i = 0; i < t; ++i)
        for (int j = 0; j < t; ++j) mc.dist[i][j] = mc.trees[i].dist[mc.terminals[j]];
    return mc;
}

// Minimal subtree of `tree` spanning keep_terminals plus the endpoints of
// the forced edges: repeatedly peels degree-1 vertices that are neither kept
// nor forced-edge endpoints. The forced edges themselves always survive.
inline std::vector<EdgeId> prune(const WeightedGraph& g, std::span<const EdgeId> tree,
                                 std::span<const Vertex> keep_terminals,
                                 std::span<const EdgeId> forced = {}) {
    std::vector<EdgeId> tree_sorted = detail::sorted_unique({tree.begin(), tree.end()});
    std::vector<Vertex> verts = detail::endpoints_of(g, tree_sorted);

    if (!tree_sorted.empty()) {
        detail::UnionFind uf(g.vertex_count());
        int merges = 0;
        for (EdgeId id : tree_sorted) {
            if (!uf.unite(g.edge(id).u, g.edge(id).v)) throw data_error("prune: input is not a tree");
            ++merges;
        }
        if (merges != static_cast<int>(verts.size()) - 1)
            throw data_error("prune: input is not a tree");
    }
    for (EdgeId id : forced)
        if (!std::binary_search(tree_sorted.begin(), tree_sorted.end(), id))
            throw data_error("prune: forced edge not in tree");

    std::vector<char> keep(g.vertex_count(), 0);
    for (Vertex v : keep_terminals) {
        if (v < 0 || v >= g.vertex_count()) throw data_error("prune: terminal out of range");
        keep[v] = 1;
    }
    for (EdgeId id : forced) {
        keep[g.edge(id).u] = 1;
        keep[g.edge(id).v] = 1;
    }
    if (tree_sorted.empty()) {
        // An empty tree spans at most one vertex.
        int kept = 0;
        for (char c : keep) kept += c;
        if (kept > 1) throw data_error("prune: terminals not in tree");
        return {};
    }
    {
        std::vector<char> in_tree(g.vertex_count(), 0);
        for (Vertex v : verts) in_tree[v] = 1;
        for (Vertex v = 0; v < g.vertex_count(); ++v)
            if (keep[v] && !in_tree[v]) throw data_error("prune: terminals not in tree");
    }

    std::vector<int> degree(g.vertex_count(), 0);
    std::vector<std::vector<EdgeId>> incident(g.vertex_count());
    std::vector<char> removed(g.edge_count(), 0);
    std::vector<char> present(g.edge_count(), 0);
    for (EdgeId id : tree_sorted) {
        present[id] = 1;
        ++degree[g.edge(id).u];
        ++degree[g.edge(id).v];
        incident[g.edge(id).u].push_back(id);
        incident[g.edge(id).v].push_back(id);
    }
    std::vector<Vertex> stack;
    for (Vertex v : verts)
        if (degree[v] == 1 && !keep[v]) stack.push_back(v);
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        if (degree[v] != 1 || keep[v]) continue;
        for (EdgeId id : incident[v]) {
            if (removed[id] || !present[id]) continue;
            removed[id] = 1;
            Vertex w = g.other_end(id, v);
            --degree[v];
            --degree[w];
            if (degree[w] == 1 && !keep[w]) stack.push_back(w);
        }
    }
    std::vector<EdgeId> out;
    for (EdgeId id : tree_sorted)
        if (!removed[id]) out.push_back(id);
    return out;
}

// Spanning tree of the subgraph `edges` that contains every forced edge.
// Kruskal over (effective cost, id) seeded with the forced set; this equals
// repeatedly deleting the costliest non-forced cycle edge, keeping the
// smaller ids on ties.
inline std::vector<EdgeId> force_tree(const WeightedGraph& g, std::span<const EdgeId> edges,
                                      std::span<const EdgeId> forced, const WeightOverlay& overlay) {
    std::vector<EdgeId> pool = detail::sorted_unique({edges.begin(), edges.end()});
    std::vector<EdgeId> forced_sorted = detail::sorted_unique({forced.begin(), forced.end()});
    for (EdgeId id : forced_sorted)
        if (!std::binary_search(pool.begin(), pool.end(), id))
            throw data_error("force_tree: forced edge not in edge set");

    detail::UnionFind uf(g.vertex_count());
    std::vector<EdgeId> result;
    for (EdgeId id : forced_sorted) {
        if (!uf.unite(g.edge(id).u, g.edge(id).v)) throw data_error("force_tree: forced edges contain a cycle");
        result.push_back(id);
    }
    std::vector<EdgeId> rest;
    for (EdgeId id : pool)
        if (!std::binary_search(forced_sorted.begin(), forced_sorted.end(), id)) rest.push_back(id);
    std::stable_sort(rest.begin(), rest.end(), [&](EdgeId a, EdgeId b) {
        Rat ca = overlay.effective_cost(g, a), cb = overlay.effective_cost(g, b);
        if (ca != cb) return ca < cb;
        return a < b;
    });
    for (EdgeId id : rest)
        if (uf.unite(g.edge(id).u, g.edge(id).v)) result.push_back(id);

    // Connectivity of the input on its own vertex set is a precondition.
    std::vector<Vertex> verts = detail::endpoints_of(g, pool);
    if (!verts.empty() && result.size() != verts.size() - 1)
        throw data_error("force_tree: edge set is not connected");
    return detail::sorted_unique(std::move(result));
}

// Classical metric-closure 2-approximation: MST of the closure, expanded to
// witness paths, re-treed and pruned back to the terminals.
inline SteinerResult steiner_2approx(const WeightedGraph& g, std::span<const Vertex> terminals,
                                     const WeightOverlay& overlay = WeightOverlay::none()) {
    if (terminals.empty()) throw data_error("steiner: no terminals");
    SteinerResult res;
    res.mode = SteinerMode::approx2;
    MetricClosure mc = metric_closure(g, terminals, overlay);
    int t = static_cast<int>(mc.terminals.size());
    if (t <= 1) return res;

    struct ClosureEdge {
        Rat d;
        int i, j;
    };
    std::vector<ClosureEdge> closure;
    closure.reserve(static_cast<size_t>(t) * (t - 1) / 2);
    for (int i = 0; i < t; ++i)
        for (int j = i + 1; j < t; ++j) closure.push_back({mc.dist[i][j], i, j});
    std::stable_sort(closure.begin(), closure.end(), [](const ClosureEdge& a, const ClosureEdge& b) {
        if (a.d != b.d) return a.d < b.d;
        return std::pair(a.i, a.j) < std::pair(b.i, b.j);
    });

    detail::UnionFind uf(t);
    std::vector<EdgeId> expanded;
    int picked = 0;
    for (const ClosureEdge& ce : closure) {
        if (picked == t - 1) break;
        if (!uf.unite(ce.i, ce.j)) continue;
        ++picked;
        auto path = mc.path(ce.i, mc.terminals[ce.j]);
        expanded.insert(expanded.end(), path.begin(), path.end());
    }
    std::vector<EdgeId> union_edges = detail::sorted_unique(std::move(expanded));
    std::vector<EdgeId> tree = force_tree(g, union_edges, {}, overlay);
    res.edges = prune(g, tree, mc.terminals);
    for (EdgeId id : res.edges) res.cost += overlay.effective_cost(g, id);
    return res;
}

namespace detail {

// Minimum spanning tree over the whole graph; exact when every vertex is a
// terminal. Kruskal by (effective cost, id).
inline SteinerResult mst_spanning_all(const WeightedGraph& g, const WeightOverlay& overlay) {
    SteinerResult res;
    res.mode = SteinerMode::exact;
    std::vector<EdgeId> ids(g.edge_count());
    std::iota(ids.begin(), ids.end(), 0);
    std::stable_sort(ids.begin(), ids.end(), [&](EdgeId a, EdgeId b) {
        Rat ca = overlay.effective_cost(g, a), cb = overlay.effective_cost(g, b);
        if (ca != cb) return ca < cb;
        return a < b;
    });
    UnionFind uf(g.vertex_count());
    for (EdgeId id : ids)
        if (uf.unite(g.edge(id).u, g.edge(id).v)) {
            res.edges.push_back(id);
            res.cost += overlay.effective_cost(g, id);
        }
    if (static_cast<int>(res.edges.size()) != g.vertex_count() - 1)
        throw data_error("graph not connected");
    std::sort(res.edges.begin(), res.edges.end());
    return res;
}

}  // namespace detail

// Exact Steiner tree by dynamic programming over terminal subsets
// (Dreyfus-Wagner with Dijkstra relaxations). Guarded to a configurable
// terminal count; the one big-instance shape that stays exact beyond the
// guard is terminals == V, which reduces to a minimum spanning tree.
inline SteinerResult steiner_exact(const WeightedGraph& g, std::span<const Vertex> terminals,
                                   const WeightOverlay& overlay = WeightOverlay::none(),
                                   int max_terminals = 14) {
    if (terminals.empty()) throw data_error("steiner: no terminals");
    if (!g.connected()) throw data_error("graph not connected");
    std::vector<Vertex> ts(terminals.begin(), terminals.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    int t = static_cast<int>(ts.size());
    SteinerResult res;
    res.mode = SteinerMode::exact;
    if (t <= 1) return res;
    if (t == g.vertex_count()) return detail::mst_spanning_all(g, overlay);
    if (t > max_terminals) throw guard_error("exact mode terminal limit");

    int n = g.vertex_count();
    int full = (1 << t) - 1;
    const Rat kInf = Rat(INT64_MAX / 4);
    std::vector<std::vector<Rat>> dp(static_cast<size_t>(full) + 1, std::vector<Rat>(n, kInf));

    // Parent choice per (mask, v): merge of two submasks at v, or an edge
    // step from a neighbor within the same mask.
    struct Choice {
        int kind = 0;  // 0 none, 1 merge, 2 edge
        int sub = 0;
        Vertex from = -1;
        EdgeId via = -1;
    };
    std::vector<std::vector<Choice>> parent(static_cast<size_t>(full) + 1, std::vector<Choice>(n));

    for (int i = 0; i < t; ++i) dp[1u << i][ts[i]] = Rat(0);

    using Entry = std::pair<Rat, Vertex>;
    auto heap_cmp = [](const Entry& a, const Entry& b) {
        if (a.first != b.first) return b.first < a.first;
        return b.second < a.second;
    };
    for (int mask = 1; mask <= full; ++mask) {
        auto& cur = dp[mask];
        for (int sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
            if (sub < (mask ^ sub)) continue;  // each split once
            const auto& a = dp[sub];
            const auto& b = dp[mask ^ sub];
            for (Vertex v = 0; v < n; ++v) {
                if (a[v] == kInf || b[v] == kInf) continue;
                Rat cand = a[v] + b[v];
                if (cand < cur[v]) {
                    cur[v] = cand;
                    parent[mask][v] = {1, sub, -1, -1};
                }
            }
        }
        std::priority_queue<Entry, std::vector<Entry>, decltype(heap_cmp)> heap(heap_cmp);
        for (Vertex v = 0; v < n; ++v)
            if (cur[v] != kInf) heap.push({cur[v], v});
        std::vector<char> done(n, 0);
        while (!heap.empty()) {
            auto [d, v] = heap.top();
            heap.pop();
            if (done[v] || d != cur[v]) continue;
            done[v] = 1;
            for (auto [w, id] : g.neighbors(v)) {
                Rat nd = d + overlay.effective_cost(g, id);
                if (nd < cur[w]) {
                    cur[w] = nd;
                    parent[mask][w] = {2, 0, v, id};
                    heap.push({nd, w});
                } else if (!done[w] && nd == cur[w] && parent[mask][w].kind == 2 &&
                           v < parent[mask][w].from) {
                    parent[mask][w] = {2, 0, v, id};
                }
            }
        }
    }

    std::vector<EdgeId> collected;
    std::vector<std::pair<int, Vertex>> work{{full, ts[0]}};
    while (!work.empty()) {
        auto [mask, v] = work.back();
        work.pop_back();
        const Choice& c = parent[mask][v];
        if (c.kind == 1) {
            work.push_back({c.sub, v});
            work.push_back({mask ^ c.sub, v});
        } else if (c.kind == 2) {
            collected.push_back(c.via);
            work.push_back({mask, c.from});
        }
    }
    std::vector<EdgeId> union_edges = detail::sorted_unique(std::move(collected));
    std::vector<EdgeId> tree = force_tree(g, union_edges, {}, overlay);
    res.edges = prune(g, tree, ts);
    for (EdgeId id : res.edges) res.cost += overlay.effective_cost(g, id);
    return res;
}

inline SteinerResult steiner_tree(const WeightedGraph& g, std::span<const Vertex> terminals,
                                  const WeightOverlay& overlay, SteinerMode mode,
                                  int max_exact_terminals = 14) {
    return mode == SteinerMode::exact ? steiner_exact(g, terminals, overlay, max_exact_terminals)
                                      : steiner_2approx(g, terminals, overlay);
}

}  // namespace mlst
