#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mlst/errors.hpp"
#include "mlst/rational.hpp"

namespace mlst {

using Vertex = int;
using EdgeId = int;

struct Edge {
    Vertex u = 0;  // u < v after normalization
    Vertex v = 0;
    Rat cost;
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    // Returns false if already joined.
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

}  // namespace detail

// Immutable undirected graph with positive edge costs. Edge ids are indices
// into the edge list in construction order. Self-loops, duplicate edges,
// out-of-range endpoints and non-positive costs are rejected up front;
// connectivity is checked per use, not here.
class WeightedGraph {
public:
    WeightedGraph(int vertex_count, std::vector<Edge> edges)
        : n_(vertex_count), edges_(std::move(edges)) {
        if (n_ <= 0) throw data_error("graph: vertex count must be positive");
        adjacency_.resize(n_);
        for (EdgeId id = 0; id < static_cast<EdgeId>(edges_.size()); ++id) {
            Edge& e = edges_[id];
            if (e.u > e.v) std::swap(e.u, e.v);
            if (e.u < 0 || e.v >= n_)
                throw data_error("graph: edge endpoint out of range: " + std::to_string(e.u) +
                                 "-" + std::to_string(e.v));
            if (e.u == e.v) throw data_error("graph: self-loop at vertex " + std::to_string(e.u));
            if (!(Rat(0) < e.cost))
                throw data_error("graph: non-positive cost on edge " + std::to_string(e.u) + "-" +
                                 std::to_string(e.v));
            auto [it, fresh] = index_.emplace(std::make_pair(e.u, e.v), id);
            if (!fresh)
                throw data_error("graph: duplicate edge " + std::to_string(e.u) + "-" +
                                 std::to_string(e.v));
            adjacency_[e.u].push_back({e.v, id});
            adjacency_[e.v].push_back({e.u, id});
        }
    }

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(EdgeId id) const { return edges_.at(id); }

    // Neighbors of v as (other endpoint, edge id), in edge-id insertion order.
    const std::vector<std::pair<Vertex, EdgeId>>& neighbors(Vertex v) const {
        return adjacency_.at(v);
    }

    std::optional<EdgeId> find_edge(Vertex a, Vertex b) const {
        if (a > b) std::swap(a, b);
        auto it = index_.find({a, b});
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    Vertex other_end(EdgeId id, Vertex from) const {
        const Edge& e = edge(id);
        return e.u == from ? e.v : e.u;
    }

    bool connected() const {
        if (n_ == 0) return true;
        detail::UnionFind uf(n_);
        int components = n_;
        for (const Edge& e : edges_)
            if (uf.unite(e.u, e.v)) --components;
        return components == 1;
    }

    // True if every vertex in `vertices` lies in one connected component of
    // the subgraph induced by `subset`.
    bool connects(std::span<const EdgeId> subset, std::span<const Vertex> vertices) const {
        if (vertices.size() <= 1) return true;
        detail::UnionFind uf(n_);
        for (EdgeId id : subset) uf.unite(edges_[id].u, edges_[id].v);
        int root = uf.find(vertices.front());
        for (Vertex v : vertices)
            if (uf.find(v) != root) return false;
        return true;
    }

private:
    int n_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<Vertex, EdgeId>>> adjacency_;
    std::map<std::pair<Vertex, Vertex>, EdgeId> index_;
};

// An MLST instance: graph plus nested terminal sets, index 0 = level 1
// (bottom, largest set), index levels()-1 = top. Terminal lists are kept
// sorted ascending. Construct freely; validate_instance reports problems.
struct MlstInstance {
    WeightedGraph graph;
    std::vector<std::vector<Vertex>> terminals;

    int levels() const { return static_cast<int>(terminals.size()); }
    // 1-based level accessor matching the usual convention.
    const std::vector<Vertex>& terminals_at(int level) const { return terminals.at(level - 1); }
};

struct Violation {
    std::string invariant;  // short machine-checkable tag
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

// Checks nesting, non-emptiness, vertex range and graph connectivity.
// Violations are data, not exceptions.
inline ValidationReport validate_instance(const MlstInstance& inst) {
    ValidationReport report;
    auto add = [&](std::string tag, std::string detail) {
        report.violations.push_back({std::move(tag), std::move(detail)});
    };
    int ell = inst.levels();
    if (ell < 1) {
        add("level count", "instance needs at least one level");
        return report;
    }
    for (int i = 1; i <= ell; ++i) {
        const auto& t = inst.terminals_at(i);
        if (t.empty()) add("empty level", "terminal set at level " + std::to_string(i) + " is empty");
        for (Vertex v : t)
            if (v < 0 || v >= inst.graph.vertex_count())
                add("vertex out of range", "terminal " + std::to_string(v) + " at level " +
                                               std::to_string(i) + " exceeds vertex count " +
                                               std::to_string(inst.graph.vertex_count()));
    }
    for (int i = 1; i < ell; ++i) {
        std::vector<Vertex> lower = inst.terminals_at(i);
        std::vector<Vertex> upper = inst.terminals_at(i + 1);
        std::sort(lower.begin(), lower.end());
        std::sort(upper.begin(), upper.end());
        if (!std::includes(lower.begin(), lower.end(), upper.begin(), upper.end()))
            add("nesting", "T" + std::to_string(i + 1) + " is not a subset of T" + std::to_string(i));
    }
    if (!inst.graph.connected()) add("not connected", "graph is not connected");
    return report;
}

// Nested per-level edge sets, index 0 = level 1. Each list sorted ascending.
struct MlstSolution {
    std::vector<std::vector<EdgeId>> edge_sets;

    int levels() const { return static_cast<int>(edge_sets.size()); }
    const std::vector<EdgeId>& level(int i) const { return edge_sets.at(i - 1); }
};

// Checks E_{i+1} subset of E_i and that level i connects terminals T_i.
inline ValidationReport check_solution(const MlstInstance& inst, const MlstSolution& sol) {
    ValidationReport report;
    auto add = [&](std::string tag, std::string detail) {
        report.violations.push_back({std::move(tag), std::move(detail)});
    };
    if (sol.levels() != inst.levels()) {
        add("level count", "solution has " + std::to_string(sol.levels()) + " levels, instance " +
                               std::to_string(inst.levels()));
        return report;
    }
    for (int i = 1; i <= sol.levels(); ++i) {
        for (EdgeId id : sol.level(i))
            if (id < 0 || id >= inst.graph.edge_count()) {
                add("edge out of range", "edge id " + std::to_string(id) + " at level " + std::to_string(i));
                return report;
            }
    }
    for (int i = 1; i < sol.levels(); ++i) {
        std::vector<EdgeId> lower = sol.level(i);
        std::vector<EdgeId> upper = sol.level(i + 1);
        std::sort(lower.begin(), lower.end());
        std::sort(upper.begin(), upper.end());
        if (!std::includes(lower.begin(), lower.end(), upper.begin(), upper.end()))
            add("nesting", "E" + std::to_string(i + 1) + " is not a subset of E" + std::to_string(i));
    }
    for (int i = 1; i <= sol.levels(); ++i)
        if (!inst.graph.connects(sol.level(i), inst.terminals_at(i)))
            add("spanning", "level " + std::to_string(i) + " does not connect its terminals");
    return report;
}

// Highest level each edge appears in; 0 when absent from level 1.
struct EdgeLevelMap {
    std::vector<int> level_of;  // indexed by edge id

    int at(EdgeId id) const { return level_of.at(id); }
};

inline EdgeLevelMap edge_level_map(const MlstSolution& sol, int edge_count) {
    EdgeLevelMap map;
    map.level_of.assign(edge_count, 0);
    for (int i = 1; i <= sol.levels(); ++i)
        for (EdgeId id : sol.level(i)) map.level_of.at(id) = std::max(map.level_of.at(id), i);
    return map;
}

// Total cost summed per level. Rejects solutions that fail nesting or
// spanning. solution_cost_by_level_map computes the same value through the
// L(e) identity; the two are cross-checked in tests.
inline Rat solution_cost(const MlstInstance& inst, const MlstSolution& sol) {
    ValidationReport report = check_solution(inst, sol);
    if (!report.ok())
        throw data_error("solution_cost: invalid solution: " + report.violations.front().invariant +
                         " (" + report.violations.front().detail + ")");
    Rat total;
    for (int i = 1; i <= sol.levels(); ++i)
        for (EdgeId id : sol.level(i)) total += inst.graph.edge(id).cost;
    return total;
}

inline Rat solution_cost_by_level_map(const MlstInstance& inst, const MlstSolution& sol) {
    EdgeLevelMap map = edge_level_map(sol, inst.graph.edge_count());
    Rat total;
    for (EdgeId id = 0; id < inst.graph.edge_count(); ++id)
        total += Rat(map.at(id)) * inst.graph.edge(id).cost;
    return total;
}

namespace detail {

inline std::vector<EdgeId> sorted_unique(std::vector<EdgeId> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace detail

}  // namespace mlst
