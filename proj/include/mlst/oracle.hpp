#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mlst/graph.hpp"

namespace mlst {

struct OracleSteinerResult {
    Rat cost;
    std::vector<EdgeId> edges;
};

// Ground-truth Steiner cost by exhaustive edge-subset enumeration.
// Witness is the lexicographically smallest minimum-cost subset.
inline OracleSteinerResult oracle_steiner(const WeightedGraph& g, std::span<const Vertex> terminals) {
    if (g.edge_count() > 16) throw guard_error("oracle_steiner: edge bound exceeded");
    if (terminals.empty()) throw data_error("oracle_steiner: no terminals");
    int m = g.edge_count();
    std::vector<Vertex> ts(terminals.begin(), terminals.end());

    auto edges_of = [&](unsigned mask) {
        std::vector<EdgeId> ids;
        for (int e = 0; e < m; ++e)
            if (mask >> e & 1) ids.push_back(e);
        return ids;
    };

    std::optional<Rat> best;
    std::vector<EdgeId> witness;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        detail::UnionFind uf(g.vertex_count());
        Rat cost;
        for (int e = 0; e < m; ++e)
            if (mask >> e & 1) {
                uf.unite(g.edge(e).u, g.edge(e).v);
                cost += g.edge(e).cost;
            }
        if (best && *best < cost) continue;
        int root = uf.find(ts.front());
        bool ok = true;
        for (Vertex v : ts)
            if (uf.find(v) != root) {
                ok = false;
                break;
            }
        if (!ok) continue;
        std::vector<EdgeId> ids = edges_of(mask);
        if (!best || cost < *best || (cost == *best && ids < witness)) {
            best = cost;
            witness = std::move(ids);
        }
    }
    return {*best, std::move(witness)};
}

struct OracleMlstResult {
    Rat cost;
    MlstSolution solution;
};

// Exhaustive nested-edge-set optimum. Memoizes over (level, available edge
// mask); subsets that fail connectivity never spawn descendants.
inline OracleMlstResult oracle_mlst(const MlstInstance& inst) {
    const WeightedGraph& g = inst.graph;
    int m = g.edge_count();
    int ell = inst.levels();
    if (m > 10 || ell > 3) throw guard_error("oracle_mlst: size bound exceeded");
    ValidationReport report = validate_instance(inst);
    if (!report.ok()) throw data_error("oracle_mlst: invalid instance");

    unsigned full = (1u << m) - 1;
    std::vector<Rat> mask_cost(full + 1);
    for (unsigned mask = 1; mask <= full; ++mask) {
        unsigned low = mask & (mask - 1);
        int e = __builtin_ctz(mask);
        mask_cost[mask] = mask_cost[low] + g.edge(e).cost;
    }
    // connects[i][mask]: does `mask` connect the level-(i+1) terminals?
    std::vector<std::vector<char>> connects(ell, std::vector<char>(full + 1, 0));
    for (int i = 0; i < ell; ++i) {
        const auto& ts = inst.terminals.at(i);
        for (unsigned mask = 0; mask <= full; ++mask) {
            detail::UnionFind uf(g.vertex_count());
            for (int e = 0; e < m; ++e)
                if (mask >> e & 1) uf.unite(g.edge(e).u, g.edge(e).v);
            int root = uf.find(ts.front());
            bool ok = true;
            for (Vertex v : ts)
                if (uf.find(v) != root) {
                    ok = false;
                    break;
                }
            connects[i][mask] = ok;
        }
    }

    const Rat kInf = Rat(INT64_MAX / 4);
    std::vector<std::vector<Rat>> memo(ell + 1, std::vector<Rat>(full + 1, kInf));
    std::vector<std::vector<char>> have(ell + 1, std::vector<char>(full + 1, 0));
    std::vector<std::vector<unsigned>> choice(ell + 1, std::vector<unsigned>(full + 1, 0));

    // best(level, avail) = cheapest cost of levels level..ell nested inside avail.
    auto best = [&](auto&& self, int level, unsigned avail) -> Rat {
        if (level > ell) return Rat(0);
        if (have[level][avail]) return memo[level][avail];
        have[level][avail] = 1;
        Rat out = kInf;
        unsigned pick = 0;
        unsigned s = avail;
        for (;;) {
            if (connects[level - 1][s]) {
                Rat rest = self(self, level + 1, s);
                if (rest != kInf) {
                    Rat total = mask_cost[s] + rest;
                    if (total < out || (total == out && s < pick)) {
                        out = total;
                        pick = s;
                    }
                }
            }
            if (s == 0) break;
            s = (s - 1) & avail;
        }
        memo[level][avail] = out;
        choice[level][avail] = pick;
        return out;
    };

    Rat total = best(best, 1, full);
    if (total == kInf) throw data_error("oracle_mlst: no feasible nested solution");

    MlstSolution sol;
    unsigned avail = full;
    for (int level = 1; level <= ell; ++level) {
        unsigned mask = choice[level][avail];
        std::vector<EdgeId> ids;
        for (int e = 0; e < m; ++e)
            if (mask >> e & 1) ids.push_back(e);
        sol.edge_sets.push_back(std::move(ids));
        avail = mask;
    }

    // Recompute through the per-level decomposition sum i * OPT_i and insist
    // both accounting routes agree.
    Rat by_levels = solution_cost_by_level_map(inst, sol);
    if (by_levels != total) throw std::logic_error("oracle_mlst: level decomposition mismatch");
    return {total, std::move(sol)};
}

}  // namespace mlst
