#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlst/heuristics.hpp"
#include "mlst/simplex.hpp"

namespace mlst {

// Constraint coefficients contributed by a level subset Q = {i_1,...,i_m}:
// (i_{k+1} - 1) at column i_k, zero elsewhere, with i_{m+1} = ell + 1.
inline std::vector<long long> coefficients_for_subset(const LevelSubset& q, int ell) {
    q.validate(ell);
    std::vector<long long> coef(ell, 0);
    for (size_t k = 0; k < q.levels.size(); ++k) {
        long long next = (k + 1 < q.levels.size()) ? q.levels[k + 1] : ell + 1;
        coef[q.levels[k] - 1] = next - 1;
    }
    return coef;
}

// Worst-case cost ratio of the composite heuristic run on Q alone:
// max over prefixes m' of (sum of the first m' coefficients) / i_{m'}.
inline Rat t_of_q(const LevelSubset& q, int ell) {
    q.validate(ell);
    long long sum = 0;
    Rat best(0);
    for (size_t k = 0; k < q.levels.size(); ++k) {
        long long next = (k + 1 < q.levels.size()) ? q.levels[k + 1] : ell + 1;
        sum += next - 1;
        best = Rat::max(best, Rat(sum, q.levels[k]));
    }
    return best;
}

// All 2^(ell-1) constraint rows in the standard subset ordering
// ({1}, {1,2}, {1,3}, {1,2,3}, {1,4}, ...). Built by the recursive block
// construction and cross-checked row by row against the closed form.
struct ConstraintMatrix {
    int ell = 0;
    std::vector<std::vector<long long>> rows;
};

inline ConstraintMatrix build_matrix(int ell) {
    if (ell < 1 || ell > 16) throw guard_error("build_matrix: level bound exceeded");
    std::vector<std::vector<long long>> m{{1}};
    std::vector<std::vector<long long>> p{{1}};
    for (int l = 2; l <= ell; ++l) {
        size_t half = m.size();
        std::vector<std::vector<long long>> m2(half * 2, std::vector<long long>(l, 0));
        std::vector<std::vector<long long>> p2(half * 2, std::vector<long long>(l, 0));
        for (size_t r = 0; r < half; ++r) {
            for (int j = 0; j < l - 1; ++j) {
                m2[r][j] = p[r][j] + m[r][j];
                m2[half + r][j] = m[r][j];
                p2[r][j] = p[r][j];
            }
            m2[half + r][l - 1] = l;
            p2[half + r][l - 1] = 1;
        }
        m = std::move(m2);
        p = std::move(p2);
    }
    for (size_t r = 0; r < m.size(); ++r) {
        if (m[r] != coefficients_for_subset(subset_at_index(r, ell), ell))
            throw std::logic_error("build_matrix: recursion disagrees with subset coefficients");
    }
    return {ell, std::move(m)};
}

// Cheapest subset for a given non-negative vector y: shortest path in the
// layered DAG on nodes 1..ell+1 with arc i->j of weight (j-1)*y_i, fixed to
// start at 1 and end at ell+1. Ties resolve to the lexicographically
// smallest subset (terminating beats continuing, then smaller next node).
template <class T>
std::pair<LevelSubset, T> pricing_best_q(std::span<const T> y) {
    int ell = static_cast<int>(y.size());
    if (ell < 1) throw data_error("pricing: empty y vector");
    for (const T& v : y)
        if (v < T(0)) throw data_error("pricing: negative y entry");

    std::vector<T> g(ell + 2, T(0));
    std::vector<int> next(ell + 2, 0);
    for (int i = ell; i >= 1; --i) {
        T best = T(ell) * y[i - 1];  // arc i -> ell+1
        int bj = ell + 1;
        for (int j = i + 1; j <= ell; ++j) {
            T cand = T(j - 1) * y[i - 1] + g[j];
            if (cand < best) {
                best = cand;
                bj = j;
            }
        }
        g[i] = best;
        next[i] = bj;
    }
    LevelSubset q;
    for (int cur = 1; cur != ell + 1; cur = next[cur]) q.levels.push_back(cur);
    return {std::move(q), g[1]};
}

// Q* for the guaranteed composite: the subset minimizing
// sum (i_{k+1}-1) * MIN_{i_k}, obtained through pricing (scale invariant),
// never by enumerating all subsets.
inline LevelSubset select_q_star(std::span<const Rat> min_costs) {
    for (const Rat& v : min_costs)
        if (!(v > Rat(0))) throw data_error("select_q_star: non-positive entry");
    return pricing_best_q<Rat>(min_costs).first;
}

enum class RatioMethod { full, colgen };

inline const char* to_string(RatioMethod m) { return m == RatioMethod::full ? "full" : "colgen"; }

struct RatioLpReport {
    int ell = 0;
    double t_value = 0.0;
    std::vector<double> y;
    std::vector<LevelSubset> pool;
    int iterations = 0;
    RatioMethod method = RatioMethod::colgen;
};

namespace detail {

// max t subject to t <= row . y for each pool row, y decreasing, sum y = 1.
// Solved in substituted variables y_i = z_i + z_{i+1} + ... + z_ell with
// z >= 0, which encodes the monotonicity rows structurally: the row
// coefficient on z_j becomes the prefix sum of the first j row entries and
// the simplex constraint becomes sum j*z_j = 1.
inline LinearProgram<double> master_lp(const std::vector<std::vector<long long>>& pool_rows, int ell) {
    LinearProgram<double> lp;
    lp.num_vars = ell + 1;  // t, z_1..z_ell
    lp.objective.assign(ell + 1, 0.0);
    lp.objective[0] = 1.0;
    for (const auto& row : pool_rows) {
        std::vector<double> coef(ell + 1, 0.0);
        coef[0] = 1.0;
        long long prefix = 0;
        for (int j = 0; j < ell; ++j) {
            prefix += row[j];
            coef[j + 1] = -static_cast<double>(prefix);
        }
        lp.add_row(std::move(coef), Rel::le, 0.0);
    }
    std::vector<double> sum(ell + 1, 0.0);
    for (int j = 1; j <= ell; ++j) sum[j] = static_cast<double>(j);
    lp.add_row(std::move(sum), Rel::eq, 1.0);
    return lp;
}

struct MasterResult {
    double t = 0.0;
    std::vector<double> y;
};

// Direct solve; fine while the pool is small. Used as the reference route.
inline MasterResult solve_master_primal(const std::vector<std::vector<long long>>& pool_rows, int ell) {
    LpSolution<double> sol = solve_lp(master_lp(pool_rows, ell));
    if (sol.status != LpStatus::optimal) throw std::logic_error("ratio master LP not optimal");
    MasterResult res;
    res.t = sol.value;
    res.y.assign(ell, 0.0);
    double suffix = 0.0;
    for (int i = ell; i >= 1; --i) {
        double z = sol.point[i];
        if (z > 0.0) suffix += z;  // drop float dust; keeps y monotone and non-negative
        res.y[i - 1] = suffix;
    }
    return res;
}

// The pool outgrows the variable count quickly, so the production route
// solves the dual (ell+1 rows however large the pool is) and reads the
// master's (t, z) back off the shadow prices. Recovered vectors are checked
// against the pool before use.
inline MasterResult solve_master(const std::vector<std::vector<long long>>& pool_rows, int ell) {
    int pool = static_cast<int>(pool_rows.size());
    if (pool == 0) throw std::logic_error("ratio master: empty pool");
    std::vector<std::vector<double>> prefix(pool, std::vector<double>(ell + 1, 0.0));
    for (int q = 0; q < pool; ++q) {
        long long acc = 0;
        for (int j = 1; j <= ell; ++j) {
            acc += pool_rows[q][j - 1];
            prefix[q][j] = static_cast<double>(acc);
        }
    }

    LinearProgram<double> dual;
    dual.num_vars = pool + 1;  // lambda_q, nu
    int nu = pool;
    dual.objective.assign(pool + 1, 0.0);
    dual.objective[nu] = -1.0;  // min nu
    dual.lower.assign(pool + 1, 0.0);
    // nu equals the ratio at the optimum, which always lands in [1, 4]; a
    // generous box keeps the column bounded and immune to noise-driven
    // unbounded rays.
    dual.upper.assign(pool + 1, std::nullopt);
    dual.upper[nu] = 8.0;
    {
        std::vector<double> coef(pool + 1, 0.0);
        for (int q = 0; q < pool; ++q) coef[q] = 1.0;
        dual.add_row(std::move(coef), Rel::ge, 1.0);
    }
    for (int j = 1; j <= ell; ++j) {
        std::vector<double> coef(pool + 1, 0.0);
        for (int q = 0; q < pool; ++q) coef[q] = -prefix[q][j];
        coef[nu] = static_cast<double>(j);
        dual.add_row(std::move(coef), Rel::ge, 0.0);
    }
    LpSolution<double> sol = solve_lp(dual);
    if (sol.status != LpStatus::optimal) throw std::logic_error("ratio master dual not optimal status=" + std::to_string(static_cast<int>(sol.status)));

    // The multipliers point at the binding rows; a small primal restricted
    // to them recovers (t, y). Degenerate duals may miss a row, so verify
    // against the whole pool and pull in violated rows until clean.
    std::vector<char> active(pool, 0);
    std::vector<std::vector<long long>> restricted;
    for (int q = 0; q < pool; ++q)
        if (sol.point[q] > 1e-7) {
            active[q] = 1;
            restricted.push_back(pool_rows[q]);
        }
    if (restricted.empty()) {
        active[0] = 1;
        restricted.push_back(pool_rows[0]);
    }
    for (int round = 0; round <= pool; ++round) {
        MasterResult res = solve_master_primal(restricted, ell);
        int worst = -1;
        double worst_dot = res.t - 1e-9;
        for (int q = 0; q < pool; ++q) {
            if (active[q]) continue;
            double dot = 0.0;
            for (int i = 0; i < ell; ++i) dot += static_cast<double>(pool_rows[q][i]) * res.y[i];
            if (dot < worst_dot) {
                worst_dot = dot;
                worst = q;
            }
        }
        if (worst < 0) return res;
        active[worst] = 1;
        restricted.push_back(pool_rows[worst]);
    }
    throw std::logic_error("ratio master: support recovery did not close");
}

// Master kept warm across column-generation rounds: only the rows that were
// ever binding stay in the solved LP, everything else is verified by dot
// products and pulled in on violation.
struct MasterState {
    std::vector<char> active;
    std::vector<std::vector<long long>> restricted;
};

inline MasterResult solve_master_warm(const std::vector<std::vector<long long>>& pool_rows, int ell,
                                      MasterState& state) {
    size_t pool = pool_rows.size();
    state.active.resize(pool, 0);
    if (!state.active[pool - 1]) {  // the newest row is the reason we are re-solving
        state.active[pool - 1] = 1;
        state.restricted.push_back(pool_rows[pool - 1]);
    }
    for (size_t round = 0; round <= pool; ++round) {
        MasterResult res = solve_master_primal(state.restricted, ell);
        int worst = -1;
        double worst_dot = res.t - 1e-9;
        for (size_t q = 0; q < pool; ++q) {
            if (state.active[q]) continue;
            double dot = 0.0;
            for (int i = 0; i < ell; ++i) dot += static_cast<double>(pool_rows[q][i]) * res.y[i];
            if (dot < worst_dot) {
                worst_dot = dot;
                worst = static_cast<int>(q);
            }
        }
        if (worst < 0) return res;
        state.active[worst] = 1;
        state.restricted.push_back(pool_rows[worst]);
    }
    throw std::logic_error("ratio master: active set did not close");
}

// Column generation with in-out stabilization: cuts are priced at the
// midpoint between the incumbent (best lower-bound point seen) and the
// master optimum, which stops the master vertex from zigzagging. Lower and
// upper bounds certify the result: every pricing value at a feasible point
// bounds t from below, every master value bounds it from above. A non-empty
// seed pool (as used by the table sweep, which carries subsets from one
// level count to the next) starts fully active.
inline RatioLpReport ratio_by_colgen(int ell, const std::vector<LevelSubset>& seed_pool = {}) {
    RatioLpReport report;
    report.ell = ell;
    report.method = RatioMethod::colgen;

    std::vector<double> center(ell);
    double norm = 0.0;
    for (int i = 0; i < ell; ++i) {
        center[i] = 1.0 / (i + 1);
        norm += center[i];
    }
    // First pricing runs on the raw harmonic seed; the argmin is scale
    // invariant, and dividing by the seed's mass turns its value into the
    // lower bound at the normalized point.
    auto [q0, v0] = pricing_best_q<double>(center);
    double lower = v0 / norm;
    for (double& v : center) v /= norm;

    std::vector<std::vector<long long>> pool_rows;
    MasterState state;
    for (const LevelSubset& q : seed_pool) {
        if (q.levels.back() > ell) continue;
        pool_rows.push_back(coefficients_for_subset(q, ell));
        report.pool.push_back(q);
        state.active.push_back(1);
        state.restricted.push_back(pool_rows.back());
    }
    {
        bool seen = false;
        for (const LevelSubset& q : report.pool)
            if (q == q0) seen = true;
        if (!seen) {
            pool_rows.push_back(coefficients_for_subset(q0, ell));
            report.pool.push_back(std::move(q0));
        }
    }
    double t = std::numeric_limits<double>::infinity();
    std::vector<double> y = center;

    auto in_pool = [&](const LevelSubset& q) {
        for (const LevelSubset& p : report.pool)
            if (p == q) return true;
        return false;
    };

    constexpr double kBetas[] = {0.5, 0.75, 0.875, 1.0};
    for (int round = 0; round < 4000; ++round) {
        MasterResult master = solve_master_warm(pool_rows, ell, state);
        ++report.iterations;
        t = master.t;
        y = master.y;
        if (t - lower <= 1e-9) break;

        // Walk from the incumbent toward the master vertex until pricing
        // yields a row the pool does not know yet; beta = 1 prices at the
        // vertex itself, so a duplicate there certifies optimality.
        bool added = false;
        for (double beta : kBetas) {
            std::vector<double> point(ell);
            for (int i = 0; i < ell; ++i) point[i] = (1.0 - beta) * center[i] + beta * y[i];
            auto [q_new, value] = pricing_best_q<double>(point);
            if (value > lower) {
                lower = value;
                center = point;
            }
            if (t - lower <= 1e-9) break;
            if (!in_pool(q_new)) {
                pool_rows.push_back(coefficients_for_subset(q_new, ell));
                report.pool.push_back(std::move(q_new));
                added = true;
                break;
            }
        }
        if (!added) break;
    }
    report.t_value = t;
    report.y = y;
    return report;
}

// Full-matrix solve over all 2^(ell-1) rows. Small level counts also run the
// direct primal as an independent check of the dual-and-recover route.
inline RatioLpReport ratio_by_full(int ell) {
    ConstraintMatrix matrix = build_matrix(ell);
    RatioLpReport report;
    report.ell = ell;
    report.method = RatioMethod::full;
    report.iterations = 1;
    report.pool.reserve(matrix.rows.size());
    for (size_t r = 0; r < matrix.rows.size(); ++r)
        report.pool.push_back(subset_at_index(r, ell));

    MasterResult master = solve_master(matrix.rows, ell);
    if (ell <= 8) {
        MasterResult direct = solve_master_primal(matrix.rows, ell);
        if (std::abs(direct.t - master.t) > 1e-7)
            throw std::logic_error("ratio full: primal and dual routes disagree");
    }
    report.t_value = master.t;
    report.y = master.y;
    return report;
}

}  // namespace detail

// Approximation ratio t_ell of the composite heuristic, by full enumeration
// of the constraint matrix or by column generation with the pricing DAG.
inline RatioLpReport compute_ratio(int ell, RatioMethod method) {
    if (ell < 1) throw data_error("compute_ratio: need at least one level");
    if (method == RatioMethod::full) {
        if (ell > 16) throw guard_error("compute_ratio: full enumeration bounded to 16 levels");
        return detail::ratio_by_full(ell);
    }
    if (ell > 4096) throw guard_error("compute_ratio: level count out of range");
    return detail::ratio_by_colgen(ell);
}

// CSV rows "ell,t_ell" with the ratio printed to three decimals. The colgen
// sweep hands each level count the previous pool as a seed; those subsets
// remain valid rows and cut the warm-up down to a handful of iterations.
inline std::string ratio_table_csv(int max_ell, RatioMethod method) {
    std::string out = "ell,t_ell\n";
    std::vector<LevelSubset> carry;
    for (int ell = 1; ell <= max_ell; ++ell) {
        std::vector<LevelSubset> seed = carry;
        for (const LevelSubset& q : carry) {
            if (q.levels.back() >= ell) continue;  // also try each subset extended to the new top
            LevelSubset ext = q;
            ext.levels.push_back(ell);
            seed.push_back(std::move(ext));
        }
        RatioLpReport r = method == RatioMethod::colgen ? detail::ratio_by_colgen(ell, seed)
                                                        : compute_ratio(ell, method);
        if (method == RatioMethod::colgen) {
            carry.clear();
            for (const LevelSubset& q : r.pool) {
                auto row = coefficients_for_subset(q, ell);
                double dot = 0.0;
                for (int i = 0; i < ell; ++i) dot += static_cast<double>(row[i]) * r.y[i];
                if (dot <= r.t_value + 1e-7) carry.push_back(q);  // binding rows only
            }
        }
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%d,%.3f\n", ell, r.t_value);
        out += buf;
    }
    return out;
}

// Guaranteed composite: one Steiner computation per level to price MIN_i,
// Q* from the pricing problem, then a single composite run on Q*. At most
// 2*ell Steiner calls total.
inline HeuristicRun guaranteed_composite(const MlstInstance& inst, SteinerMode mode) {
    int ell = inst.levels();
    std::vector<Rat> mins = level_min_costs(inst, mode);
    LevelSubset q_star = select_q_star(mins);
    HeuristicRun run = composite_on_q(inst, q_star, mode);
    run.stp_calls += ell;
    return run;
}

}  // namespace mlst
