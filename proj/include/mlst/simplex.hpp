#pragma once

#include <optional>
#include <vector>

#include "mlst/errors.hpp"
#include "mlst/rational.hpp"

namespace mlst {

enum class Rel { le, ge, eq };

template <class T>
struct lp_limits;
template <>
struct lp_limits<double> {
    static double eps() { return 1e-9; }
    static double feas_eps() { return 1e-7; }  // phase-1 acceptance
};
template <>
struct lp_limits<Rat> {
    static Rat eps() { return Rat(0); }
    static Rat feas_eps() { return Rat(0); }
};

// Dense LP in natural form: maximize c.x subject to rows, per-variable lower
// bounds (default 0, nullopt = free) and optional upper bounds.
template <class T>
struct LinearProgram {
    struct Row {
        std::vector<T> coef;
        Rel rel = Rel::le;
        T rhs{};
    };

    int num_vars = 0;
    std::vector<T> objective;
    std::vector<Row> rows;
    std::vector<std::optional<T>> lower;  // resized with T(0) when shorter
    std::vector<std::optional<T>> upper;  // resized with nullopt when shorter

    Row& add_row(std::vector<T> coef, Rel rel, T rhs) {
        rows.push_back({std::move(coef), rel, std::move(rhs)});
        return rows.back();
    }
};

enum class LpStatus { optimal, infeasible, unbounded };

template <class T>
struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    T value{};
    std::vector<T> point;      // original variable space
    std::vector<T> row_duals;  // d(value)/d(rhs) per input row; 0 for redundant rows
};

// Two-phase primal simplex on a dense tableau with Bland's rule, which makes
// the pivot sequence deterministic and terminating. Equalities and negative
// right-hand sides go through artificial variables in phase 1.
template <class T>
class SimplexSolver {
public:
    explicit SimplexSolver(const LinearProgram<T>& lp) : lp_(lp) { validate(); }

    LpSolution<T> solve() {
        build();
        if (!phase1()) return {LpStatus::infeasible, T{}, {}};
        if (!phase2()) return {LpStatus::unbounded, T{}, {}};
        return extract();
    }

private:
    const LinearProgram<T>& lp_;
    T eps_ = lp_limits<T>::eps();

    int ns_ = 0;                     // internal structural columns
    std::vector<int> col_of_var_;    // original var -> first internal column
    std::vector<char> var_is_free_;  // free vars occupy two columns (x = p - q)

    int ncols_ = 0;
    int nart_ = 0;
    std::vector<std::vector<T>> a_;
    std::vector<T> b_;
    std::vector<int> basis_;
    std::vector<char> artificial_;  // per column
    std::vector<T> cost_;           // phase-2 objective per internal column
    std::vector<T> objrow_;

    // Per tableau row, for shadow prices: source input row (-1 for
    // solver-added bound rows), slack/artificial column, sign factors.
    struct RowMeta {
        int user_row = -1;
        int slack_col = -1;
        int art_col = -1;
        int rho = 1;    // ge -> le negation
        int sigma = 1;  // rhs sign normalization
    };
    std::vector<RowMeta> row_meta_;

    void validate() const {
        if (static_cast<int>(lp_.objective.size()) != lp_.num_vars)
            throw data_error("lp: objective dimension mismatch");
        for (const auto& row : lp_.rows)
            if (static_cast<int>(row.coef.size()) != lp_.num_vars)
                throw data_error("lp: row dimension mismatch");
        if (static_cast<int>(lp_.lower.size()) > lp_.num_vars ||
            static_cast<int>(lp_.upper.size()) > lp_.num_vars)
            throw data_error("lp: bound dimension mismatch");
    }

    std::optional<T> lower_of(int j) const {
        if (j < static_cast<int>(lp_.lower.size())) return lp_.lower[j];
        return T(0);
    }
    std::optional<T> upper_of(int j) const {
        if (j < static_cast<int>(lp_.upper.size())) return lp_.upper[j];
        return std::nullopt;
    }

    void build() {
        int n = lp_.num_vars;
        col_of_var_.assign(n, 0);
        var_is_free_.assign(n, 0);
        ns_ = 0;
        for (int j = 0; j < n; ++j) {
            col_of_var_[j] = ns_;
            if (lower_of(j)) {
                ns_ += 1;
            } else {
                var_is_free_[j] = 1;
                ns_ += 2;
            }
        }

        // Rows in internal space: substitute x_j = x'_j + lb_j (or p - q),
        // then append upper bounds as extra <= rows.
        struct IRow {
            std::vector<T> coef;
            Rel rel;
            T rhs;
            int user_row;
            int rho = 1;
        };
        std::vector<IRow> irows;
        auto transform_row = [&](const std::vector<T>& coef, Rel rel, T rhs, int user_row) {
            IRow ir{std::vector<T>(ns_, T(0)), rel, rhs, user_row};
            for (int j = 0; j < n; ++j) {
                const T& c = coef[j];
                if (c == T(0)) continue;
                if (var_is_free_[j]) {
                    ir.coef[col_of_var_[j]] += c;
                    ir.coef[col_of_var_[j] + 1] -= c;
                } else {
                    ir.coef[col_of_var_[j]] += c;
                    ir.rhs -= c * *lower_of(j);
                }
            }
            irows.push_back(std::move(ir));
        };
        for (size_t r = 0; r < lp_.rows.size(); ++r)
            transform_row(lp_.rows[r].coef, lp_.rows[r].rel, lp_.rows[r].rhs, static_cast<int>(r));
        for (int j = 0; j < n; ++j) {
            if (auto ub = upper_of(j)) {
                std::vector<T> coef(n, T(0));
                coef[j] = T(1);
                transform_row(coef, Rel::le, *ub, -1);
            }
        }

        int m = static_cast<int>(irows.size());
        // Columns: structural, one slack/surplus per inequality, artificials.
        int nslack = 0;
        for (const auto& r : irows)
            if (r.rel != Rel::eq) ++nslack;
        nart_ = 0;
        for (auto& r : irows) {
            if (r.rel == Rel::ge) {
                for (auto& c : r.coef) c = -c;
                r.rhs = -r.rhs;
                r.rel = Rel::le;
                r.rho = -1;
            }
            bool neg = r.rhs < T(0);
            if (r.rel == Rel::eq || neg) ++nart_;
        }
        ncols_ = ns_ + nslack + nart_;
        a_.assign(m, std::vector<T>(ncols_, T(0)));
        b_.assign(m, T(0));
        basis_.assign(m, -1);
        artificial_.assign(ncols_, 0);
        row_meta_.assign(m, {});

        int slack_at = ns_;
        int art_at = ns_ + nslack;
        for (int i = 0; i < m; ++i) {
            auto& r = irows[i];
            bool neg = r.rhs < T(0);
            T sgn = neg ? T(-1) : T(1);
            row_meta_[i].user_row = r.user_row;
            row_meta_[i].rho = r.rho;
            row_meta_[i].sigma = neg ? -1 : 1;
            for (int j = 0; j < ns_; ++j) a_[i][j] = sgn * r.coef[j];
            b_[i] = sgn * r.rhs;
            if (r.rel == Rel::le) {
                a_[i][slack_at] = sgn;  // slack (or surplus when row was negated)
                if (!neg)
                    basis_[i] = slack_at;
                row_meta_[i].slack_col = slack_at;
                ++slack_at;
            }
            if (r.rel == Rel::eq || neg) {
                a_[i][art_at] = T(1);
                artificial_[art_at] = 1;
                basis_[i] = art_at;
                row_meta_[i].art_col = art_at;
                ++art_at;
            }
        }

        cost_.assign(ncols_, T(0));
        for (int j = 0; j < n; ++j) {
            const T& c = lp_.objective[j];
            if (var_is_free_[j]) {
                cost_[col_of_var_[j]] += c;
                cost_[col_of_var_[j] + 1] -= c;
            } else {
                cost_[col_of_var_[j]] += c;
            }
        }
    }

    void pivot(int row, int col) {
        int m = static_cast<int>(a_.size());
        T inv = T(1) / a_[row][col];
        for (int j = 0; j < ncols_; ++j) a_[row][j] = a_[row][j] * inv;
        b_[row] = b_[row] * inv;
        a_[row][col] = T(1);
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            T f = a_[i][col];
            if (f == T(0)) continue;
            for (int j = 0; j < ncols_; ++j) a_[i][j] -= f * a_[row][j];
            b_[i] -= f * b_[row];
            a_[i][col] = T(0);
        }
        T f = objrow_[col];
        if (f != T(0)) {
            for (int j = 0; j < ncols_; ++j) objrow_[j] -= f * a_[row][j];
            objrow_[col] = T(0);
        }
        basis_[row] = col;
    }

    void price_out(const std::vector<T>& cost) {
        int m = static_cast<int>(a_.size());
        objrow_.assign(ncols_, T(0));
        for (int j = 0; j < ncols_; ++j) objrow_[j] = -cost[j];
        for (int i = 0; i < m; ++i) {
            const T& cb = cost[basis_[i]];
            if (cb == T(0)) continue;
            for (int j = 0; j < ncols_; ++j) objrow_[j] += cb * a_[i][j];
        }
        for (int i = 0; i < m; ++i) objrow_[basis_[i]] = T(0);
    }

    // One pivot. Dantzig mode enters on the most negative reduced cost and
    // leaves on the min ratio with the largest pivot element among ties;
    // Bland mode uses smallest-index rules. Returns false when optimal.
    bool step(const std::vector<char>& banned, bool* unbounded, bool bland, T* improvement) {
        int m = static_cast<int>(a_.size());
        int enter = -1;
        if (bland) {
            for (int j = 0; j < ncols_; ++j) {
                if (banned[j]) continue;
                if (objrow_[j] < -eps_) {
                    enter = j;
                    break;
                }
            }
        } else {
            T best{};
            for (int j = 0; j < ncols_; ++j) {
                if (banned[j]) continue;
                if (objrow_[j] < -eps_ && (enter < 0 || objrow_[j] < best)) {
                    enter = j;
                    best = objrow_[j];
                }
            }
        }
        if (enter < 0) return false;
        int leave = -1;
        T best_ratio{};
        for (int i = 0; i < m; ++i) {
            if (!(a_[i][enter] > eps_)) continue;
            T ratio = b_[i] / a_[i][enter];
            if (leave < 0 || ratio < best_ratio) {
                leave = i;
                best_ratio = ratio;
            } else if (ratio == best_ratio) {
                bool better = bland ? basis_[i] < basis_[leave] : a_[i][enter] > a_[leave][enter];
                if (better) leave = i;
            }
        }
        if (leave < 0) {
            if (unbounded) *unbounded = true;
            return false;
        }
        if (improvement) *improvement = -objrow_[enter] * best_ratio;
        pivot(leave, enter);
        return true;
    }

    // Dantzig pivoting with escalating Bland bursts when the objective
    // stalls, which breaks degenerate cycling deterministically: the burst
    // length doubles, so the rule eventually degenerates to pure Bland.
    void run(const std::vector<char>& banned, bool* unbounded) {
        long long total = 0, stall = 0, bland_until = 0, bland_len = 64;
        T improvement{};
        for (;;) {
            bool bland = total < bland_until;
            if (!step(banned, unbounded, bland, &improvement)) break;
            ++total;
            if (improvement > eps_)
                stall = 0;
            else if (++stall > 64 && total >= bland_until) {
                bland_until = total + bland_len;
                bland_len *= 2;
                stall = 0;
            }
            if (total > 5000000) throw guard_error("lp: pivot limit exceeded");
        }
    }

    bool phase1() {
        if (nart_ == 0) return true;
        std::vector<T> art_cost(ncols_, T(0));
        for (int j = 0; j < ncols_; ++j)
            if (artificial_[j]) art_cost[j] = T(-1);
        price_out(art_cost);
        std::vector<char> banned(ncols_, 0);
        run(banned, nullptr);
        T infeas = T(0);
        int m = static_cast<int>(a_.size());
        for (int i = 0; i < m; ++i)
            if (artificial_[basis_[i]]) infeas += b_[i];
        if (infeas > lp_limits<T>::feas_eps()) return false;
        // Drive leftover artificials out of the basis, pivoting on the
        // largest available element for stability; rows where none exists
        // are redundant and get dropped so no artificial can ever re-grow.
        for (int i = 0; i < m; ++i) {
            if (!artificial_[basis_[i]]) continue;
            int best = -1;
            T mag{};
            for (int j = 0; j < ncols_; ++j) {
                if (artificial_[j]) continue;
                T v = a_[i][j] < T(0) ? -a_[i][j] : a_[i][j];
                if (v > eps_ && (best < 0 || mag < v)) {
                    best = j;
                    mag = v;
                }
            }
            if (best >= 0) pivot(i, best);
        }
        for (int i = m - 1; i >= 0; --i) {
            if (!artificial_[basis_[i]]) continue;
            a_.erase(a_.begin() + i);
            b_.erase(b_.begin() + i);
            basis_.erase(basis_.begin() + i);
            row_meta_.erase(row_meta_.begin() + i);
        }
        return true;
    }

    bool phase2() {
        price_out(cost_);
        std::vector<char> banned(artificial_.begin(), artificial_.end());
        bool unbounded = false;
        run(banned, &unbounded);
        return !unbounded;
    }

    LpSolution<T> extract() const {
        std::vector<T> internal(ncols_, T(0));
        for (size_t i = 0; i < basis_.size(); ++i) internal[basis_[i]] = b_[i];
        LpSolution<T> sol;
        sol.status = LpStatus::optimal;
        sol.point.assign(lp_.num_vars, T(0));
        for (int j = 0; j < lp_.num_vars; ++j) {
            if (var_is_free_[j])
                sol.point[j] = internal[col_of_var_[j]] - internal[col_of_var_[j] + 1];
            else
                sol.point[j] = internal[col_of_var_[j]] + *lower_of(j);
        }
        sol.value = T(0);
        for (int j = 0; j < lp_.num_vars; ++j) sol.value += lp_.objective[j] * sol.point[j];
        // Shadow prices from the priced-out objective row: the dual of an
        // inequality row sits under its slack column (up to the ge negation),
        // the dual of an equality under its artificial column. Rows deleted
        // as redundant keep dual 0.
        sol.row_duals.assign(lp_.rows.size(), T(0));
        for (const RowMeta& meta : row_meta_) {
            if (meta.user_row < 0) continue;
            T w;
            if (meta.slack_col >= 0)
                w = T(meta.rho) * objrow_[meta.slack_col];
            else
                w = T(meta.sigma) * objrow_[meta.art_col];
            sol.row_duals[meta.user_row] = w;
        }
        return sol;
    }
};

template <class T>
LpSolution<T> solve_lp(const LinearProgram<T>& lp) {
    SimplexSolver<T> solver(lp);
    return solver.solve();
}

}  // namespace mlst
