#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mlst/io.hpp"

namespace mlst {

enum class VarKind { binary, integer, continuous };
enum class IlpRel { le, ge, eq };

struct IlpVar {
    std::string name;
    VarKind kind = VarKind::continuous;
    Rat lb;                        // default 0
    std::optional<Rat> ub;        // emitted into Bounds when set (non-binary)
};

struct IlpTerm {
    Rat coef;
    int var = 0;
};

struct IlpConstraint {
    std::string name;
    std::vector<IlpTerm> terms;
    IlpRel rel = IlpRel::le;
    Rat rhs;
};

// A minimization model in the usual LP text layout. Variables are referenced
// by index; names stay unique by construction.
struct IlpModel {
    std::string name;
    std::vector<std::string> notes;  // header comment lines
    std::vector<IlpVar> vars;
    std::vector<IlpTerm> objective;  // minimize
    std::vector<IlpConstraint> constraints;

    int add_var(std::string name, VarKind kind, Rat lb = Rat(0), std::optional<Rat> ub = std::nullopt) {
        int id = static_cast<int>(vars.size());
        auto [it, fresh] = index_.emplace(name, id);
        if (!fresh) throw data_error("ilp: duplicate variable " + name);
        vars.push_back({std::move(name), kind, lb, std::move(ub)});
        return id;
    }
    int var_id(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw data_error("ilp: unknown variable " + name);
        return it->second;
    }
    IlpConstraint& add_constraint(std::string name, IlpRel rel, Rat rhs) {
        constraints.push_back({std::move(name), {}, rel, rhs});
        return constraints.back();
    }

private:
    std::map<std::string, int> index_;
};

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string instance_hash(const MlstInstance& inst) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(write_instance(inst))));
    return buf;
}

// ---------------------------------------------------------------------------
// LP text writer / parser. The writer is canonical: Bounds, Binary and
// General entries are sorted by variable name, so emit(parse(emit(m)))
// reproduces the bytes exactly.

namespace detail {

inline void append_terms(std::string& out, const IlpModel& model, const std::vector<IlpTerm>& terms) {
    bool first = true;
    for (const IlpTerm& t : terms) {
        Rat mag = Rat::abs(t.coef);
        bool neg = t.coef.sign() < 0;
        if (first) {
            if (neg) out += "- ";
        } else {
            out += neg ? " - " : " + ";
        }
        if (mag != Rat(1)) {
            out += mag.to_decimal();
            out += ' ';
        }
        out += model.vars.at(t.var).name;
        first = false;
    }
    if (first) out += "0";
}

}  // namespace detail

inline std::string write_lp(const IlpModel& model) {
    std::string out;
    out += "\\ model: " + model.name + "\n";
    for (const std::string& note : model.notes) out += "\\ " + note + "\n";
    out += "Minimize\n obj: ";
    detail::append_terms(out, model, model.objective);
    out += "\nSubject To\n";
    for (const IlpConstraint& c : model.constraints) {
        out += " " + c.name + ": ";
        detail::append_terms(out, model, c.terms);
        out += c.rel == IlpRel::le ? " <= " : c.rel == IlpRel::ge ? " >= " : " = ";
        out += c.rhs.to_decimal();
        out += "\n";
    }
    std::vector<std::string> bounds, binaries, generals;
    for (const IlpVar& v : model.vars) {
        if (v.kind == VarKind::binary) {
            binaries.push_back(" " + v.name);
            continue;
        }
        if (v.kind == VarKind::integer) generals.push_back(" " + v.name);
        if (v.lb != Rat(0) && v.ub)
            bounds.push_back(" " + v.lb.to_decimal() + " <= " + v.name + " <= " + v.ub->to_decimal());
        else if (v.ub)
            bounds.push_back(" " + v.name + " <= " + v.ub->to_decimal());
        else if (v.lb != Rat(0))
            bounds.push_back(" " + v.name + " >= " + v.lb.to_decimal());
    }
    std::sort(bounds.begin(), bounds.end());
    std::sort(binaries.begin(), binaries.end());
    std::sort(generals.begin(), generals.end());
    if (!bounds.empty()) {
        out += "Bounds\n";
        for (const auto& s : bounds) out += s + "\n";
    }
    if (!binaries.empty()) {
        out += "Binary\n";
        for (const auto& s : binaries) out += s + "\n";
    }
    if (!generals.empty()) {
        out += "General\n";
        for (const auto& s : generals) out += s + "\n";
    }
    out += "End\n";
    return out;
}

namespace detail {

inline bool lp_is_number(const std::string& tok) {
    if (tok.empty()) return false;
    size_t i = (tok[0] == '-' || tok[0] == '+') ? 1 : 0;
    if (i >= tok.size()) return false;
    for (; i < tok.size(); ++i)
        if (!(std::isdigit(static_cast<unsigned char>(tok[i])) || tok[i] == '.')) return false;
    return true;
}

}  // namespace detail

inline IlpModel parse_lp(std::string_view text) {
    IlpModel model;
    std::map<std::string, int> seen;
    auto intern = [&](const std::string& name) -> int {
        auto it = seen.find(name);
        if (it != seen.end()) return it->second;
        int id = model.add_var(name, VarKind::continuous);
        seen.emplace(name, id);
        return id;
    };
    auto parse_terms = [&](const std::vector<std::string>& toks, size_t from, size_t to) {
        std::vector<IlpTerm> terms;
        int sign = 1;
        std::optional<Rat> coef;
        for (size_t i = from; i < to; ++i) {
            const std::string& tok = toks[i];
            if (tok == "+") continue;
            if (tok == "-") {
                sign = -sign;
                continue;
            }
            if (detail::lp_is_number(tok)) {
                coef = Rat::from_decimal(tok);
                continue;
            }
            if (tok == "0" ) continue;
            Rat c = coef.value_or(Rat(1)) * Rat(sign);
            terms.push_back({c, intern(tok)});
            sign = 1;
            coef.reset();
        }
        return terms;
    };

    enum Section { none, objective, subject_to, bounds, binary, general, done };
    Section section = none;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '\\') {
            std::string note = line.substr(1);
            if (!note.empty() && note[0] == ' ') note.erase(0, 1);
            if (note.rfind("model: ", 0) == 0)
                model.name = note.substr(7);
            else
                model.notes.push_back(note);
            continue;
        }
        auto cut = line.find('\\');
        if (cut != std::string::npos) line.erase(cut);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string tok;
        while (ls >> tok) toks.push_back(tok);
        if (toks.empty()) continue;
        std::string head = toks[0];
        if (head == "Minimize") {
            section = objective;
            continue;
        }
        if (head == "Subject" && toks.size() > 1 && toks[1] == "To") {
            section = subject_to;
            continue;
        }
        if (head == "Bounds") {
            section = bounds;
            continue;
        }
        if (head == "Binary") {
            section = binary;
            continue;
        }
        if (head == "General") {
            section = general;
            continue;
        }
        if (head == "End") {
            section = done;
            continue;
        }
        switch (section) {
            case objective: {
                size_t from = 0;
                if (!toks.empty() && toks[0].back() == ':') from = 1;
                auto terms = parse_terms(toks, from, toks.size());
                model.objective.insert(model.objective.end(), terms.begin(), terms.end());
                break;
            }
            case subject_to: {
                if (toks.size() < 3 || toks[0].back() != ':')
                    throw data_error("lp parse: malformed constraint line: " + line);
                std::string name = toks[0].substr(0, toks[0].size() - 1);
                size_t rel_at = toks.size();
                IlpRel rel = IlpRel::le;
                for (size_t i = 1; i < toks.size(); ++i) {
                    if (toks[i] == "<=" || toks[i] == ">=" || toks[i] == "=") {
                        rel_at = i;
                        rel = toks[i] == "<=" ? IlpRel::le : toks[i] == ">=" ? IlpRel::ge : IlpRel::eq;
                        break;
                    }
                }
                if (rel_at + 1 != toks.size() - 0 && rel_at + 1 >= toks.size())
                    throw data_error("lp parse: malformed constraint relation: " + line);
                IlpConstraint c;
                c.name = std::move(name);
                c.terms = parse_terms(toks, 1, rel_at);
                c.rel = rel;
                c.rhs = Rat::from_decimal(toks[rel_at + 1]);
                model.constraints.push_back(std::move(c));
                break;
            }
            case bounds: {
                if (toks.size() == 3 && toks[1] == "<=") {
                    model.vars[intern(toks[0])].ub = Rat::from_decimal(toks[2]);
                } else if (toks.size() == 3 && toks[1] == ">=") {
                    model.vars[intern(toks[0])].lb = Rat::from_decimal(toks[2]);
                } else if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=") {
                    int id = intern(toks[2]);
                    model.vars[id].lb = Rat::from_decimal(toks[0]);
                    model.vars[id].ub = Rat::from_decimal(toks[4]);
                } else {
                    throw data_error("lp parse: malformed bound line: " + line);
                }
                break;
            }
            case binary:
                for (const std::string& t : toks) model.vars[intern(t)].kind = VarKind::binary;
                break;
            case general:
                for (const std::string& t : toks) model.vars[intern(t)].kind = VarKind::integer;
                break;
            default:
                throw data_error("lp parse: content outside any section: " + line);
        }
    }
    return model;
}

// Structural equality: constraints ordered, variables keyed by name.
inline bool models_equivalent(const IlpModel& a, const IlpModel& b) {
    if (a.name != b.name || a.notes != b.notes) return false;
    auto var_table = [](const IlpModel& m) {
        std::map<std::string, std::tuple<VarKind, Rat, std::optional<Rat>>> t;
        for (const IlpVar& v : m.vars) t[v.name] = {v.kind, v.lb, v.ub};
        return t;
    };
    if (var_table(a) != var_table(b)) return false;
    auto terms_of = [](const IlpModel& m, const std::vector<IlpTerm>& ts) {
        std::vector<std::pair<std::string, Rat>> out;
        for (const IlpTerm& t : ts) out.push_back({m.vars.at(t.var).name, t.coef});
        return out;
    };
    if (terms_of(a, a.objective) != terms_of(b, b.objective)) return false;
    if (a.constraints.size() != b.constraints.size()) return false;
    for (size_t i = 0; i < a.constraints.size(); ++i) {
        const auto& ca = a.constraints[i];
        const auto& cb = b.constraints[i];
        if (ca.name != cb.name || ca.rel != cb.rel || ca.rhs != cb.rhs) return false;
        if (terms_of(a, ca.terms) != terms_of(b, cb.terms)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Formulation emitters. Shared conventions: levels run 1..ell bottom to top,
// the source s is the smallest vertex id in the top terminal set, variable
// names carry endpoint and level suffixes, and every emitter finishes with a
// structural count check.

namespace detail {

inline void require_valid(const MlstInstance& inst, const char* who) {
    ValidationReport report = validate_instance(inst);
    if (!report.ok())
        throw data_error(std::string(who) + ": invalid instance: " + report.violations.front().invariant);
}

inline Vertex source_vertex(const MlstInstance& inst) {
    const auto& top = inst.terminals_at(inst.levels());
    Vertex s = top.front();
    for (Vertex v : top)
        if (v < s) s = v;
    return s;
}

inline std::string uv(Vertex u, Vertex v) { return std::to_string(u) + "_" + std::to_string(v); }

inline void check_counts(const IlpModel& m, size_t vars, size_t cons, const char* who) {
    if (m.vars.size() != vars || m.constraints.size() != cons)
        throw std::logic_error(std::string(who) + ": structural count mismatch");
}

}  // namespace detail

// Cut formulation: binary edge-level variables, one covering constraint per
// level and per vertex cut separating that level's terminals, linking rows
// x^i <= x^(i-1). Cuts are deduplicated against their complements by pinning
// the level's smallest terminal inside S; levels with one terminal add none.
inline IlpModel emit_cut_based(const MlstInstance& inst) {
    detail::require_valid(inst, "emit_cut_based");
    const WeightedGraph& g = inst.graph;
    int n = g.vertex_count();
    int ell = inst.levels();
    if (n > 20) throw guard_error("emit_cut_based: vertex bound exceeded");

    IlpModel model;
    model.name = "cut";
    model.notes.push_back("instance: " + instance_hash(inst));
    model.notes.push_back("cut separation applies each level's own terminal set");

    std::vector<std::vector<int>> x(ell + 1, std::vector<int>(g.edge_count()));
    for (int i = 1; i <= ell; ++i)
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            x[i][e] = model.add_var("x_" + detail::uv(g.edge(e).u, g.edge(e).v) + "_" + std::to_string(i),
                                    VarKind::binary);
    for (int i = 1; i <= ell; ++i)
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            model.objective.push_back({g.edge(e).cost, x[i][e]});

    size_t cut_rows = 0;
    for (int i = 1; i <= ell; ++i) {
        const auto& ts = inst.terminals_at(i);
        if (ts.size() < 2) continue;
        Vertex pin = ts.front();
        unsigned terminal_mask = 0;
        for (Vertex v : ts) terminal_mask |= 1u << v;
        unsigned rest = ((1u << n) - 1) & ~(1u << pin);
        // Enumerate S containing the pinned terminal and not covering T_i;
        // pinning dedupes S against its complement.
        unsigned sub = rest;
        for (;;) {
            unsigned full_s = sub | (1u << pin);
            if ((full_s & terminal_mask) != terminal_mask) {
                char buf[16];
                std::snprintf(buf, sizeof(buf), "%x", full_s);
                auto& row = model.add_constraint("cut_" + std::to_string(i) + "_" + buf, IlpRel::ge, Rat(1));
                for (EdgeId e = 0; e < g.edge_count(); ++e) {
                    bool inu = full_s >> g.edge(e).u & 1;
                    bool inv = full_s >> g.edge(e).v & 1;
                    if (inu != inv) row.terms.push_back({Rat(1), x[i][e]});
                }
                ++cut_rows;
            }
            if (sub == 0) break;
            sub = (sub - 1) & rest;
        }
    }
    size_t link_rows = 0;
    for (int i = 2; i <= ell; ++i)
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            auto& row = model.add_constraint(
                "link_" + std::to_string(i) + "_" + detail::uv(g.edge(e).u, g.edge(e).v), IlpRel::le, Rat(0));
            row.terms.push_back({Rat(1), x[i][e]});
            row.terms.push_back({Rat(-1), x[i - 1][e]});
            ++link_rows;
        }

    size_t expected_cuts = 0;
    for (int i = 1; i <= ell; ++i) {
        size_t k = inst.terminals_at(i).size();
        if (k >= 2) expected_cuts += (1ull << (n - 1)) - (1ull << (n - k));
    }
    if (cut_rows != expected_cuts) throw std::logic_error("emit_cut_based: cut row count mismatch");
    detail::check_counts(model, static_cast<size_t>(ell) * g.edge_count(), cut_rows + link_rows,
                         "emit_cut_based");
    return model;
}

// Multicommodity flow formulation: per level, one unit commodity from the
// source to every other terminal, with two directed flow variables per edge
// coupled to the undirected edge variable.
inline IlpModel emit_multicommodity(const MlstInstance& inst) {
    detail::require_valid(inst, "emit_multicommodity");
    const WeightedGraph& g = inst.graph;
    int ell = inst.levels();
    Vertex s = detail::source_vertex(inst);

    IlpModel model;
    model.name = "multicommodity-flow";
    model.notes.push_back("instance: " + instance_hash(inst));
    model.notes.push_back("includes flow-edge coupling rows cap_*");

    std::vector<std::vector<int>> x(ell + 1, std::vector<int>(g.edge_count()));
    for (int i = 1; i <= ell; ++i)
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            x[i][e] = model.add_var("x_" + detail::uv(g.edge(e).u, g.edge(e).v) + "_" + std::to_string(i),
                                    VarKind::binary);
    for (int i = 1; i <= ell; ++i)
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            model.objective.push_back({g.edge(e).cost, x[i][e]});

    size_t flow_vars = 0, cons_rows = 0, cap_rows = 0;
    for (int i = 1; i <= ell; ++i) {
        std::string li = std::to_string(i);
        for (Vertex p : inst.terminals_at(i)) {
            if (p == s) continue;
            std::string lp = std::to_string(p);
            // f_{p}_{u}_{v}_{i}: flow of commodity p from u to v on level i.
            std::vector<std::pair<int, int>> f(g.edge_count());  // (u->v id, v->u id)
            for (EdgeId e = 0; e < g.edge_count(); ++e) {
                const Edge& ed = g.edge(e);
                f[e].first = model.add_var("f_" + lp + "_" + detail::uv(ed.u, ed.v) + "_" + li,
                                           VarKind::integer, Rat(0), Rat(1));
                f[e].second = model.add_var("f_" + lp + "_" + detail::uv(ed.v, ed.u) + "_" + li,
                                            VarKind::integer, Rat(0), Rat(1));
                flow_vars += 2;
            }
            for (Vertex v = 0; v < g.vertex_count(); ++v) {
                Rat rhs = v == s ? Rat(1) : v == p ? Rat(-1) : Rat(0);
                auto& row = model.add_constraint("cons_" + li + "_" + lp + "_" + std::to_string(v),
                                                 IlpRel::eq, rhs);
                for (auto [w, e] : g.neighbors(v)) {
                    bool forward = g.edge(e).u == v;  // v -> w stored first when v is u
                    row.terms.push_back({Rat(1), forward ? f[e].first : f[e].second});
                    row.terms.push_back({Rat(-1), forward ? f[e].second : f[e].first});
                }
                ++cons_rows;
            }
            for (EdgeId e = 0; e < g.edge_count(); ++e) {
                auto& row = model.add_constraint(
                    "cap_" + li + "_" + lp + "_" + detail::uv(g.edge(e).u, g.edge(e).v), IlpRel::le, Rat(0));
                row.terms.push_back({Rat(1), f[e].first});
                row.terms.push_back({Rat(1), f[e].second});
                row.terms.push_back({Rat(-1), x[i][e]});
                ++cap_rows;
            }
        }
    }
    size_t link_rows = 0;
    for (int i = 2; i <= ell; ++i)
        for (EdgeId e = 0; e < g.edge_count(); ++e) {
            auto& row = model.add_constraint(
                "link_" + std::to_string(i) + "_" + detail::uv(g.edge(e).u, g.edge(e).v), IlpRel::le, Rat(0));
            row.terms.push_back({Rat(1), x[i][e]});
            row.terms.push_back({Rat(-1), x[i - 1][e]});
            ++link_rows;
        }

    size_t expected_flow = 0, expected_cons = 0, expected_cap = 0;
    for (int i = 1; i <= ell; ++i) {
        size_t commodities = inst.terminals_at(i).size() - 1;
        expected_flow += 2ull * g.edge_count() * commodities;
        expected_cons += static_cast<size_t>(g.vertex_count()) * commodities;
        expected_cap += static_cast<size_t>(g.edge_count()) * commodities;
    }
    if (flow_vars != expected_flow || cons_rows != expected_cons || cap_rows != expected_cap)
        throw std::logic_error("emit_multicommodity: structural count mismatch");
    detail::check_counts(model, static_cast<size_t>(ell) * g.edge_count() + flow_vars,
                         cons_rows + cap_rows + link_rows, "emit_multicommodity");
    return model;
}

// Single-commodity flow formulation on directed arc pairs, one flow system
// per level with supply |T_i|-1 at the source.
inline IlpModel emit_single_flow(const MlstInstance& inst) {
    detail::require_valid(inst, "emit_single_flow");
    const WeightedGraph& g = inst.graph;
    int ell = inst.levels();
    Vertex s = detail::source_vertex(inst);

    IlpModel model;
    model.name = "single-flow";
    model.notes.push_back("instance: " + instance_hash(inst));
    model.notes.push_back("level linking emitted as x^i <= x^(i-1)");

    // Arc a = 2e (u->v) or 2e+1 (v->u).
    auto arc_name = [&](EdgeId e, bool rev) {
        const Edge& ed = g.edge(e);
        return rev ? detail::uv(ed.v, ed.u) : detail::uv(ed.u, ed.v);
    };
    std::vector<std::vector<int>> xd(ell + 1), f(ell + 1);
    for (int i = 1; i <= ell; ++i) {
        xd[i].resize(2 * g.edge_count());
        f[i].resize(2 * g.edge_count());
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            for (int r = 0; r < 2; ++r)
                xd[i][2 * e + r] =
                    model.add_var("xd_" + arc_name(e, r) + "_" + std::to_string(i), VarKind::binary);
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            for (int r = 0; r < 2; ++r)
                f[i][2 * e + r] =
                    model.add_var("f_" + arc_name(e, r) + "_" + std::to_string(i), VarKind::integer);
    }
    for (int i = 1; i <= ell; ++i)
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            for (int r = 0; r < 2; ++r) model.objective.push_back({g.edge(e).cost, xd[i][2 * e + r]});

    for (int i = 1; i <= ell; ++i) {
        std::string li = std::to_string(i);
        const auto& ts = inst.terminals_at(i);
        long long supply = static_cast<long long>(ts.size()) - 1;
        std::vector<char> is_terminal(g.vertex_count(), 0);
        for (Vertex v : ts) is_terminal[v] = 1;
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
            Rat rhs = v == s ? Rat(supply) : is_terminal[v] ? Rat(-1) : Rat(0);
            auto& row = model.add_constraint("cons_" + li + "_" + std::to_string(v), IlpRel::eq, rhs);
            for (auto [w, e] : g.neighbors(v)) {
                bool forward = g.edge(e).u == v;
                row.terms.push_back({Rat(1), f[i][2 * e + (forward ? 0 : 1)]});
                row.terms.push_back({Rat(-1), f[i][2 * e + (forward ? 1 : 0)]});
            }
        }
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            for (int r = 0; r < 2; ++r) {
                auto& row = model.add_constraint("cap_" + li + "_" + arc_name(e, r), IlpRel::le, Rat(0));
                row.terms.push_back({Rat(1), f[i][2 * e + r]});
                row.terms.push_back({Rat(-supply), xd[i][2 * e + r]});
            }
    }
    for (int i = 2; i <= ell; ++i)
        for (EdgeId e = 0; e < g.edge_count(); ++e)
            for (int r = 0; r < 2; ++r) {
                auto& row = model.add_constraint("link_" + std::to_string(i) + "_" + arc_name(e, r),
                                                 IlpRel::le, Rat(0));
                row.terms.push_back({Rat(1), xd[i][2 * e + r]});
                row.terms.push_back({Rat(-1), xd[i - 1][2 * e + r]});
            }

    size_t m2 = 2ull * g.edge_count();
    detail::check_counts(model, 2 * m2 * ell,
                         static_cast<size_t>(ell) * g.vertex_count() + m2 * ell + m2 * (ell - 1),
                         "emit_single_flow");
    return model;
}

// Reduced single-flow formulation: flow only on the bottom level, per-arc
// level counters y, and terminal depth requirements. Integrality is kept
// only on the arc indicators.
inline IlpModel emit_reduced_flow(const MlstInstance& inst) {
    detail::require_valid(inst, "emit_reduced_flow");
    const WeightedGraph& g = inst.graph;
    int ell = inst.levels();
    Vertex s = detail::source_vertex(inst);
    long long bottom = static_cast<long long>(inst.terminals_at(1).size());

    IlpModel model;
    model.name = "reduced-flow";
    model.notes.push_back("instance: " + instance_hash(inst));

    auto arc_name = [&](EdgeId e, bool rev) {
        const Edge& ed = g.edge(e);
        return rev ? detail::uv(ed.v, ed.u) : detail::uv(ed.u, ed.v);
    };
    std::vector<int> x(2 * g.edge_count()), y(2 * g.edge_count()), f(2 * g.edge_count());
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        for (int r = 0; r < 2; ++r) x[2 * e + r] = model.add_var("xd_" + arc_name(e, r), VarKind::binary);
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        for (int r = 0; r < 2; ++r)
            y[2 * e + r] = model.add_var("y_" + arc_name(e, r), VarKind::continuous);
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        for (int r = 0; r < 2; ++r)
            f[2 * e + r] = model.add_var("f_" + arc_name(e, r), VarKind::continuous);
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        for (int r = 0; r < 2; ++r) model.objective.push_back({g.edge(e).cost, y[2 * e + r]});

    std::vector<int> level_of(g.vertex_count(), 0);
    for (int i = 1; i <= ell; ++i)
        for (Vertex v : inst.terminals_at(i)) level_of[v] = std::max(level_of[v], i);
    std::vector<char> bottom_terminal(g.vertex_count(), 0);
    for (Vertex v : inst.terminals_at(1)) bottom_terminal[v] = 1;

    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        Rat rhs = v == s ? Rat(bottom - 1) : bottom_terminal[v] ? Rat(-1) : Rat(0);
        auto& row = model.add_constraint("c2_" + std::to_string(v), IlpRel::eq, rhs);
        for (auto [w, e] : g.neighbors(v)) {
            bool forward = g.edge(e).u == v;
            row.terms.push_back({Rat(1), f[2 * e + (forward ? 0 : 1)]});
            row.terms.push_back({Rat(-1), f[2 * e + (forward ? 1 : 0)]});
        }
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        for (int r = 0; r < 2; ++r) {
            auto& row = model.add_constraint("c3_" + arc_name(e, r), IlpRel::le, Rat(0));
            row.terms.push_back({Rat(1), f[2 * e + r]});
            row.terms.push_back({Rat(1 - bottom), x[2 * e + r]});
        }
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        auto& row = model.add_constraint("c4_" + std::to_string(v), IlpRel::le, Rat(1));
        for (auto [w, e] : g.neighbors(v)) {
            bool incoming_forward = g.edge(e).v == v;  // u->v arc is 2e when v is edge.v
            row.terms.push_back({Rat(1), x[2 * e + (incoming_forward ? 0 : 1)]});
        }
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        for (int r = 0; r < 2; ++r) {
            auto& lo = model.add_constraint("c5a_" + arc_name(e, r), IlpRel::le, Rat(0));
            lo.terms.push_back({Rat(1), x[2 * e + r]});
            lo.terms.push_back({Rat(-1), y[2 * e + r]});
            auto& hi = model.add_constraint("c5b_" + arc_name(e, r), IlpRel::le, Rat(0));
            hi.terms.push_back({Rat(1), y[2 * e + r]});
            hi.terms.push_back({Rat(-ell), x[2 * e + r]});
        }
    size_t c6 = 0, c7 = 0;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        for (int r = 0; r < 2; ++r) {
            Vertex v = r == 0 ? g.edge(e).u : g.edge(e).v;  // arc tail
            Vertex w = g.other_end(e, v);
            if (v == s) continue;
            auto& rx = model.add_constraint("c6_" + detail::uv(v, w), IlpRel::ge, Rat(0));
            auto& ry = model.add_constraint("c7_" + detail::uv(v, w), IlpRel::ge, Rat(0));
            for (auto [u, e2] : g.neighbors(v)) {
                if (u == w) continue;
                bool incoming_forward = g.edge(e2).v == v;
                rx.terms.push_back({Rat(1), x[2 * e2 + (incoming_forward ? 0 : 1)]});
                ry.terms.push_back({Rat(1), y[2 * e2 + (incoming_forward ? 0 : 1)]});
            }
            rx.terms.push_back({Rat(-1), x[2 * e + r]});
            ry.terms.push_back({Rat(-1), y[2 * e + r]});
            ++c6;
            ++c7;
        }
    size_t c8 = 0;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (!bottom_terminal[v] || v == s) continue;
        auto& row = model.add_constraint("c8_" + std::to_string(v), IlpRel::ge, Rat(level_of[v]));
        for (auto [w, e] : g.neighbors(v)) {
            bool incoming_forward = g.edge(e).v == v;
            row.terms.push_back({Rat(1), y[2 * e + (incoming_forward ? 0 : 1)]});
        }
        ++c8;
    }

    size_t m2 = 2ull * g.edge_count();
    size_t expected_cons = static_cast<size_t>(g.vertex_count())  // c2
                           + m2                                   // c3
                           + static_cast<size_t>(g.vertex_count())  // c4
                           + 2 * m2                               // c5a, c5b
                           + c6 + c7 + c8;
    detail::check_counts(model, 3 * m2, expected_cons, "emit_reduced_flow");
    if (c6 != m2 - g.neighbors(s).size() || c7 != c6 || c8 != static_cast<size_t>(bottom) - 1)
        throw std::logic_error("emit_reduced_flow: row family count mismatch");
    return model;
}

enum class IlpForm { cut, mcf, scf, reduced };

inline IlpModel emit_ilp(const MlstInstance& inst, IlpForm form) {
    switch (form) {
        case IlpForm::cut: return emit_cut_based(inst);
        case IlpForm::mcf: return emit_multicommodity(inst);
        case IlpForm::scf: return emit_single_flow(inst);
        default: return emit_reduced_flow(inst);
    }
}

}  // namespace mlst
