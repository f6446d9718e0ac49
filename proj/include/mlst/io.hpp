#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mlst/graph.hpp"

namespace mlst {

// Line-oriented instance format, '#' starts a comment:
//   mlst 1
//   n <V> m <E> l <L>
//   e <u> <v> <w>            (E lines, 0-based ids, positive decimal weight)
//   t <i> <k> <v1> ... <vk>  (L lines, levels 1..L bottom to top)
// The writer emits canonical ordering (edges by (u,v), terminals ascending)
// so equal instances serialize to identical bytes.

inline MlstInstance read_instance(std::istream& in) {
    std::vector<std::string> tokens;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw data_error("instance: line " + std::to_string(lineno) + ": " + msg);
    };

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> row;
        std::string tok;
        while (ls >> tok) row.push_back(tok);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    lineno = 0;

    size_t r = 0;
    auto next_row = [&]() -> const std::vector<std::string>& {
        if (r >= rows.size()) throw data_error("instance: unexpected end of file");
        return rows[r++];
    };
    auto parse_int = [&](const std::string& s) -> long long {
        try {
            size_t pos = 0;
            long long v = std::stoll(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw data_error("instance: bad integer '" + s + "'");
        }
    };

    const auto& magic = next_row();
    if (magic.size() != 2 || magic[0] != "mlst" || magic[1] != "1")
        throw data_error("instance: missing 'mlst 1' header");

    const auto& dims = next_row();
    if (dims.size() != 6 || dims[0] != "n" || dims[2] != "m" || dims[4] != "l")
        throw data_error("instance: malformed dimension line");
    long long n = parse_int(dims[1]);
    long long m = parse_int(dims[3]);
    long long ell = parse_int(dims[5]);
    if (n <= 0 || m < 0 || ell < 1) throw data_error("instance: bad dimensions");

    std::vector<Edge> edges;
    edges.reserve(static_cast<size_t>(m));
    for (long long k = 0; k < m; ++k) {
        const auto& row = next_row();
        if (row.size() != 4 || row[0] != "e") throw data_error("instance: malformed edge line");
        Edge e;
        e.u = static_cast<Vertex>(parse_int(row[1]));
        e.v = static_cast<Vertex>(parse_int(row[2]));
        try {
            e.cost = Rat::from_decimal(row[3]);
        } catch (const std::exception& ex) {
            throw data_error(std::string("instance: bad edge weight: ") + ex.what());
        }
        edges.push_back(e);
    }

    std::vector<std::vector<Vertex>> terminals(static_cast<size_t>(ell));
    for (long long k = 0; k < ell; ++k) {
        const auto& row = next_row();
        if (row.size() < 3 || row[0] != "t") throw data_error("instance: malformed terminal line");
        long long level = parse_int(row[1]);
        long long count = parse_int(row[2]);
        if (level < 1 || level > ell) throw data_error("instance: terminal level out of range");
        if (static_cast<long long>(row.size()) != 3 + count)
            throw data_error("instance: terminal count mismatch at level " + std::to_string(level));
        std::vector<Vertex> set;
        set.reserve(static_cast<size_t>(count));
        for (long long j = 0; j < count; ++j) set.push_back(static_cast<Vertex>(parse_int(row[3 + j])));
        std::sort(set.begin(), set.end());
        if (!terminals[static_cast<size_t>(level - 1)].empty())
            throw data_error("instance: duplicate terminal line for level " + std::to_string(level));
        terminals[static_cast<size_t>(level - 1)] = std::move(set);
    }
    if (r != rows.size()) throw data_error("instance: trailing content");

    MlstInstance inst{WeightedGraph(static_cast<int>(n), std::move(edges)), std::move(terminals)};
    ValidationReport report = validate_instance(inst);
    if (!report.ok()) {
        std::string msg = "instance: invalid:";
        for (const auto& v : report.violations) msg += " [" + v.invariant + ": " + v.detail + "]";
        throw data_error(msg);
    }
    return inst;
}

inline MlstInstance read_instance_string(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_instance(in);
}

inline MlstInstance read_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("instance: cannot open " + path);
    return read_instance(in);
}

inline std::string write_instance(const MlstInstance& inst) {
    std::ostringstream out;
    out << "mlst 1\n";
    out << "n " << inst.graph.vertex_count() << " m " << inst.graph.edge_count() << " l "
        << inst.levels() << "\n";
    std::vector<Edge> edges = inst.graph.edges();
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
    for (const Edge& e : edges)
        out << "e " << e.u << " " << e.v << " " << e.cost.to_decimal() << "\n";
    for (int i = 1; i <= inst.levels(); ++i) {
        std::vector<Vertex> set = inst.terminals_at(i);
        std::sort(set.begin(), set.end());
        out << "t " << i << " " << set.size();
        for (Vertex v : set) out << " " << v;
        out << "\n";
    }
    return out.str();
}

inline void write_instance_file(const MlstInstance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("instance: cannot write " + path);
    out << write_instance(inst);
}

}  // namespace mlst
