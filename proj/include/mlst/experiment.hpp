#pragma once

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "mlst/netgen.hpp"
#include "mlst/oracle.hpp"
#include "mlst/ratio.hpp"

namespace mlst {

enum class OracleMode { off, on, auto_skip };

inline const char* to_string(OracleMode m) {
    switch (m) {
        case OracleMode::off: return "off";
        case OracleMode::on: return "on";
        default: return "auto";
    }
}

struct ExperimentConfig {
    std::vector<GraphModel> models{GraphModel::er, GraphModel::ws, GraphModel::ba};
    std::vector<int> n_list{8, 9};
    std::vector<int> ell_list{2, 3};
    std::vector<Tsm> tsm_list{Tsm::linear, Tsm::exponential};
    int reps = 5;
    std::vector<std::string> algos{"bu", "td", "cmp", "cmps"};
    SteinerMode mode = SteinerMode::exact;
    OracleMode oracle = OracleMode::auto_skip;
    std::uint64_t master_seed = 20250401;
    double er_epsilon = 0.1;
    int ws_k = 2;
    double ws_beta = 0.2;
    int ba_m0 = 3;
    int ba_m = 1;
    int max_edges = 10;
    int threads = 0;  // 0 = pick from hardware
    bool timing = false;

    bool operator==(const ExperimentConfig&) const = default;
};

// The shipped desk-scale batch: small instances inside the exhaustive-search
// budget so optimal costs are available on every row, all three graph models,
// both terminal selections.
inline ExperimentConfig default_desk_config() { return ExperimentConfig{}; }

namespace detail {

inline std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline GraphModel parse_model(const std::string& s) {
    if (s == "er") return GraphModel::er;
    if (s == "ws") return GraphModel::ws;
    if (s == "ba") return GraphModel::ba;
    throw data_error("config: unknown model " + s);
}

inline Tsm parse_tsm(const std::string& s) {
    if (s == "linear") return Tsm::linear;
    if (s == "exponential") return Tsm::exponential;
    throw data_error("config: unknown terminal selection " + s);
}

inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::logic_error("double format failure");
    return std::string(buf, end);
}

}  // namespace detail

// Flat "key = value" text, '#' comments. Unknown keys are rejected.
inline ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = true;
            for (char c : line)
                if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
            if (blank) continue;
            throw data_error("config: line " + std::to_string(lineno) + ": expected key = value");
        }
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t");
            size_t b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto as_int = [&](const std::string& s) {
            try {
                return std::stoll(s);
            } catch (const std::exception&) {
                throw data_error("config: bad integer for " + key);
            }
        };
        auto as_double = [&](const std::string& s) {
            try {
                return std::stod(s);
            } catch (const std::exception&) {
                throw data_error("config: bad number for " + key);
            }
        };
        if (key == "models") {
            cfg.models.clear();
            for (const auto& s : detail::split_list(value, ',')) cfg.models.push_back(detail::parse_model(s));
        } else if (key == "n") {
            cfg.n_list.clear();
            for (const auto& s : detail::split_list(value, ',')) cfg.n_list.push_back(static_cast<int>(as_int(s)));
        } else if (key == "ell") {
            cfg.ell_list.clear();
            for (const auto& s : detail::split_list(value, ',')) cfg.ell_list.push_back(static_cast<int>(as_int(s)));
        } else if (key == "tsm") {
            cfg.tsm_list.clear();
            for (const auto& s : detail::split_list(value, ',')) cfg.tsm_list.push_back(detail::parse_tsm(s));
        } else if (key == "reps") {
            cfg.reps = static_cast<int>(as_int(value));
        } else if (key == "algos") {
            cfg.algos = detail::split_list(value, ',');
        } else if (key == "mode") {
            if (value == "exact")
                cfg.mode = SteinerMode::exact;
            else if (value == "approx2")
                cfg.mode = SteinerMode::approx2;
            else
                throw data_error("config: unknown mode " + value);
        } else if (key == "oracle") {
            if (value == "on")
                cfg.oracle = OracleMode::on;
            else if (value == "off")
                cfg.oracle = OracleMode::off;
            else if (value == "auto")
                cfg.oracle = OracleMode::auto_skip;
            else
                throw data_error("config: unknown oracle mode " + value);
        } else if (key == "seed") {
            cfg.master_seed = static_cast<std::uint64_t>(as_int(value));
        } else if (key == "er_epsilon") {
            cfg.er_epsilon = as_double(value);
        } else if (key == "ws_k") {
            cfg.ws_k = static_cast<int>(as_int(value));
        } else if (key == "ws_beta") {
            cfg.ws_beta = as_double(value);
        } else if (key == "ba_m0") {
            cfg.ba_m0 = static_cast<int>(as_int(value));
        } else if (key == "ba_m") {
            cfg.ba_m = static_cast<int>(as_int(value));
        } else if (key == "max_edges") {
            cfg.max_edges = static_cast<int>(as_int(value));
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(as_int(value));
        } else if (key == "timing") {
            cfg.timing = value == "on" || value == "true" || value == "1";
        } else {
            throw data_error("config: unknown key " + key);
        }
    }
    if (cfg.models.empty() || cfg.n_list.empty() || cfg.ell_list.empty() || cfg.tsm_list.empty() ||
        cfg.reps < 1 || cfg.algos.empty())
        throw data_error("config: empty parameter list");
    return cfg;
}

inline constexpr const char* kCsvHeader =
    "model,n,ell,tsm,seed,rep,algo,mode,cost,opt_cost,ratio,stp_calls,runtime_ms,error";

namespace detail {

// Seeds are mixed from the instance coordinates, not from the batch position,
// so reordering the parameter lists never changes an instance.
inline std::uint64_t instance_seed(std::uint64_t master, GraphModel model, int n, int ell, Tsm tsm,
                                   int rep) {
    std::string key = std::string(to_string(model)) + "|" + std::to_string(n) + "|" +
                      std::to_string(ell) + "|" + to_string(tsm) + "|" + std::to_string(rep);
    std::uint64_t h = 1469598103934665603ull ^ master;
    for (unsigned char c : key) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::uint64_t state = h;
    return splitmix64(state);
}

inline std::string sanitize_error(std::string msg) {
    for (char& c : msg)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return msg;
}

struct TaskResult {
    std::vector<std::string> rows;
};

}  // namespace detail

inline std::string run_experiment(const ExperimentConfig& cfg) {
    struct Task {
        GraphModel model;
        int n, ell, rep;
        Tsm tsm;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (GraphModel model : cfg.models)
        for (int n : cfg.n_list)
            for (int ell : cfg.ell_list)
                for (Tsm tsm : cfg.tsm_list)
                    for (int rep = 0; rep < cfg.reps; ++rep)
                        tasks.push_back({model, n, ell, rep, tsm,
                                         detail::instance_seed(cfg.master_seed, model, n, ell, tsm, rep)});

    std::vector<detail::TaskResult> results(tasks.size());
    std::atomic<size_t> cursor{0};

    auto run_task = [&](const Task& task, detail::TaskResult& out) {
        GenSpec spec;
        spec.model = task.model;
        spec.n = task.n;
        spec.ell = task.ell;
        spec.tsm = task.tsm;
        spec.seed = task.seed;
        spec.er_epsilon = cfg.er_epsilon;
        spec.ws_k = cfg.ws_k;
        spec.ws_beta = cfg.ws_beta;
        spec.ba_m0 = cfg.ba_m0;
        spec.ba_m = cfg.ba_m;
        spec.max_edges = cfg.max_edges;

        std::string prefix = std::string(to_string(task.model)) + "," + std::to_string(task.n) + "," +
                             std::to_string(task.ell) + "," + to_string(task.tsm) + "," +
                             std::to_string(task.seed) + "," + std::to_string(task.rep);
        std::string gen_error;
        std::optional<MlstInstance> inst;
        try {
            inst = generate_instance(spec);
        } catch (const std::exception& ex) {
            gen_error = detail::sanitize_error(ex.what());
        }

        std::string opt_cost, opt_error;
        std::optional<Rat> opt;
        if (inst && cfg.oracle != OracleMode::off) {
            bool fits = inst->graph.edge_count() <= 10 && inst->levels() <= 3;
            if (fits) {
                opt = oracle_mlst(*inst).cost;
                opt_cost = opt->to_decimal();
            } else if (cfg.oracle == OracleMode::on) {
                opt_error = "oracle guard exceeded";
            }
        }

        for (const std::string& algo : cfg.algos) {
            std::string row = prefix + "," + algo + "," + to_string(cfg.mode) + ",";
            if (!inst) {
                out.rows.push_back(row + ",,,,," + gen_error);
                continue;
            }
            try {
                auto start = std::chrono::steady_clock::now();
                HeuristicRun run = [&]() {
                    if (algo == "bu") return bottom_up(*inst, cfg.mode);
                    if (algo == "td") return top_down(*inst, cfg.mode);
                    if (algo == "cmp") return composite_full(*inst, cfg.mode);
                    if (algo == "cmps") return guaranteed_composite(*inst, cfg.mode);
                    throw data_error("unknown algorithm " + algo);
                }();
                auto stop = std::chrono::steady_clock::now();
                row += run.cost.to_decimal();
                row += "," + opt_cost + ",";
                if (opt) row += detail::format_double(run.cost.to_double() / opt->to_double());
                row += "," + std::to_string(run.stp_calls) + ",";
                if (cfg.timing)
                    row += std::to_string(
                        std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count());
                row += "," + opt_error;
                out.rows.push_back(row);
            } catch (const std::exception& ex) {
                out.rows.push_back(row + ",,,,," + detail::sanitize_error(ex.what()));
            }
        }
    };

    int threads = cfg.threads > 0 ? cfg.threads
                                  : std::max(1, std::min(8, static_cast<int>(std::thread::hardware_concurrency())));
    if (threads > 1 && tasks.size() > 1) {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    size_t i = cursor.fetch_add(1);
                    if (i >= tasks.size()) return;
                    run_task(tasks[i], results[i]);
                }
            });
        for (auto& th : pool) th.join();
    } else {
        for (size_t i = 0; i < tasks.size(); ++i) run_task(tasks[i], results[i]);
    }

    std::string csv = std::string(kCsvHeader) + "\n";
    for (const auto& r : results)
        for (const std::string& row : r.rows) csv += row + "\n";
    return csv;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Quartiles under the inclusive-median convention: for odd counts the median
// joins both halves.
struct Quartiles {
    double min, q1, median, q3, max;
};

inline double median_of(const std::vector<double>& v, size_t lo, size_t hi) {  // [lo, hi)
    size_t n = hi - lo;
    size_t mid = lo + n / 2;
    if (n % 2 == 1) return v[mid];
    return (v[mid - 1] + v[mid]) / 2.0;
}

inline Quartiles quartiles(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    Quartiles q{};
    q.min = v.front();
    q.max = v.back();
    q.median = median_of(v, 0, n);
    if (n == 1) {
        q.q1 = q.q3 = v[0];
        return q;
    }
    size_t half = n / 2;
    if (n % 2 == 1) {
        q.q1 = median_of(v, 0, half + 1);
        q.q3 = median_of(v, half, n);
    } else {
        q.q1 = median_of(v, 0, half);
        q.q3 = median_of(v, half, n);
    }
    return q;
}

}  // namespace detail

// Groups experiment rows by the requested key columns and summarizes the
// ratio column: count plus min, Q1, median, Q3, max.
inline std::string aggregate_csv(std::string_view csv, const std::vector<std::string>& by) {
    std::istringstream in{std::string(csv)};
    std::string line;
    if (!std::getline(in, line)) throw data_error("aggregate: empty csv");
    std::vector<std::string> header = detail::split_csv_line(line);
    std::vector<size_t> key_cols;
    for (const std::string& key : by) {
        auto it = std::find(header.begin(), header.end(), key);
        if (it == header.end()) throw data_error("aggregate: unknown column " + key);
        key_cols.push_back(static_cast<size_t>(it - header.begin()));
    }
    auto ratio_it = std::find(header.begin(), header.end(), "ratio");
    if (ratio_it == header.end()) throw data_error("aggregate: csv has no ratio column");
    size_t ratio_col = static_cast<size_t>(ratio_it - header.begin());

    std::map<std::vector<std::string>, std::vector<double>> groups;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields = detail::split_csv_line(line);
        if (fields.size() != header.size()) throw data_error("aggregate: malformed row: " + line);
        std::vector<std::string> key;
        for (size_t c : key_cols) key.push_back(fields[c]);
        auto& bucket = groups[key];
        const std::string& r = fields[ratio_col];
        if (!r.empty()) {
            try {
                bucket.push_back(std::stod(r));
            } catch (const std::exception&) {
                throw data_error("aggregate: bad ratio value: " + r);
            }
        }
    }

    std::string out;
    for (const std::string& key : by) out += key + ",";
    out += "count,min,q1,median,q3,max\n";
    for (const auto& [key, values] : groups) {
        for (const std::string& k : key) out += k + ",";
        out += std::to_string(values.size());
        if (!values.empty()) {
            detail::Quartiles q = detail::quartiles(values);
            out += "," + detail::format_double(q.min) + "," + detail::format_double(q.q1) + "," +
                   detail::format_double(q.median) + "," + detail::format_double(q.q3) + "," +
                   detail::format_double(q.max);
        } else {
            out += ",,,,,";
        }
        out += "\n";
    }
    return out;
}

}  // namespace mlst
