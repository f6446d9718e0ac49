#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mlst/experiment.hpp"
#include "mlst/ilp.hpp"
#include "mlst/io.hpp"
#include "mlst/oracle.hpp"
#include "mlst/ratio.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitGuard = 3;
constexpr int kExitData = 4;

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mlst::data_error("cannot write " + path);
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mlst::data_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

mlst::SteinerMode parse_mode(const std::string& s) {
    if (s == "exact") return mlst::SteinerMode::exact;
    if (s == "approx2") return mlst::SteinerMode::approx2;
    throw mlst::data_error("unknown mode " + s);
}

void print_run(const mlst::MlstInstance& inst, const mlst::HeuristicRun& run) {
    std::cout << "cost " << run.cost.to_decimal() << "\n";
    std::cout << "stp_calls " << run.stp_calls << "\n";
    if (run.subset_used) std::cout << "q " << run.subset_used->to_string() << "\n";
    for (int i = 1; i <= run.solution.levels(); ++i) {
        const auto& set = run.solution.level(i);
        mlst::Rat cost;
        for (mlst::EdgeId id : set) cost += inst.graph.edge(id).cost;
        std::cout << "level " << i << " cost " << cost.to_decimal() << " edges";
        for (mlst::EdgeId id : set)
            std::cout << " " << inst.graph.edge(id).u << "-" << inst.graph.edge(id).v;
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-level Steiner tree toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random instance file");
    std::string gen_model = "er", gen_tsm = "linear", gen_out;
    int gen_n = 20, gen_ell = 2, gen_ws_k = 6, gen_ba_m0 = 10, gen_ba_m = 5, gen_max_edges = 0;
    double gen_eps = 1.0, gen_ws_beta = 0.2;
    std::uint64_t gen_seed = 1;
    gen->add_option("--model", gen_model, "er|ws|ba")->check(CLI::IsMember({"er", "ws", "ba"}));
    gen->add_option("--n", gen_n, "vertex count")->required();
    gen->add_option("--ell", gen_ell, "level count");
    gen->add_option("--tsm", gen_tsm, "linear|exponential")
        ->check(CLI::IsMember({"linear", "exponential"}));
    gen->add_option("--seed", gen_seed, "64-bit seed");
    gen->add_option("--epsilon", gen_eps, "ER connectivity margin");
    gen->add_option("--ws-k", gen_ws_k, "WS ring degree (even)");
    gen->add_option("--ws-beta", gen_ws_beta, "WS rewiring probability");
    gen->add_option("--ba-m0", gen_ba_m0, "BA seed size");
    gen->add_option("--ba-m", gen_ba_m, "BA edges per arrival");
    gen->add_option("--max-edges", gen_max_edges, "regenerate until |E| fits (0 = off)");
    gen->add_option("--out", gen_out, "output file (default stdout)");

    // solve
    auto* solve = app.add_subcommand("solve", "Run a heuristic on an instance file");
    std::string solve_algo = "cmp", solve_mode = "exact", solve_in, solve_q;
    solve->add_option("--algo", solve_algo, "bu|td|cmpq|cmp|cmps")
        ->check(CLI::IsMember({"bu", "td", "cmpq", "cmp", "cmps"}));
    solve->add_option("--mode", solve_mode, "approx2|exact")
        ->check(CLI::IsMember({"approx2", "exact"}));
    solve->add_option("--in", solve_in, "instance file")->required();
    solve->add_option("--q", solve_q, "comma-separated level subset for cmpq, e.g. 1,3,4");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum for a micro instance");
    std::string oracle_in;
    oracle->add_option("--in", oracle_in, "instance file")->required();

    // ratio
    auto* ratio = app.add_subcommand("ratio", "Approximation ratio of the composite heuristic");
    int ratio_ell = 2;
    std::string ratio_method = "colgen", ratio_out;
    bool ratio_table = false;
    ratio->add_option("--ell", ratio_ell, "level count")->required();
    ratio->add_option("--method", ratio_method, "full|colgen")->check(CLI::IsMember({"full", "colgen"}));
    ratio->add_flag("--table", ratio_table, "emit CSV table for 1..ell");
    ratio->add_option("--out", ratio_out, "output file (default stdout)");

    // emit-ilp
    auto* emit = app.add_subcommand("emit-ilp", "Write an ILP model file for an instance");
    std::string emit_form = "reduced", emit_in, emit_out;
    emit->add_option("--form", emit_form, "cut|mcf|scf|reduced")
        ->check(CLI::IsMember({"cut", "mcf", "scf", "reduced"}));
    emit->add_option("--in", emit_in, "instance file")->required();
    emit->add_option("--out", emit_out, "output file (default stdout)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run a batch and emit CSV");
    std::string exp_config, exp_out;
    bool exp_timing = false;
    exp->add_option("--config", exp_config, "key = value config file (defaults when omitted)");
    exp->add_option("--out", exp_out, "output CSV file (default stdout)");
    exp->add_flag("--timing", exp_timing, "fill runtime_ms (breaks byte-reproducibility)");

    // aggregate
    auto* agg = app.add_subcommand("aggregate", "Summarize an experiment CSV");
    std::string agg_in, agg_by = "algo", agg_out;
    agg->add_option("--in", agg_in, "experiment CSV")->required();
    agg->add_option("--by", agg_by, "comma-separated grouping keys");
    agg->add_option("--out", agg_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gen) {
            mlst::GenSpec spec;
            spec.model = mlst::detail::parse_model(gen_model);
            spec.n = gen_n;
            spec.ell = gen_ell;
            spec.tsm = mlst::detail::parse_tsm(gen_tsm);
            spec.seed = gen_seed;
            spec.er_epsilon = gen_eps;
            spec.ws_k = gen_ws_k;
            spec.ws_beta = gen_ws_beta;
            spec.ba_m0 = gen_ba_m0;
            spec.ba_m = gen_ba_m;
            spec.max_edges = gen_max_edges;
            write_output(gen_out, mlst::write_instance(mlst::generate_instance(spec)));
        } else if (*solve) {
            mlst::MlstInstance inst = mlst::read_instance_file(solve_in);
            mlst::SteinerMode mode = parse_mode(solve_mode);
            mlst::HeuristicRun run = [&] {
                if (solve_algo == "bu") return mlst::bottom_up(inst, mode);
                if (solve_algo == "td") return mlst::top_down(inst, mode);
                if (solve_algo == "cmp") return mlst::composite_full(inst, mode);
                if (solve_algo == "cmps") return mlst::guaranteed_composite(inst, mode);
                if (solve_q.empty()) throw mlst::data_error("cmpq needs --q");
                std::vector<int> levels;
                for (const auto& tok : mlst::detail::split_list(solve_q, ','))
                    levels.push_back(std::stoi(tok));
                return mlst::composite_on_q(inst, mlst::LevelSubset::of(levels, inst.levels()), mode);
            }();
            print_run(inst, run);
        } else if (*oracle) {
            mlst::MlstInstance inst = mlst::read_instance_file(oracle_in);
            mlst::OracleMlstResult res = mlst::oracle_mlst(inst);
            std::cout << "opt " << res.cost.to_decimal() << "\n";
            for (int i = 1; i <= res.solution.levels(); ++i) {
                std::cout << "level " << i << " edges";
                for (mlst::EdgeId id : res.solution.level(i))
                    std::cout << " " << inst.graph.edge(id).u << "-" << inst.graph.edge(id).v;
                std::cout << "\n";
            }
        } else if (*ratio) {
            mlst::RatioMethod method =
                ratio_method == "full" ? mlst::RatioMethod::full : mlst::RatioMethod::colgen;
            if (ratio_table) {
                write_output(ratio_out, mlst::ratio_table_csv(ratio_ell, method));
            } else {
                mlst::RatioLpReport report = mlst::compute_ratio(ratio_ell, method);
                std::ostringstream out;
                out << "ell " << report.ell << "\n";
                out << "method " << mlst::to_string(report.method) << "\n";
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.6f", report.t_value);
                out << "t " << buf << "\n";
                out << "iterations " << report.iterations << "\n";
                out << "pool " << report.pool.size() << "\n";
                out << "y";
                for (double y : report.y) {
                    std::snprintf(buf, sizeof(buf), " %.6f", y);
                    out << buf;
                }
                out << "\n";
                write_output(ratio_out, out.str());
            }
        } else if (*emit) {
            mlst::MlstInstance inst = mlst::read_instance_file(emit_in);
            mlst::IlpForm form = emit_form == "cut"   ? mlst::IlpForm::cut
                                 : emit_form == "mcf" ? mlst::IlpForm::mcf
                                 : emit_form == "scf" ? mlst::IlpForm::scf
                                                      : mlst::IlpForm::reduced;
            mlst::IlpModel model = mlst::emit_ilp(inst, form);
            write_output(emit_out, mlst::write_lp(model));
            std::cerr << "variables " << model.vars.size() << " constraints " << model.constraints.size()
                      << "\n";
        } else if (*exp) {
            mlst::ExperimentConfig cfg = exp_config.empty()
                                             ? mlst::default_desk_config()
                                             : mlst::parse_config(read_file(exp_config));
            if (exp_timing) cfg.timing = true;
            write_output(exp_out, mlst::run_experiment(cfg));
        } else if (*agg) {
            std::vector<std::string> keys = mlst::detail::split_list(agg_by, ',');
            write_output(agg_out, mlst::aggregate_csv(read_file(agg_in), keys));
        }
    } catch (const mlst::guard_error& e) {
        std::cerr << "guard violation: " << e.what() << "\n";
        return kExitGuard;
    } catch (const mlst::data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}
