// wrsn-sched: generate instances, train the scheduler, run solvers and sweeps.
//
// Exit codes: 0 success, 1 invalid input, 2 infeasible where feasibility was
// required (including deployments that cannot reach k-coverage).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wrsn/baselines.hpp"
#include "wrsn/dqn.hpp"
#include "wrsn/experiment.hpp"
#include "wrsn/geometry.hpp"
#include "wrsn/text.hpp"

namespace fs = std::filesystem;
using namespace wrsn;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitInfeasible = 2;

struct Options {
    std::string variant;
    int n = 10;
    std::uint64_t seed = 1;
    std::optional<int> k;
    std::optional<double> alpha;
    std::optional<double> ie;
    std::optional<double> timespan;
    std::optional<double> area;
    double dt = 1.0;
    std::string instance;
    std::optional<std::string> solvers;
    int episodes = 200;
    std::string out;
    std::string checkpoint;
    bool require_feasible = false;
    int restarts = 100;
    int train_instances = 8;
    int embed_dim = 64;
    int rounds = 4;
    double lr = 1e-3;
    std::string axis = "n";
    std::string values;
    int reps = 3;
    int threads = 0;
};

std::vector<std::string> list_of(const std::string& s) {
    std::vector<std::string> out;
    for (auto& part : split(s, ',')) {
        auto t = trim(part);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

Variant variant_of(const Options& o) {
    if (o.variant.empty()) throw ValidationError("--variant is required");
    return parse_variant(o.variant);
}

GenParams gen_params(const Options& o, Variant v) {
    GenParams g = GenParams::defaults(v);
    if (o.k) g.coverage_k = *o.k;
    if (o.alpha) g.alpha = *o.alpha;
    if (o.ie) g.energy_capacity = *o.ie;
    if (o.timespan) g.timespan = *o.timespan;
    if (o.area) g.area_side = *o.area;
    if (v == Variant::P1_MobilePath) g.meet_dt = o.dt;
    return g;
}

ProblemInstance instance_of(const Options& o) {
    if (!o.instance.empty()) return load_instance(o.instance);
    const Variant v = variant_of(o);
    return generate_instance(v, o.n, gen_params(o, v), o.seed);
}

fs::path out_dir(const Options& o) {
    fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
    fs::create_directories(dir);
    return dir;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    return os;
}

TrainConfig train_config(const Options& o, Variant v) {
    TrainConfig cfg = TrainConfig::defaults(v);
    cfg.episodes = o.episodes;
    cfg.embed_dim = o.embed_dim;
    cfg.rounds = o.rounds;
    cfg.learning_rate = o.lr;
    cfg.seed = o.seed;
    return cfg;
}

int cmd_gen(const Options& o) {
    const ProblemInstance inst = instance_of(o);
    if (o.out.empty()) {
        write_instance(std::cout, inst);
    } else {
        if (auto parent = fs::path(o.out).parent_path(); !parent.empty()) fs::create_directories(parent);
        save_instance(o.out, inst);
        std::cout << o.out << '\n';
    }
    return 0;
}

int cmd_train(const Options& o) {
    const Variant v = variant_of(o);
    const GenParams g = gen_params(o, v);
    std::vector<ProblemInstance> training;
    for (int i = 0; static_cast<int>(training.size()) < o.train_instances && i < 10 * o.train_instances; ++i) {
        try {
            training.push_back(generate_instance(v, o.n, g, mix_seed(o.seed, 1'000'000 + i)));
        } catch (const InfeasibleDeployment&) {
        }
    }
    if (training.empty()) throw InfeasibleDeployment("no training deployment reached the requested coverage");
    const TrainResult res = train(training, train_config(o, v), [](const TrainLogRow& r) {
        if ((r.episode + 1) % 50 == 0) {
            std::cerr << "episode " << r.episode + 1 << " objective " << fmt_double(r.objective) << " epsilon "
                      << fmt_double(r.epsilon) << '\n';
        }
    });
    const fs::path dir = out_dir(o);
    auto log = open_out(dir / "train_log.csv");
    write_train_log_csv(log, res.log);
    const fs::path ckpt = o.checkpoint.empty() ? dir / "params.txt" : fs::path(o.checkpoint);
    save_params(ckpt, res.params);
    std::cout << ckpt.string() << '\n';
    return 0;
}

int cmd_solve(const Options& o) {
    const ProblemInstance inst = instance_of(o);
    const auto solvers = list_of(o.solvers.value_or("greedy"));
    if (solvers.empty()) throw ValidationError("--solvers lists no solver");
    SolverSettings st;
    st.dt = o.dt;
    st.random_restarts = o.restarts;
    std::optional<EmbeddingParams> params;
    for (const auto& s : solvers) {
        if (!solver_supports(s, inst.variant)) {
            throw ValidationError("solver '" + s + "' is unknown or does not apply to " + std::string(to_string(inst.variant)));
        }
        if (s == "dqn") {
            if (o.checkpoint.empty()) throw ValidationError("solver dqn needs --checkpoint");
            params = load_params(o.checkpoint);
            if (params->feature_width() != kFeatureWidth) throw ValidationError("checkpoint feature width mismatch");
            st.dqn = &*params;
        }
    }
    std::optional<fs::path> dir;
    if (!o.out.empty()) dir = out_dir(o);
    const Environment env(inst);
    std::vector<SolveResult> results;
    for (std::size_t i = 0; i < solvers.size(); ++i) results.push_back(run_solver(solvers[i], inst, st, mix_seed(o.seed, i, 3)));

    write_results_header(std::cout);
    for (const auto& r : results) write_result_row(std::cout, r);
    if (dir) {
        auto os = open_out(*dir / "results.csv");
        write_results_header(os);
        for (const auto& r : results) {
            write_result_row(os, r);
            const Environment& trace_env = env;
            auto trace = open_out(*dir / ("trace_" + r.solver + ".csv"));
            if (inst.variant == Variant::P3_KCoverage && (r.solver == "dp" || r.solver == "brute")) {
                EnvOptions eo;
                eo.p3_grid_dt = o.dt;
                const Environment grid_env(inst, eo);
                write_trace_csv(trace, tour_trace(grid_env, r.state));
            } else {
                write_trace_csv(trace, tour_trace(trace_env, r.state));
            }
        }
    }
    if (o.require_feasible) {
        for (const auto& r : results) {
            if (!r.feasible) {
                std::cerr << "solver " << r.solver << " returned an infeasible schedule\n";
                return kExitInfeasible;
            }
        }
    }
    return 0;
}

int cmd_sweep(const Options& o) {
    ExperimentSpec spec;
    spec.variant = variant_of(o);
    spec.axis = parse_axis(o.axis);
    for (const auto& v : list_of(o.values)) spec.values.push_back(parse_double(v));
    spec.solvers = list_of(o.solvers.value_or(""));
    spec.repetitions = o.reps;
    spec.seed = o.seed;
    spec.out = out_dir(o);
    spec.n = o.n;
    spec.gen = gen_params(o, spec.variant);
    spec.settings.dt = o.dt;
    spec.settings.random_restarts = o.restarts;
    spec.train = train_config(o, spec.variant);
    spec.train_instances = o.train_instances;
    spec.threads = o.threads > 0 ? o.threads : thread_budget(1);
    const auto rows = run_experiment(spec);
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.status == "ok" ? 0 : 1;
    std::cout << "wrote " << rows.size() << " runs to " << spec.out.string();
    if (failed) std::cout << " (" << failed << " not ok)";
    std::cout << '\n';
    return 0;
}

int cmd_dump_graph(const Options& o) {
    const ProblemInstance inst = instance_of(o);
    const fs::path dir = out_dir(o);
    const ChargingGraph g(inst);
    auto edges = open_out(dir / "edges.csv");
    write_edges_csv(edges, g);
    if (inst.variant == Variant::P3_KCoverage) {
        const TimeExpandedDAG dag(inst, o.dt);
        auto os = open_out(dir / "dag.csv");
        write_dag_csv(os, inst, dag);
        std::cout << g.edges().size() << " edges, " << dag.vertex_count() << " dag vertices, " << dag.edge_count()
                  << " dag edges\n";
    } else {
        std::cout << g.edges().size() << " edges\n";
    }
    return 0;
}

int cmd_dump_coverage(const Options& o) {
    const ProblemInstance inst = instance_of(o);
    if (inst.variant != Variant::P3_KCoverage) throw ValidationError("dump-coverage needs a p3 instance");
    const SubregionTable table = build_subregions(inst);
    if (o.out.empty()) {
        write_table_csv(std::cout, table);
    } else {
        auto os = open_out(out_dir(o) / "coverage.csv");
        write_table_csv(os, table);
        std::cout << table.size() << " subregions, deficit " << table.deficit() << '\n';
    }
    return 0;
}

void add_instance_options(CLI::App& app, Options& o) {
    app.add_option("--variant", o.variant, "p1 | p2 | p3");
    app.add_option("--n", o.n, "number of sensors")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--k", o.k, "coverage requirement (p3)");
    app.add_option("--alpha", o.alpha, "request threshold as a fraction of capacity");
    app.add_option("--ie", o.ie, "charger energy capacity in joules (p2)");
    app.add_option("--timespan", o.timespan, "charging timespan in seconds (p1)");
    app.add_option("--area", o.area, "side of the square field in meters");
    app.add_option("--dt", o.dt, "time step in seconds")->check(CLI::PositiveNumber);
    app.add_option("--instance", o.instance, "read the instance from a file instead of generating it");
    app.add_option("--out", o.out, "output file or directory");
}

void add_training_options(CLI::App& app, Options& o) {
    app.add_option("--episodes", o.episodes, "training episodes")->check(CLI::PositiveNumber);
    app.add_option("--train-instances", o.train_instances, "generated training instances")->check(CLI::PositiveNumber);
    app.add_option("--embed-dim", o.embed_dim, "embedding width p")->check(CLI::PositiveNumber);
    app.add_option("--rounds", o.rounds, "message-passing rounds T")->check(CLI::PositiveNumber);
    app.add_option("--lr", o.lr, "learning rate")->check(CLI::PositiveNumber);
}

// `key = value` lines become `--key value` arguments placed before the
// command-line ones, so explicit flags win.
std::vector<std::string> config_args(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot read config file " + path.string());
    std::vector<std::string> args;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty()) throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": empty key");
        if (key == "require-feasible") {
            if (value == "true" || value == "1") args.push_back("--require-feasible");
            continue;
        }
        args.push_back("--" + key);
        args.push_back(value);
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> raw(argv + 1, argv + argc);
    // Pull --config out of the arguments and splice its contents in.
    std::vector<std::string> args;
    std::optional<fs::path> config;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == "--config" && i + 1 < raw.size()) {
            config = raw[++i];
        } else if (raw[i].rfind("--config=", 0) == 0) {
            config = raw[i].substr(9);
        } else {
            args.push_back(raw[i]);
        }
    }

    Options o;
    CLI::App app{"Charger scheduling for wireless rechargeable sensor networks"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");
    app.add_option("--config", "file of `key = value` lines; command-line flags override it");

    auto* gen = app.add_subcommand("gen", "generate an instance file");
    auto* trn = app.add_subcommand("train", "train the DQN scheduler and write a checkpoint");
    auto* solve = app.add_subcommand("solve", "run solvers on one instance");
    auto* sweep = app.add_subcommand("sweep", "run an experiment grid and write CSV tables");
    auto* dgraph = app.add_subcommand("dump-graph", "write the charging graph (and DAG for p3)");
    auto* dcov = app.add_subcommand("dump-coverage", "write the subregion table of a p3 instance");
    for (auto* sub : {gen, trn, solve, sweep, dgraph, dcov}) {
        sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        add_instance_options(*sub, o);
    }
    add_training_options(*trn, o);
    trn->add_option("--checkpoint", o.checkpoint, "where to write the parameters");
    add_training_options(*sweep, o);
    for (auto* sub : {solve, sweep}) {
        sub->add_option("--solvers", o.solvers, "comma-separated: dqn,greedy,random,mst,cmst,acs,dp,brute");
        sub->add_option("--restarts", o.restarts, "random baseline restarts")->check(CLI::PositiveNumber);
    }
    solve->add_option("--checkpoint", o.checkpoint, "parameters for the dqn solver");
    solve->add_flag("--require-feasible", o.require_feasible, "exit 2 if any solver returns an infeasible schedule");
    sweep->add_option("--axis", o.axis, "n | timespan | dt | ie | k | alpha");
    sweep->add_option("--values", o.values, "comma-separated axis values")->required();
    sweep->add_option("--reps", o.reps, "repetitions per axis value")->check(CLI::PositiveNumber);
    sweep->add_option("--threads", o.threads, "worker threads (default: WRSN_SCHED_THREADS or 1)");

    try {
        if (config && !args.empty()) {
            const auto extra = config_args(*config);
            args.insert(args.begin() + 1, extra.begin(), extra.end());
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitInvalid;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }

    try {
        if (gen->parsed()) return cmd_gen(o);
        if (trn->parsed()) return cmd_train(o);
        if (solve->parsed()) return cmd_solve(o);
        if (sweep->parsed()) return cmd_sweep(o);
        if (dgraph->parsed()) return cmd_dump_graph(o);
        if (dcov->parsed()) return cmd_dump_coverage(o);
    } catch (const InfeasibleDeployment& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}
