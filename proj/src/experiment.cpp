#include "wrsn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <thread>

#include "wrsn/text.hpp"

namespace wrsn {

std::string_view to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::NetworkSize: return "n";
        case SweepAxis::Timespan: return "timespan";
        case SweepAxis::TimeStep: return "dt";
        case SweepAxis::Capacity: return "ie";
        case SweepAxis::CoverageK: return "k";
        case SweepAxis::Alpha: return "alpha";
    }
    return "?";
}

SweepAxis parse_axis(std::string_view s) {
    for (auto a : {SweepAxis::NetworkSize, SweepAxis::Timespan, SweepAxis::TimeStep, SweepAxis::Capacity,
                   SweepAxis::CoverageK, SweepAxis::Alpha}) {
        if (s == to_string(a)) return a;
    }
    throw ValidationError("unknown sweep axis '" + std::string(s) + "' (expected n, timespan, dt, ie, k or alpha)");
}

bool solver_supports(std::string_view solver, Variant v) {
    if (solver == "dqn" || solver == "greedy" || solver == "random" || solver == "brute") return true;
    if (solver == "mst" || solver == "cmst") return v == Variant::P2_FullyChargingReward;
    if (solver == "acs" || solver == "dp") return v == Variant::P3_KCoverage;
    return false;
}

SolveResult run_solver(std::string_view solver, const ProblemInstance& inst, const SolverSettings& st,
                       std::uint64_t seed) {
    if (!solver_supports(solver, inst.variant)) {
        throw ValidationError("solver '" + std::string(solver) + "' does not apply to " + std::string(to_string(inst.variant)));
    }
    if (solver == "greedy") return greedy_solve(inst);
    if (solver == "random") return random_solve(inst, seed, st.random_restarts);
    if (solver == "mst") return mst_solve(inst);
    if (solver == "cmst") return cmst_solve(inst);
    if (solver == "dp") return dp_kcoverage(inst, st.dt, st.dp);
    if (solver == "brute") {
        BruteForceOptions bo;
        bo.max_requesters = st.brute_limit;
        if (inst.variant == Variant::P3_KCoverage) bo.grid_dt = st.dt;
        return brute_force(inst, bo);
    }
    if (solver == "acs") {
        AcsParams p = st.acs;
        p.seed = seed;
        return acs_solve(inst, p).result;
    }
    // dqn
    if (!st.dqn) throw ValidationError("dqn solver needs trained parameters");
    const auto t0 = std::chrono::steady_clock::now();
    const Environment env(inst);
    ScheduleState s = greedy_rollout(env, *st.dqn);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return summarize(env, "dqn", std::move(s), ms);
}

void validate(const ExperimentSpec& spec) {
    if (spec.solvers.empty()) throw ValidationError("experiment needs at least one solver");
    for (const auto& s : spec.solvers) {
        if (!solver_supports(s, spec.variant)) {
            throw ValidationError("solver '" + s + "' is unknown or does not apply to " +
                                  std::string(to_string(spec.variant)));
        }
    }
    if (spec.repetitions < 1) throw ValidationError("repetitions must be >= 1");
    if (spec.values.empty()) throw ValidationError("sweep needs at least one axis value");
    for (double v : spec.values) {
        const bool ok = [&] {
            switch (spec.axis) {
                case SweepAxis::NetworkSize: return v >= 1 && v == std::floor(v);
                case SweepAxis::CoverageK: return v >= 1 && v == std::floor(v) && spec.variant == Variant::P3_KCoverage;
                case SweepAxis::Timespan: return v > 0 && spec.variant == Variant::P1_MobilePath;
                case SweepAxis::Capacity: return v > 0 && spec.variant == Variant::P2_FullyChargingReward;
                case SweepAxis::TimeStep: return v > 0;
                case SweepAxis::Alpha: return v > 0 && v <= 1;
            }
            return false;
        }();
        if (!ok) {
            throw ValidationError("axis value " + fmt_double(v) + " is invalid for axis " + std::string(to_string(spec.axis)) +
                                  " on " + std::string(to_string(spec.variant)));
        }
    }
    if (spec.train_instances < 1) throw ValidationError("train_instances must be >= 1");
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(base);
    h = mix(h ^ a);
    h = mix(h ^ b);
    return mix(h ^ c);
}

int thread_budget(int fallback) {
    if (const char* env = std::getenv("WRSN_SCHED_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1, fallback);
}

namespace {

struct Cell {
    int n = 0;
    GenParams gen;
    SolverSettings settings;
};

Cell cell_for(const ExperimentSpec& spec, double value) {
    Cell c{spec.n, spec.gen, spec.settings};
    switch (spec.axis) {
        case SweepAxis::NetworkSize: c.n = static_cast<int>(value); break;
        case SweepAxis::Timespan: c.gen.timespan = value; break;
        case SweepAxis::TimeStep:
            c.settings.dt = value;
            c.gen.meet_dt = value;
            break;
        case SweepAxis::Capacity: c.gen.energy_capacity = value; break;
        case SweepAxis::CoverageK: c.gen.coverage_k = static_cast<int>(value); break;
        case SweepAxis::Alpha: c.gen.alpha = value; break;
    }
    return c;
}

template <class F>
void parallel_for(std::size_t count, int threads, F&& body) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

struct Stats {
    double mean = 0.0;
    double sd = 0.0;
};

Stats stats(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty()) return {std::nan(""), std::nan("")};
    for (double x : xs) s.mean += x;
    s.mean /= xs.size();
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / (xs.size() - 1));
    }
    return s;
}

std::string num(double v) { return std::isnan(v) ? std::string("nan") : fmt_double(v); }

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    return os;
}

}  // namespace

std::vector<RunRow> run_experiment(const ExperimentSpec& spec) {
    validate(spec);
    std::filesystem::create_directories(spec.out);
    const int threads = std::max(1, spec.threads);
    const bool use_dqn = std::find(spec.solvers.begin(), spec.solvers.end(), "dqn") != spec.solvers.end();

    // One trained model per axis value, on instances disjoint from evaluation.
    std::vector<std::optional<EmbeddingParams>> models(spec.values.size());
    if (use_dqn) {
        parallel_for(spec.values.size(), threads, [&](std::size_t vi) {
            const Cell cell = cell_for(spec, spec.values[vi]);
            std::vector<ProblemInstance> training;
            for (int i = 0; static_cast<int>(training.size()) < spec.train_instances && i < 10 * spec.train_instances; ++i) {
                try {
                    training.push_back(generate_instance(spec.variant, cell.n, cell.gen, mix_seed(spec.seed, vi, 1'000'000 + i)));
                } catch (const InfeasibleDeployment&) {
                }
            }
            if (training.empty()) return;
            TrainConfig cfg = spec.train;
            cfg.seed = mix_seed(spec.seed, vi, 2'000'000);
            models[vi] = train(training, cfg).params;
        });
    }

    const std::size_t reps = static_cast<std::size_t>(spec.repetitions);
    const std::size_t per_cell = spec.solvers.size();
    std::vector<RunRow> rows(spec.values.size() * reps * per_cell);
    parallel_for(spec.values.size() * reps, threads, [&](std::size_t idx) {
        const std::size_t vi = idx / reps;
        const int rep = static_cast<int>(idx % reps);
        Cell cell = cell_for(spec, spec.values[vi]);
        if (models[vi]) cell.settings.dqn = &*models[vi];
        const std::uint64_t seed = mix_seed(spec.seed, vi, rep);
        std::optional<ProblemInstance> inst;
        std::string gen_status;
        try {
            inst = generate_instance(spec.variant, cell.n, cell.gen, seed);
        } catch (const InfeasibleDeployment&) {
            gen_status = "infeasible_deployment";
        } catch (const Error&) {
            gen_status = "error";
        }
        for (std::size_t si = 0; si < per_cell; ++si) {
            RunRow& row = rows[idx * per_cell + si];
            row.value = spec.values[vi];
            row.rep = rep;
            row.seed = seed;
            row.solver = spec.solvers[si];
            if (!inst) {
                row.status = gen_status;
                continue;
            }
            try {
                row.result = run_solver(row.solver, *inst, cell.settings, mix_seed(seed, si, 3));
                row.status = "ok";
            } catch (const ResourceLimit&) {
                row.status = "resource_limit";
            } catch (const std::exception&) {
                row.status = "error";
            }
            row.result.solver = row.solver;
        }
    });

    const std::string axis(to_string(spec.axis));
    {
        auto os = open_out(spec.out / "runs.csv");
        os << axis << ",rep,seed,solver,status,feasible,objective,distance_m,energy_J\n";
        for (const auto& r : rows) {
            const bool ok = r.status == "ok";
            os << fmt_double(r.value) << ',' << r.rep << ',' << r.seed << ',' << r.solver << ',' << r.status << ','
               << (ok && r.result.feasible ? 1 : 0) << ',' << (ok ? fmt_double(r.result.objective) : "nan") << ','
               << (ok ? fmt_double(r.result.distance) : "nan") << ',' << (ok ? fmt_double(r.result.energy) : "nan") << '\n';
        }
    }
    {
        auto os = open_out(spec.out / "timing.csv");
        os << axis << ",rep,solver,wall_ms\n";
        for (const auto& r : rows) {
            os << fmt_double(r.value) << ',' << r.rep << ',' << r.solver << ',' << num(r.status == "ok" ? r.result.wall_ms : std::nan(""))
               << '\n';
        }
    }
    {
        auto agg = open_out(spec.out / "aggregate.csv");
        auto table = open_out(spec.out / "table.csv");
        agg << "solver," << axis
            << ",runs,feasible_runs,objective_mean,objective_sd,distance_mean,distance_sd,energy_mean,energy_sd\n";
        table << axis << ",solver,computation_time_ms,feasible_path,objective,traveling_energy_J\n";
        for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
            for (const auto& solver : spec.solvers) {
                std::vector<double> obj, dist, energy, time;
                int runs = 0;
                for (const auto& r : rows) {
                    if (r.value != spec.values[vi] || r.solver != solver) continue;
                    ++runs;
                    if (r.status != "ok") continue;
                    time.push_back(r.result.wall_ms);
                    if (!r.result.feasible) continue;
                    obj.push_back(r.result.objective);
                    dist.push_back(r.result.distance);
                    energy.push_back(r.result.energy);
                }
                const Stats o = stats(obj), d = stats(dist), e = stats(energy), t = stats(time);
                agg << solver << ',' << fmt_double(spec.values[vi]) << ',' << runs << ',' << obj.size() << ',' << num(o.mean)
                    << ',' << num(o.sd) << ',' << num(d.mean) << ',' << num(d.sd) << ',' << num(e.mean) << ',' << num(e.sd)
                    << '\n';
                const double travel = spec.gen.travel_energy * (std::isnan(d.mean) ? 0.0 : d.mean);
                table << fmt_double(spec.values[vi]) << ',' << solver << ',' << num(t.mean) << ',' << obj.size() << '/'
                      << runs << ',' << num(o.mean) << ',' << (std::isnan(d.mean) ? std::string("nan") : fmt_double(travel))
                      << '\n';
            }
        }
    }
    return rows;
}

}  // namespace wrsn
