#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wrsn/baselines.hpp"
#include "wrsn/dqn.hpp"

namespace wrsn {

enum class SweepAxis { NetworkSize, Timespan, TimeStep, Capacity, CoverageK, Alpha };

std::string_view to_string(SweepAxis a);
SweepAxis parse_axis(std::string_view s);  // n, timespan, dt, ie, k, alpha

// Solvers applicable to each variant: dqn, greedy, random, brute (all);
// mst, cmst (P2); acs, dp (P3).
bool solver_supports(std::string_view solver, Variant v);

struct SolverSettings {
    double dt = 1.0;  // DAG step for dp (and brute on P3)
    int random_restarts = 100;
    int brute_limit = 10;
    AcsParams acs;
    DpOptions dp;
    const EmbeddingParams* dqn = nullptr;
};

// Runs one named solver; exceptions propagate.
SolveResult run_solver(std::string_view solver, const ProblemInstance& inst, const SolverSettings& settings,
                       std::uint64_t seed);

struct ExperimentSpec {
    Variant variant = Variant::P2_FullyChargingReward;
    SweepAxis axis = SweepAxis::NetworkSize;
    std::vector<double> values;
    std::vector<std::string> solvers;
    int repetitions = 3;
    std::uint64_t seed = 1;
    std::filesystem::path out;

    int n = 30;  // used when the axis is not the network size
    GenParams gen = GenParams::defaults(Variant::P2_FullyChargingReward);
    SolverSettings settings;
    TrainConfig train = TrainConfig::defaults(Variant::P2_FullyChargingReward);
    int train_instances = 8;
    int threads = 1;
};

// Throws ValidationError for an empty solver list, unknown or unsupported
// solvers, bad axis values or repetitions < 1.
void validate(const ExperimentSpec& spec);

struct RunRow {
    double value = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    std::string solver;
    std::string status;  // ok | infeasible_deployment | resource_limit | error
    SolveResult result;
};

// Derives a stream seed from a base seed and labels (splitmix64 mixing).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

// Writes runs.csv, aggregate.csv, table.csv and timing.csv under spec.out.
// Only timing.csv and table.csv's computation_time_ms column depend on
// wall-clock time.
std::vector<RunRow> run_experiment(const ExperimentSpec& spec);

// Worker count from WRSN_SCHED_THREADS (>= 1), else the fallback.
int thread_budget(int fallback = 1);

}  // namespace wrsn
