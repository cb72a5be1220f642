#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "support.hpp"
#include "wrsn/experiment.hpp"

using namespace wrsn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

ExperimentSpec small_sweep(const fs::path& out) {
    ExperimentSpec s;
    s.variant = Variant::P2_FullyChargingReward;
    s.axis = SweepAxis::NetworkSize;
    s.values = {20, 30};
    s.solvers = {"greedy", "random", "mst", "dqn"};
    s.repetitions = 2;
    s.seed = 9;
    s.out = out;
    s.settings.random_restarts = 5;
    s.train.episodes = 4;
    s.train.warmup = 4;
    s.train.batch_size = 2;
    s.train.embed_dim = 4;
    s.train.rounds = 2;
    s.train_instances = 2;
    return s;
}

}  // namespace

TEST(Axis, ParseAndPrint) {
    for (auto a : {SweepAxis::NetworkSize, SweepAxis::Timespan, SweepAxis::TimeStep, SweepAxis::Capacity,
                   SweepAxis::CoverageK, SweepAxis::Alpha}) {
        EXPECT_EQ(parse_axis(to_string(a)), a);
    }
    EXPECT_THROW(parse_axis("size"), ValidationError);
}

TEST(Solvers, SupportMatrix) {
    EXPECT_TRUE(solver_supports("mst", Variant::P2_FullyChargingReward));
    EXPECT_FALSE(solver_supports("mst", Variant::P3_KCoverage));
    EXPECT_TRUE(solver_supports("dp", Variant::P3_KCoverage));
    EXPECT_FALSE(solver_supports("acs", Variant::P1_MobilePath));
    EXPECT_FALSE(solver_supports("simplex", Variant::P1_MobilePath));
    const auto inst = fixture::make_p2({{10, 0, 100}}, {0, 0}, 1e6);
    EXPECT_THROW(run_solver("dqn", inst, {}, 1), ValidationError);
    EXPECT_THROW(run_solver("dp", inst, {}, 1), ValidationError);
}

TEST(Experiment, Validation) {
    auto s = small_sweep("unused");
    EXPECT_NO_THROW(validate(s));
    auto bad = s;
    bad.solvers.clear();
    EXPECT_THROW(validate(bad), ValidationError);
    bad = s;
    bad.solvers = {"acs"};
    EXPECT_THROW(validate(bad), ValidationError);
    bad = s;
    bad.values = {2.5};
    EXPECT_THROW(validate(bad), ValidationError);
    bad = s;
    bad.axis = SweepAxis::CoverageK;
    bad.values = {2};
    EXPECT_THROW(validate(bad), ValidationError);
    bad = s;
    bad.repetitions = 0;
    EXPECT_THROW(validate(bad), ValidationError);
}

TEST(Seeds, MixingIsStableAndSpreads) {
    EXPECT_EQ(mix_seed(1, 2, 3), mix_seed(1, 2, 3));
    std::set<std::uint64_t> seen;
    for (std::uint64_t a = 0; a < 20; ++a) {
        for (std::uint64_t b = 0; b < 20; ++b) seen.insert(mix_seed(7, a, b));
    }
    EXPECT_EQ(seen.size(), 400u);
}

TEST(Threads, EnvironmentVariable) {
    ::setenv("WRSN_SCHED_THREADS", "3", 1);
    EXPECT_EQ(thread_budget(1), 3);
    ::setenv("WRSN_SCHED_THREADS", "zero", 1);
    EXPECT_EQ(thread_budget(2), 2);
    ::unsetenv("WRSN_SCHED_THREADS");
    EXPECT_EQ(thread_budget(0), 1);
}

TEST(Sweep, DeterministicAcrossRunsAndThreads) {
    const fs::path root = fs::temp_directory_path() / "wrsn_sweep_test";
    fs::remove_all(root);
    auto a = small_sweep(root / "a");
    auto b = small_sweep(root / "b");
    b.threads = 2;
    const auto rows = run_experiment(a);
    run_experiment(b);
    EXPECT_EQ(rows.size(), 2u * 2u * 4u);
    for (const auto& r : rows) EXPECT_EQ(r.status, "ok") << r.solver;
    for (const char* f : {"runs.csv", "aggregate.csv"}) {
        const auto x = slurp(root / "a" / f);
        EXPECT_FALSE(x.empty());
        EXPECT_EQ(x, slurp(root / "b" / f)) << f;
    }
    for (const char* f : {"timing.csv", "table.csv"}) EXPECT_TRUE(fs::exists(root / "a" / f));
    const auto runs = slurp(root / "a" / "runs.csv");
    EXPECT_EQ(runs.substr(0, runs.find('\n')), "n,rep,seed,solver,status,feasible,objective,distance_m,energy_J");
    fs::remove_all(root);
}

TEST(Sweep, InfeasibleDeploymentsAreRecorded) {
    const fs::path root = fs::temp_directory_path() / "wrsn_sweep_p3";
    fs::remove_all(root);
    ExperimentSpec s;
    s.variant = Variant::P3_KCoverage;
    s.axis = SweepAxis::NetworkSize;
    s.values = {3};
    s.solvers = {"greedy"};
    s.repetitions = 1;
    s.gen = GenParams::defaults(Variant::P3_KCoverage);
    s.gen.retry_budget = 3;
    s.out = root;
    const auto rows = run_experiment(s);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].status, "infeasible_deployment");
    fs::remove_all(root);
}
