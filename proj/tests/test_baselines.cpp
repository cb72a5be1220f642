#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "support.hpp"
#include "wrsn/baselines.hpp"

using namespace wrsn;

namespace {

// Every ordered subset of requesters, replayed from scratch.
template <class Visit>
void for_each_order(int R, const Visit& visit) {
    std::vector<int> all(R);
    std::iota(all.begin(), all.end(), 1);
    for (unsigned mask = 0; mask < (1u << R); ++mask) {
        std::vector<int> pick;
        for (int r = 0; r < R; ++r) {
            if (mask & (1u << r)) pick.push_back(all[r]);
        }
        do {
            visit(pick);
        } while (std::next_permutation(pick.begin(), pick.end()));
    }
}

std::vector<ProblemInstance> small_p3_panel(int count, int max_requesters, std::uint64_t seed0) {
    std::vector<ProblemInstance> out;
    for (std::uint64_t seed = seed0; static_cast<int>(out.size()) < count; ++seed) {
        auto g = fixture::small_p3(200, 1 + static_cast<int>(seed % 2));
        const auto inst = generate_instance(Variant::P3_KCoverage, 9, g, seed);
        const int R = static_cast<int>(inst.requesters().size());
        if (R >= 1 && R <= max_requesters) out.push_back(inst);
    }
    return out;
}

}  // namespace

TEST(Acs, PheromoneArithmetic) {
    EXPECT_NEAR(pheromone_update(0.2, pheromone_delta(true, 500.0), 0.1), 0.1802, 1e-15);
    EXPECT_DOUBLE_EQ(pheromone_update(0.2, pheromone_delta(true, 500.0), 1.0), 0.002);
    EXPECT_EQ(pheromone_delta(false, 500.0), 0.0);
    EXPECT_DOUBLE_EQ(pheromone_update(0.2, pheromone_delta(false, 500.0), 0.1), 0.18);
}

TEST(Acs, IncumbentNeverIncreases) {
    for (const auto& inst : small_p3_panel(4, 8, 40)) {
        AcsParams p;
        p.iterations = 60;
        p.agents = 8;
        const auto r = acs_solve(inst, p);
        for (std::size_t i = 1; i < r.incumbent.size(); ++i) EXPECT_LE(r.incumbent[i], r.incumbent[i - 1]);
        if (r.result.feasible && !r.incumbent.empty()) {
            EXPECT_DOUBLE_EQ(r.incumbent.back(), r.result.distance);
        }
    }
}

TEST(Acs, RejectsOtherVariantsAndBadParams) {
    const auto p2 = fixture::make_p2({{10, 0, 100}}, {0, 0}, 1e6);
    EXPECT_THROW(acs_solve(p2), ValidationError);
    const auto p3 = small_p3_panel(1, 8, 1).front();
    AcsParams bad;
    bad.theta_global = 1.5;
    EXPECT_THROW(acs_solve(p3, bad), ValidationError);
}

TEST(Dp, MatchesBruteForceOnSmallInstances) {
    int feasible = 0;
    for (const auto& inst : small_p3_panel(12, 7, 200)) {
        const auto dp = dp_kcoverage(inst, 1.0);
        BruteForceOptions bo;
        bo.grid_dt = 1.0;
        const auto bf = brute_force(inst, bo);
        ASSERT_EQ(dp.feasible, bf.feasible) << "seed " << inst.seed;
        if (bf.feasible) {
            ++feasible;
            EXPECT_EQ(dp.distance, bf.distance) << "seed " << inst.seed;
        }
    }
    EXPECT_GT(feasible, 0);
}

TEST(Dp, MatchesOrderEnumeration) {
    for (const auto& inst : small_p3_panel(5, 5, 300)) {
        const int R = static_cast<int>(inst.requesters().size());
        const Environment env(inst);
        double best = kInf;
        for_each_order(R, [&](const std::vector<int>& order) {
            const auto s = replay_schedule(inst, order, 1.0);
            if (!s.feasible) return;
            std::vector<int> ids;
            for (int v : order) ids.push_back(env.node_of(v).id);
            if (!table_after_charging(env.initial_table(), ids).all_zero()) return;
            best = std::min(best, s.tour_distance());
        });
        const auto dp = dp_kcoverage(inst, 1.0);
        EXPECT_EQ(dp.feasible, std::isfinite(best));
        if (dp.feasible) {
            EXPECT_NEAR(dp.distance, best, 1e-9 * best);
        }
    }
}

TEST(Dp, TrivialCases) {
    // No requesters: empty tour, distance 0.
    auto none = fixture::make_p3({{50, 50, 10000, 1}}, 200, 1, {0, 0, 100, 100}, {50, 50}, 0.1);
    const auto r = dp_kcoverage(none, 1.0);
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.distance, 0.0);

    // The only requester expires before the charger can arrive.
    auto late = fixture::make_p3({{100, 0, 10, 1}}, 200, 1, {0, 0, 100, 100}, {0, 0});
    const auto l = dp_kcoverage(late, 1.0);
    EXPECT_FALSE(l.feasible);
    EXPECT_FALSE(brute_force(late, {10, 1.0}).feasible);

    // One requester reachable: out and back.
    auto one = fixture::make_p3({{30, 40, 5000, 1}}, 200, 1, {0, 0, 100, 100}, {0, 0});
    const auto o = dp_kcoverage(one, 1.0);
    EXPECT_TRUE(o.feasible);
    EXPECT_DOUBLE_EQ(o.distance, 100.0);
}

TEST(BruteForce, RefusesLargeInstances) {
    const auto inst = generate_instance(Variant::P2_FullyChargingReward, 100,
                                        GenParams::defaults(Variant::P2_FullyChargingReward), 1);
    BruteForceOptions bo;
    bo.max_requesters = 3;
    EXPECT_THROW(brute_force(inst, bo), ResourceLimit);
}

TEST(BruteForce, P2MatchesOrderEnumeration) {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto g = GenParams::defaults(Variant::P2_FullyChargingReward);
        g.area_side = 300;
        const auto inst = generate_instance(Variant::P2_FullyChargingReward, 25, g, seed);
        const Environment env(inst);
        const int R = env.vertex_count() - 1;
        if (R > 6) continue;
        double best = 0.0;
        for_each_order(R, [&](const std::vector<int>& order) {
            const auto s = env.replay(order);
            if (env.within_limits(s)) best = std::max(best, env.objective(s));
        });
        EXPECT_EQ(brute_force(inst).objective, best);
        ++checked;
    }
    EXPECT_GE(checked, 3);
}

TEST(Heuristics, FeasibleAndBelowBruteForce) {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto g = GenParams::defaults(Variant::P2_FullyChargingReward);
        g.area_side = 400;
        const auto inst = generate_instance(Variant::P2_FullyChargingReward, 30, g, seed);
        const Environment env(inst);
        if (env.vertex_count() - 1 > 9) continue;
        const auto bf = brute_force(inst);
        ++checked;
        for (const auto& r : {greedy_solve(inst), random_solve(inst, 3, 20), mst_solve(inst), cmst_solve(inst)}) {
            EXPECT_TRUE(r.feasible) << r.solver;
            EXPECT_LE(r.energy, *inst.charger.energy_capacity) << r.solver;
            EXPECT_LE(r.objective, bf.objective) << r.solver;
        }
    }
    EXPECT_GE(checked, 3);
    for (const auto& inst : small_p3_panel(4, 8, 500)) {
        for (const auto& r : {greedy_solve(inst), random_solve(inst, 3, 20)}) {
            if (!r.feasible) continue;
            EXPECT_TRUE(table_after_charging(Environment(inst).initial_table(), [&] {
                            std::vector<int> ids;
                            for (int v : r.state.order()) ids.push_back(Environment(inst).node_of(v).id);
                            return ids;
                        }()).all_zero());
        }
    }
}

TEST(Heuristics, SpanningTreeTourOnALine) {
    const auto inst = fixture::make_p2({{20, 0, 9000}, {10, 0, 9000}, {30, 0, 9000}}, {0, 0}, 1e9, 0.0);
    EXPECT_EQ(mst_solve(inst).state.order(), (std::vector<int>{2, 1, 3}));
    // Branch cap of one node's demand splits the line into separate branches.
    const auto c = cmst_solve(inst, 1800.0 / 1e9);
    EXPECT_EQ(c.state.length(), 3u);
    EXPECT_THROW(mst_solve(fixture::make_p3({{1, 1, 100, 1}}, 10, 1, {0, 0, 2, 2}, {0, 0})), ValidationError);
}

TEST(Heuristics, GreedyPicksNearest) {
    const auto inst = fixture::make_p2({{100, 0, 9000}, {10, 0, 9000}, {50, 0, 9000}}, {0, 0}, 1e9, 0.0);
    EXPECT_EQ(greedy_solve(inst).state.order(), (std::vector<int>{2, 3, 1}));
}

TEST(Results, CsvRow) {
    const auto inst = fixture::make_p2({{30, 40, 10000}}, {0, 0}, 1e9, 0.0);
    auto r = greedy_solve(inst);
    r.wall_ms = 1.5;
    std::ostringstream os;
    write_results_header(os);
    write_result_row(os, r);
    EXPECT_EQ(os.str(), "solver,feasible,objective,distance_m,energy_J,wall_ms\ngreedy,1,1,100,800,1.5\n");
}
