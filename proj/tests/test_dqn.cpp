#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "support.hpp"
#include "wrsn/dqn.hpp"

using namespace wrsn;

TEST(SelectAction, UniformAtEpsilonOne) {
    const std::vector<int> actions{2, 3, 5, 7, 11};
    Eigen::VectorXd q = Eigen::VectorXd::Zero(12);
    q(7) = 100.0;
    std::mt19937_64 rng(42);
    std::map<int, int> counts;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) ++counts[select_action(actions, q, 1.0, rng)];
    double chi2 = 0.0;
    const double expected = static_cast<double>(draws) / actions.size();
    for (int a : actions) chi2 += (counts[a] - expected) * (counts[a] - expected) / expected;
    const boost::math::chi_squared dist(actions.size() - 1);
    EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi2)), 0.01);
}

TEST(SelectAction, ArgmaxWithLowestIdTies) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> level(0, 3);
    for (int trial = 0; trial < 500; ++trial) {
        Eigen::VectorXd q(10);
        for (int i = 0; i < 10; ++i) q(i) = level(rng);  // plenty of ties
        std::vector<int> actions;
        for (int v = 9; v >= 1; --v) {
            if (rng() % 2) actions.push_back(v);
        }
        if (actions.empty()) continue;
        int expect = -1;
        for (int v = 1; v < 10; ++v) {
            if (std::find(actions.begin(), actions.end(), v) == actions.end()) continue;
            if (expect < 0 || q(v) > q(expect)) expect = v;
        }
        EXPECT_EQ(select_action(actions, q, 0.0, rng), expect);
    }
    EXPECT_EQ(select_action({}, Eigen::VectorXd::Zero(3), 0.5, rng), -1);
}

TEST(Targets, NStep) {
    const std::vector<double> succ{2.0, 9.0, -1.0};
    EXPECT_DOUBLE_EQ(n_step_target(1.0, false, succ, 0.5, 2), 3.25);
    EXPECT_DOUBLE_EQ(n_step_target(3.0, true, succ, 0.5, 2), 3.0);
    EXPECT_DOUBLE_EQ(n_step_target(3.0, false, {}, 0.5, 1), 3.0);
}

TEST(Schedule, EpsilonLinearDecay) {
    TrainConfig c;
    c.episodes = 100;
    EXPECT_DOUBLE_EQ(c.epsilon_at(0), 1.0);
    EXPECT_DOUBLE_EQ(c.epsilon_at(40), 1.0 + (0.05 - 1.0) * 0.5);
    EXPECT_DOUBLE_EQ(c.epsilon_at(80), 0.05);
    EXPECT_DOUBLE_EQ(c.epsilon_at(99), 0.05);
    EXPECT_EQ(TrainConfig::defaults(Variant::P3_KCoverage).gamma, 0.99);
    EXPECT_EQ(TrainConfig::defaults(Variant::P2_FullyChargingReward).gamma, 1.0);
}

TEST(Replay, EvictsOldestAndSamplesDistinct) {
    ReplayBuffer buf(3);
    for (int i = 0; i < 5; ++i) buf.push({{}, i, 0.0, 1, {}, false});
    ASSERT_EQ(buf.size(), 3u);
    EXPECT_EQ(buf.at(0).action, 2);
    EXPECT_EQ(buf.at(2).action, 4);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const auto batch = buf.sample(3, rng);
        std::set<int> seen;
        for (auto* tr : batch) seen.insert(tr->action);
        EXPECT_EQ(seen.size(), 3u);
    }
    EXPECT_EQ(buf.sample(10, rng).size(), 3u);
    EXPECT_THROW(ReplayBuffer(0), ValidationError);
}

TEST(Loss, SgdOnFrozenBatchDecreases) {
    std::mt19937_64 rng(8);
    auto P = EmbeddingParams::random(8, 4, 2, 3, 0.3);
    std::vector<LossTerm> terms;
    for (int b = 0; b < 4; ++b) terms.push_back({fixture::random_graph(5, 4, rng), b, 0.5 * b - 1.0});
    const double start = batch_loss(terms, P);
    for (int it = 0; it < 300; ++it) {
        EmbeddingParams g = EmbeddingParams::zeros_like(P);
        batch_loss(terms, P, &g);
        P.axpy(-0.01, g);
    }
    EXPECT_LT(batch_loss(terms, P), 0.5 * start);
}

TEST(Train, SmokeDeterministicAndLogged) {
    std::vector<ProblemInstance> insts;
    for (int i = 0; i < 3; ++i) {
        insts.push_back(generate_instance(Variant::P2_FullyChargingReward, 40,
                                          GenParams::defaults(Variant::P2_FullyChargingReward), 50 + i));
    }
    TrainConfig cfg = TrainConfig::defaults(Variant::P2_FullyChargingReward);
    cfg.episodes = 12;
    cfg.warmup = 8;
    cfg.batch_size = 4;
    cfg.embed_dim = 8;
    cfg.rounds = 2;
    int calls = 0;
    const auto a = train(insts, cfg, [&](const TrainLogRow&) { ++calls; });
    const auto b = train(insts, cfg);
    EXPECT_EQ(calls, 12);
    ASSERT_EQ(a.log.size(), 12u);
    EXPECT_TRUE(a.params.all_finite());
    for (int k = 0; k < 7; ++k) EXPECT_EQ(a.params.theta[k], b.params.theta[k]);
    EXPECT_TRUE(std::any_of(a.log.begin(), a.log.end(), [](auto& r) { return !std::isnan(r.loss_mean); }));

    const Environment env(insts[0]);
    const auto s1 = greedy_rollout(env, a.params);
    const auto s2 = greedy_rollout(env, a.params);
    EXPECT_EQ(s1.order(), s2.order());
    EXPECT_TRUE(env.within_limits(s1));

    std::ostringstream os;
    write_train_log_csv(os, a.log);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "episode,objective,epsilon,loss_mean");
}

TEST(Train, P3EpisodesRun) {
    std::vector<ProblemInstance> insts{generate_instance(Variant::P3_KCoverage, 10, fixture::small_p3(200, 1), 4)};
    TrainConfig cfg = TrainConfig::defaults(Variant::P3_KCoverage);
    cfg.episodes = 6;
    cfg.warmup = 4;
    cfg.batch_size = 2;
    cfg.embed_dim = 4;
    cfg.rounds = 2;
    cfg.n_step = 2;
    const auto r = train(insts, cfg);
    EXPECT_TRUE(r.params.all_finite());
    const auto s = greedy_rollout(insts[0], r.params);
    EXPECT_TRUE(s.feasible);
}

TEST(Train, RejectsBadConfig) {
    std::vector<ProblemInstance> none;
    EXPECT_THROW(train(none, TrainConfig{}), ValidationError);
    std::vector<ProblemInstance> one{
        generate_instance(Variant::P2_FullyChargingReward, 40, GenParams::defaults(Variant::P2_FullyChargingReward), 1)};
    TrainConfig bad;
    bad.n_step = 0;
    EXPECT_THROW(train(one, bad), ValidationError);
    TrainConfig big_batch;
    big_batch.capacity = 4;
    big_batch.batch_size = 8;
    EXPECT_THROW(train(one, big_batch), ValidationError);
}
