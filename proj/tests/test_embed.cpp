#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "wrsn/embed.hpp"

using namespace wrsn;
using Eigen::MatrixXd;

namespace {

EmbeddingParams scalar_params(int rounds) {
    auto P = EmbeddingParams::random(1, 1, rounds, 1);
    P.theta[0] << 1;  // theta1
    P.theta[1] << 0.5;
    P.theta[2] << 1;
    P.theta[3] << 2;
    P.theta[4] << 1, 1;
    P.theta[5] << 1;
    P.theta[6] << 1;
    return P;
}

GraphInput pair_graph() {
    GraphInput g;
    g.X = MatrixXd(1, 2);
    g.X << 1, 2;
    g.W = MatrixXd(2, 2);
    g.W << 0, 0.5, 0.5, 0;
    g.A = MatrixXd(2, 2);
    g.A << 0, 1, 1, 0;
    return g;
}

}  // namespace

TEST(Embedding, HandComputedOneRound) {
    // E = relu(2) * 0.5 = 1; pre = X + E = [2, 3]; pooled 5; Q = 5 + mu_v.
    const auto P = scalar_params(1);
    const auto e = embed_graph(pair_graph(), P);
    EXPECT_DOUBLE_EQ(e.mu(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(e.mu(0, 1), 3.0);
    EXPECT_DOUBLE_EQ(e.pooled(0), 5.0);
    EXPECT_DOUBLE_EQ(q_value(e, 0, P), 7.0);
    const auto q = q_values(e, P);
    EXPECT_DOUBLE_EQ(q(1), 8.0);
}

TEST(Embedding, HandComputedTwoRounds) {
    // Round 2: pre = [2, 3] + 0.5 * [3, 2] = [3.5, 4].
    const auto P = scalar_params(2);
    const auto e = embed_graph(pair_graph(), P);
    EXPECT_DOUBLE_EQ(e.mu(0, 0), 3.5);
    EXPECT_DOUBLE_EQ(e.mu(0, 1), 4.0);
    EXPECT_DOUBLE_EQ(q_value(e, 0, P), 11.0);
}

TEST(Embedding, ZeroReadoutGivesZeroQ) {
    std::mt19937_64 rng(2);
    auto P = EmbeddingParams::random(4, 3, 2, 9, 0.5);
    P.theta[4].setZero();
    const auto e = embed_graph(fixture::random_graph(5, 3, rng), P);
    EXPECT_TRUE(q_values(e, P).isZero());
}

TEST(Embedding, PermutationEquivariant) {
    std::mt19937_64 rng(3);
    const auto P = EmbeddingParams::random(4, 3, 3, 4, 0.5);
    const auto g = fixture::random_graph(6, 3, rng);
    std::vector<int> perm{3, 0, 5, 1, 4, 2};
    Eigen::PermutationMatrix<Eigen::Dynamic> Pm(6);
    for (int i = 0; i < 6; ++i) Pm.indices()(i) = perm[i];
    GraphInput h;
    h.X = g.X * Pm.transpose();
    h.W = Pm * g.W * Pm.transpose();
    h.A = Pm * g.A * Pm.transpose();
    const auto qg = q_values(embed_graph(g, P), P);
    const auto qh = q_values(embed_graph(h, P), P);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(qh(perm[i]), qg(i), 1e-12);
}

TEST(Embedding, InfluenceStopsAfterTHops) {
    // Path 0-1-2-3-4-5; with two rounds, features at 0 cannot reach 3..5.
    const int n = 6;
    GraphInput g;
    g.X = MatrixXd::Ones(2, n);
    g.W = MatrixXd::Zero(n, n);
    g.A = MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) {
        g.A(i, i + 1) = g.A(i + 1, i) = 1;
        g.W(i, i + 1) = g.W(i + 1, i) = 0.3;
    }
    const auto P = EmbeddingParams::random(4, 2, 2, 5, 0.5);
    const auto before = embed_graph(g, P);
    g.X(1, 0) = -7.0;
    const auto after = embed_graph(g, P);
    for (int v = 3; v < n; ++v) EXPECT_EQ(before.mu.col(v), after.mu.col(v));
}

TEST(Embedding, LossGradientMatchesFiniteDifferences) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto P = EmbeddingParams::random(4, 3, 2, 100 + trial, 0.5);
        std::vector<LossTerm> terms;
        for (int b = 0; b < 3; ++b) {
            const int n = 3 + static_cast<int>(rng() % 4);
            terms.push_back({fixture::random_graph(n, 3, rng), static_cast<int>(rng() % n),
                             std::uniform_real_distribution<double>(-1, 1)(rng)});
        }
        EmbeddingParams analytic = EmbeddingParams::zeros_like(P);
        batch_loss(terms, P, &analytic);
        const auto numeric = fixture::numeric_gradient(terms, P, 1e-5);
        EXPECT_LT(fixture::relative_gap(analytic, numeric), 1e-4) << "trial " << trial;
    }
}

TEST(Embedding, BuildInputShapes) {
    const auto inst = generate_instance(Variant::P2_FullyChargingReward, 40, GenParams::defaults(Variant::P2_FullyChargingReward), 3);
    const Environment env(inst);
    auto s = env.initial_state();
    const auto acts = env.actions(s);
    ASSERT_FALSE(acts.empty());
    s = env.step(s, acts.front()).next_state;
    const auto in = build_input(env, s);
    EXPECT_EQ(in.X.rows(), kFeatureWidth);
    EXPECT_EQ(in.X.cols(), env.vertex_count());
    EXPECT_TRUE(in.W.isApprox(in.W.transpose()));
    EXPECT_GE(in.W.minCoeff(), 0.0);
    EXPECT_EQ(in.X(1, acts.front()), 1.0);
    EXPECT_TRUE(in.X.allFinite());
}

TEST(Checkpoint, RoundTripIsExact) {
    const auto P = EmbeddingParams::random(3, kFeatureWidth, 2, 11, 0.3);
    std::stringstream ss;
    write_params(ss, P);
    const auto Q = read_params(ss);
    EXPECT_EQ(Q.p, 3);
    EXPECT_EQ(Q.rounds, 2);
    for (int k = 0; k < 7; ++k) EXPECT_EQ(P.theta[k], Q.theta[k]);
}

TEST(Checkpoint, MalformedInputsAreParseErrors) {
    const auto P = EmbeddingParams::random(2, 3, 1, 11);
    std::stringstream ss;
    write_params(ss, P);
    const std::string good = ss.str();
    auto expect_parse_error = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_params(in);
            ADD_FAILURE() << "accepted: " << text.substr(0, 40);
        } catch (const ParseError& e) {
            EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
        }
    };
    expect_parse_error("");
    expect_parse_error("not-a-checkpoint\n");
    expect_parse_error(good.substr(0, good.size() / 2));
    std::string shape = good;
    shape.replace(shape.find("theta2 2 2"), 10, "theta2 3 2");
    expect_parse_error(shape);
    std::string number = good;
    const auto row = number.find('\n', number.find("theta1")) + 1;
    number.replace(row, number.find(' ', row) - row, "zz");
    expect_parse_error(number);
}
