#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "support.hpp"
#include "wrsn/geometry.hpp"
#include "wrsn/instances.hpp"

using namespace wrsn;

TEST(Generate, P2DefaultSettings) {
    GenParams g = GenParams::defaults(Variant::P2_FullyChargingReward);
    const auto inst = generate_instance(Variant::P2_FullyChargingReward, 50, g, 7);
    ASSERT_EQ(inst.size(), 50u);
    EXPECT_EQ(*inst.charger.energy_capacity, 300e3);
    EXPECT_EQ(inst.charger.travel_energy, 600.0);
    EXPECT_EQ(inst.area, (Rect{0, 0, 1000, 1000}));
    for (const auto& node : inst.nodes) {
        EXPECT_EQ(node.capacity, 10800.0);
        EXPECT_GT(node.residual, 0.0);
        EXPECT_LE(node.residual, node.capacity);
        EXPECT_EQ(inst.is_requester(node), node.residual <= 0.2 * node.capacity);
        if (inst.is_requester(node)) {
            ASSERT_TRUE(node.prize);
            EXPECT_EQ(*node.prize, prize_of(node, 50));
        }
    }
    EXPECT_NO_THROW(validate(inst));
}

TEST(Generate, EmptyInstanceRejected) {
    EXPECT_THROW(generate_instance(Variant::P1_MobilePath, 0, GenParams::defaults(Variant::P1_MobilePath), 1),
                 ValidationError);
}

TEST(Generate, Deterministic) {
    for (auto v : {Variant::P1_MobilePath, Variant::P2_FullyChargingReward}) {
        const auto g = GenParams::defaults(v);
        EXPECT_EQ(generate_instance(v, 12, g, 5), generate_instance(v, 12, g, 5));
        EXPECT_NE(generate_instance(v, 12, g, 5), generate_instance(v, 12, g, 6));
    }
    const auto g3 = fixture::small_p3(250, 2);
    EXPECT_EQ(generate_instance(Variant::P3_KCoverage, 20, g3, 9), generate_instance(Variant::P3_KCoverage, 20, g3, 9));
}

TEST(Generate, P3CoverageMonteCarlo) {
    const auto g = GenParams::defaults(Variant::P3_KCoverage);
    const auto inst = generate_instance(Variant::P3_KCoverage, 32, g, 3);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0, 500), uy(0, 500);
    int min_cover = 1 << 30;
    for (int i = 0; i < 100000; ++i) {
        const Point q{ux(rng), uy(rng)};
        int c = 0;
        for (const auto& node : inst.nodes) c += std::hypot(node.position.x - q.x, node.position.y - q.y) <= 135.0;
        min_cover = std::min(min_cover, c);
    }
    EXPECT_GE(min_cover, 2);
    EXPECT_TRUE(verify_k_coverage(inst));
    for (const auto& node : inst.nodes) {
        EXPECT_GT(node.residual, 540.0);
        EXPECT_LE(node.residual, 10800.0);
        EXPECT_EQ(*node.deadline, node.residual / node.consumption);
    }
}

TEST(Generate, P3RetryBudgetExhausted) {
    auto g = GenParams::defaults(Variant::P3_KCoverage);
    g.retry_budget = 5;
    EXPECT_THROW(generate_instance(Variant::P3_KCoverage, 3, g, 1), InfeasibleDeployment);
}

TEST(Generate, P1TracesCoverHorizon) {
    const auto g = GenParams::defaults(Variant::P1_MobilePath);
    const auto inst = generate_instance(Variant::P1_MobilePath, 10, g, 4);
    for (const auto& node : inst.nodes) {
        ASSERT_TRUE(node.trajectory);
        const auto& wp = node.trajectory->waypoints;
        EXPECT_EQ(wp.front().t, 0.0);
        EXPECT_GE(wp.back().t, 1800.0);
        for (std::size_t i = 1; i < wp.size(); ++i) {
            ASSERT_LT(wp[i - 1].t, wp[i].t);
            const double speed = distance(wp[i - 1].p, wp[i].p) / (wp[i].t - wp[i - 1].t);
            EXPECT_LE(speed, node.trajectory->max_speed + 1e-9);
        }
        EXPECT_LT(node.trajectory->max_speed, inst.charger.speed);
    }
}

TEST(Prize, Formula) {
    SensorNode s;
    s.capacity = 10800.0;
    s.residual = 0.0;
    EXPECT_EQ(prize_of(s, 10), 100);
    s.residual = 10800.0;
    EXPECT_EQ(prize_of(s, 10), 1);
    s.residual = 5400.0;
    EXPECT_EQ(prize_of(s, 10), 50);
}

TEST(PositionAt, Interpolation) {
    SensorNode s;
    s.position = {3, 4};
    EXPECT_EQ(position_at(s, 123.0), (Point{3, 4}));
    s.trajectory = MobilityTrace{{{0, {0, 0}}, {10, {10, 0}}}, 2.0};
    EXPECT_EQ(position_at(s, 5.0), (Point{5, 0}));
    s.trajectory = MobilityTrace{{{0, {0, 0}}, {10, {10, 0}}, {20, {10, 10}}}, 2.0};
    EXPECT_EQ(position_at(s, 15.0), (Point{10, 5}));
    EXPECT_THROW(position_at(s, 20.5), std::out_of_range);
    EXPECT_THROW(position_at(s, -1.0), std::out_of_range);
}

TEST(InstanceFile, RoundTripAllVariants) {
    const std::vector<ProblemInstance> all{
        generate_instance(Variant::P1_MobilePath, 6, GenParams::defaults(Variant::P1_MobilePath), 2),
        generate_instance(Variant::P2_FullyChargingReward, 15, GenParams::defaults(Variant::P2_FullyChargingReward), 2),
        generate_instance(Variant::P3_KCoverage, 12, fixture::small_p3(200, 2), 2),
    };
    for (const auto& inst : all) {
        std::stringstream ss;
        write_instance(ss, inst);
        EXPECT_EQ(read_instance(ss), inst);
    }
}

TEST(InstanceFile, KeysOrderInsensitive) {
    const auto inst = fixture::make_p2({{100, 100, 500}, {900, 900, 10000}}, {500, 500}, 300e3);
    std::stringstream ss;
    write_instance(ss, inst);
    std::string text = ss.str();
    const auto pos = text.find("node id=0");
    ASSERT_NE(pos, std::string::npos);
    const auto end = text.find('\n', pos);
    std::string line = text.substr(pos, end - pos);
    // Reverse the key order of the first node line.
    std::istringstream toks(line);
    std::vector<std::string> parts;
    for (std::string t; toks >> t;) parts.push_back(t);
    std::string rev = "node";
    for (auto it = parts.rbegin(); it != parts.rend() - 1; ++it) rev += " " + *it;
    text.replace(pos, end - pos, rev);
    std::istringstream in(text);
    EXPECT_EQ(read_instance(in), inst);
}

TEST(InstanceFile, TruncatedIsParseError) {
    const auto inst = fixture::make_p2({{100, 100, 500}, {900, 900, 10000}}, {500, 500}, 300e3);
    std::stringstream ss;
    write_instance(ss, inst);
    const std::string text = ss.str();
    std::istringstream cut(text.substr(0, text.rfind("node")));
    EXPECT_THROW(read_instance(cut), ParseError);
    std::istringstream empty("");
    EXPECT_THROW(read_instance(empty), ParseError);
}

TEST(InstanceFile, ResidualAboveCapacityIsValidationError) {
    const auto inst = fixture::make_p2({{100, 100, 500}}, {500, 500}, 300e3);
    std::stringstream ss;
    write_instance(ss, inst);
    std::string text = ss.str();
    const auto pos = text.find("B0=500");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 6, "B0=20000");
    std::istringstream in(text);
    try {
        read_instance(in);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
    }
}

TEST(InstanceFile, BadNumberNamesLineAndField) {
    const auto inst = fixture::make_p2({{100, 100, 500}}, {500, 500}, 300e3);
    std::stringstream ss;
    write_instance(ss, inst);
    std::string text = ss.str();
    const auto pos = text.find("x=100");
    text.replace(pos, 5, "x=abc");
    std::istringstream in(text);
    try {
        read_instance(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("line"), std::string::npos);
        EXPECT_NE(msg.find('x'), std::string::npos);
    }
}

TEST(Validate, Invariants) {
    auto inst = fixture::make_p2({{100, 100, 500}}, {500, 500}, 300e3);
    EXPECT_NO_THROW(validate(inst));
    auto bad = inst;
    bad.nodes[0].prize.reset();
    EXPECT_THROW(validate(bad), ValidationError);
    bad = inst;
    bad.charger.energy_capacity.reset();
    EXPECT_THROW(validate(bad), ValidationError);
    bad = inst;
    bad.nodes[0].residual = -1;
    EXPECT_THROW(validate(bad), ValidationError);

    auto p3 = fixture::make_p3({{50, 50, 5000, 2}}, 100, 1, {0, 0, 100, 100}, {50, 50});
    EXPECT_NO_THROW(validate(p3));
    p3.nodes[0].deadline = 1.0;
    EXPECT_THROW(validate(p3), ValidationError);
    p3 = fixture::make_p3({{10, 10, 5000, 2}}, 20, 1, {0, 0, 100, 100}, {50, 50});
    EXPECT_THROW(validate(p3), ValidationError);  // not 1-covered
}
