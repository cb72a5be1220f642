#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "wrsn/dqn.hpp"
#include "wrsn/instances.hpp"

namespace wrsn::fixture {

struct StaticNode {
    double x, y;
    double residual;
    double beta = 0.0;
};

// Stationary P2 instance with unit prizes derived from residuals.
inline ProblemInstance make_p2(const std::vector<StaticNode>& nodes, Point depot, double ie, double xi = 600.0,
                               Rect area = {0, 0, 1000, 1000}) {
    ProblemInstance inst;
    inst.variant = Variant::P2_FullyChargingReward;
    inst.area = area;
    inst.alpha = 1.0;
    inst.charger.depot = inst.charger.end_point = depot;
    inst.charger.speed = 5.0;
    inst.charger.transfer_rate = 20.0;
    inst.charger.travel_energy = xi;
    inst.charger.energy_capacity = ie;
    const int n = static_cast<int>(nodes.size());
    for (int i = 0; i < n; ++i) {
        SensorNode s;
        s.id = i;
        s.position = {nodes[i].x, nodes[i].y};
        s.capacity = 10800.0;
        s.residual = nodes[i].residual;
        s.prize = prize_of(s, n);
        inst.nodes.push_back(s);
    }
    return inst;
}

// P3 instance: deadlines follow D = B0 / beta.
inline ProblemInstance make_p3(const std::vector<StaticNode>& nodes, double radius, int k, Rect area, Point depot,
                               double alpha = 1.0) {
    ProblemInstance inst;
    inst.variant = Variant::P3_KCoverage;
    inst.area = area;
    inst.alpha = alpha;
    inst.coverage_k = k;
    inst.charger.depot = inst.charger.end_point = depot;
    inst.charger.speed = 5.0;
    inst.charger.transfer_rate = 20.0;
    inst.charger.travel_energy = 600.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        SensorNode s;
        s.id = static_cast<int>(i);
        s.position = {nodes[i].x, nodes[i].y};
        s.capacity = 10800.0;
        s.residual = nodes[i].residual;
        s.consumption = nodes[i].beta;
        s.sensing_radius = radius;
        s.deadline = s.residual / s.consumption;
        inst.nodes.push_back(s);
    }
    return inst;
}

// Small P3 generator parameters for desk-sized fields that k-cover easily.
inline GenParams small_p3(double side = 200.0, int k = 1) {
    GenParams g = GenParams::defaults(Variant::P3_KCoverage);
    g.area_side = side;
    g.coverage_k = k;
    return g;
}

// Random symmetric graph with nonnegative weights on its edges.
inline GraphInput random_graph(int n, int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GraphInput g;
    g.X = Eigen::MatrixXd::Zero(d, n);
    g.W = Eigen::MatrixXd::Zero(n, n);
    g.A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < g.X.size(); ++i) g.X.data()[i] = 2 * u(rng) - 1;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (u(rng) < 0.6) {
                g.A(a, b) = g.A(b, a) = 1.0;
                g.W(a, b) = g.W(b, a) = u(rng);
            }
        }
    }
    return g;
}

// Central-difference gradient of batch_loss.
inline EmbeddingParams numeric_gradient(std::span<const LossTerm> terms, const EmbeddingParams& params, double h) {
    EmbeddingParams grad = EmbeddingParams::zeros_like(params);
    EmbeddingParams probe = params;
    for (int k = 0; k < 7; ++k) {
        for (Eigen::Index i = 0; i < probe.theta[k].size(); ++i) {
            const double keep = probe.theta[k].data()[i];
            probe.theta[k].data()[i] = keep + h;
            const double up = batch_loss(terms, probe);
            probe.theta[k].data()[i] = keep - h;
            const double down = batch_loss(terms, probe);
            probe.theta[k].data()[i] = keep;
            grad.theta[k].data()[i] = (up - down) / (2 * h);
        }
    }
    return grad;
}

// ||a - b|| / max(||a||, ||b||) over all parameter blocks.
inline double relative_gap(const EmbeddingParams& a, const EmbeddingParams& b) {
    double diff = 0.0, na = 0.0, nb = 0.0;
    for (int k = 0; k < 7; ++k) {
        diff += (a.theta[k] - b.theta[k]).squaredNorm();
        na += a.theta[k].squaredNorm();
        nb += b.theta[k].squaredNorm();
    }
    const double denom = std::sqrt(std::max(na, nb));
    return denom > 0 ? std::sqrt(diff) / denom : 0.0;
}

}  // namespace wrsn::fixture
