#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include <Eigen/Dense>

#include "wrsn/envs.hpp"

namespace wrsn {

inline constexpr int kFeatureWidth = 8;

// structure2vec parameters. theta[0..6] hold theta1..theta7 with shapes
// p x d, p x p, p x p, p x 1, 1 x 2p, p x p, p x p.
struct EmbeddingParams {
    int p = 64;
    int rounds = 4;
    std::array<Eigen::MatrixXd, 7> theta;

    int feature_width() const { return static_cast<int>(theta[0].cols()); }

    // Uniform in [-scale, scale] from a seeded generator.
    static EmbeddingParams random(int p, int d, int rounds, std::uint64_t seed, double scale = 0.01);
    // Same shapes, all zeros; used as a gradient accumulator.
    static EmbeddingParams zeros_like(const EmbeddingParams& other);

    void axpy(double a, const EmbeddingParams& x);  // this += a * x
    bool all_finite() const;
};

// One graph as seen by the network: vertex features X (d x n), symmetric
// edge weights W (n x n, already normalized) and 0/1 adjacency A.
struct GraphInput {
    Eigen::MatrixXd X;
    Eigen::MatrixXd W;
    Eigen::MatrixXd A;

    int vertex_count() const { return static_cast<int>(X.cols()); }
};

struct Embedding {
    Eigen::MatrixXd mu;      // p x n
    Eigen::VectorXd pooled;  // sum over vertices
};

// Features of the current state: bias, selection flag, x, y, residual / B,
// slack (P3) or prize / n^2 (P2), distance to the path head, and the
// budget left after insertion (P1/P2) or share of the coverage deficit
// removed (P3). Neighborhoods are the undirected closure of the charging
// graph plus v0; weights are distances over the field diameter (P1 at the
// current clock).
GraphInput build_input(const Environment& env, const ScheduleState& s);

Embedding embed_graph(const GraphInput& g, const EmbeddingParams& params);
double q_value(const Embedding& e, int v, const EmbeddingParams& params);
Eigen::VectorXd q_values(const Embedding& e, const EmbeddingParams& params);

// Adds dQ(v)/dTheta * scale into grad and returns Q(v).
double accumulate_gradient(const GraphInput& g, int v, double scale, const EmbeddingParams& params,
                           EmbeddingParams& grad);

// Text format:
//   wrsn-s2v v1 p=<p> d=<d> T=<rounds>
//   theta<k> <rows> <cols>
//   <rows lines of cols values, shortest round-trip decimal>
void write_params(std::ostream& os, const EmbeddingParams& params);
EmbeddingParams read_params(std::istream& is);
void save_params(const std::filesystem::path& path, const EmbeddingParams& params);
EmbeddingParams load_params(const std::filesystem::path& path);

}  // namespace wrsn
