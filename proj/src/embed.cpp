#include "wrsn/embed.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "wrsn/text.hpp"

namespace wrsn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd relu(const MatrixXd& m) { return m.cwiseMax(0.0); }
MatrixXd relu_mask(const MatrixXd& m) { return (m.array() > 0.0).cast<double>().matrix(); }

double clamp1(double v) { return std::clamp(v, -1.0, 1.0); }

Point clamped_position(const SensorNode& node, double t) {
    if (!node.trajectory) return node.position;
    return node.trajectory->position_at(std::clamp(t, node.trajectory->start_time(), node.trajectory->end_time()));
}

}  // namespace

EmbeddingParams EmbeddingParams::random(int p, int d, int rounds, std::uint64_t seed, double scale) {
    if (p < 1 || d < 1 || rounds < 1) throw ValidationError("embedding width, feature width and rounds must be >= 1");
    EmbeddingParams out;
    out.p = p;
    out.rounds = rounds;
    const std::array<std::pair<int, int>, 7> shapes{{{p, d}, {p, p}, {p, p}, {p, 1}, {1, 2 * p}, {p, p}, {p, p}}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (int k = 0; k < 7; ++k) {
        out.theta[k].resize(shapes[k].first, shapes[k].second);
        for (Eigen::Index i = 0; i < out.theta[k].size(); ++i) out.theta[k].data()[i] = u(rng);
    }
    return out;
}

EmbeddingParams EmbeddingParams::zeros_like(const EmbeddingParams& other) {
    EmbeddingParams out;
    out.p = other.p;
    out.rounds = other.rounds;
    for (int k = 0; k < 7; ++k) out.theta[k] = MatrixXd::Zero(other.theta[k].rows(), other.theta[k].cols());
    return out;
}

void EmbeddingParams::axpy(double a, const EmbeddingParams& x) {
    for (int k = 0; k < 7; ++k) theta[k] += a * x.theta[k];
}

bool EmbeddingParams::all_finite() const {
    return std::all_of(theta.begin(), theta.end(), [](const MatrixXd& m) { return m.allFinite(); });
}

GraphInput build_input(const Environment& env, const ScheduleState& s) {
    const ProblemInstance& inst = env.instance();
    const ChargingGraph& g = env.graph();
    const int n = g.vertex_count();
    const double diam = inst.area.diameter();
    const double speed = inst.charger.speed;
    const Point head = s.visits.back().position;
    const bool p1 = inst.variant == Variant::P1_MobilePath;

    GraphInput in;
    in.X = MatrixXd::Zero(kFeatureWidth, n);
    in.W = MatrixXd::Zero(n, n);
    in.A = MatrixXd::Zero(n, n);

    std::vector<Point> pos(n);
    pos[0] = inst.charger.depot;
    for (int v = 1; v < n; ++v) pos[v] = p1 ? clamped_position(env.node_of(v), s.clock) : g.vertex(v).position;

    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            const bool linked = !g.directed() || u == 0 || g.has_edge(u, v) || g.has_edge(v, u);
            if (!linked) continue;
            const double w = distance(pos[u], pos[v]) / diam;
            in.A(u, v) = in.A(v, u) = 1.0;
            in.W(u, v) = in.W(v, u) = w;
        }
    }

    double max_deadline = 0.0;
    for (int v = 1; v < n; ++v) max_deadline = std::max(max_deadline, g.vertex(v).deadline.value_or(0.0));
    const double n2 = static_cast<double>(inst.size()) * static_cast<double>(inst.size());
    const double deficit = std::max(1, std::accumulate(s.coverage_T.begin(), s.coverage_T.end(), 0));

    auto budget_left = [&](const ScheduleState& after) {
        if (!after.feasible) return -1.0;
        if (p1) {
            if (!inst.charger.timespan) return 1.0;
            return clamp1((*inst.charger.timespan - env.total_time(after)) / *inst.charger.timespan);
        }
        if (!inst.charger.energy_capacity) return 1.0;
        return clamp1((*inst.charger.energy_capacity - env.total_energy(after)) / *inst.charger.energy_capacity);
    };

    in.X(0, 0) = 1.0;
    in.X(1, 0) = 1.0;
    in.X(2, 0) = (pos[0].x - inst.area.x0) / inst.area.width();
    in.X(3, 0) = (pos[0].y - inst.area.y0) / inst.area.height();
    in.X(4, 0) = 1.0;
    for (int v = 1; v < n; ++v) {
        const SensorNode& node = env.node_of(v);
        const bool taken = s.contains(v) || s.is_rejected(v);
        auto col = in.X.col(v);
        col(0) = 1.0;
        col(1) = taken ? 1.0 : 0.0;
        col(2) = clamp1((pos[v].x - inst.area.x0) / inst.area.width());
        col(3) = clamp1((pos[v].y - inst.area.y0) / inst.area.height());
        const double t = std::isfinite(s.clock) ? s.clock : inst.t0;
        col(4) = clamp1(node.residual_at(inst.variant == Variant::P3_KCoverage ? t : inst.t0, inst.t0) / node.capacity);
        double head_dist = distance(head, pos[v]);
        if (p1 && !taken) {
            const auto meet = intercept(inst, node, head, t);
            head_dist = meet ? distance(head, meet->position) : diam;
        }
        col(6) = clamp1(head_dist / diam);
        switch (inst.variant) {
            case Variant::P1_MobilePath: break;
            case Variant::P2_FullyChargingReward: col(5) = node.prize.value_or(0) / n2; break;
            case Variant::P3_KCoverage:
                if (max_deadline > 0) col(5) = clamp1((absolute_deadline(inst, node) - t - head_dist / speed) / max_deadline);
                break;
        }
        if (taken || !s.feasible) continue;
        if (inst.variant == Variant::P3_KCoverage) {
            col(7) = env.coverage_gain(s, v) / deficit;
        } else {
            col(7) = budget_left(env.best_insertion(s, v).state);
        }
    }
    return in;
}

namespace {

struct Forward {
    std::vector<MatrixXd> pre;  // pre-activations per round (1..T)
    std::vector<MatrixXd> mu;   // mu[0] = 0, mu[t] after round t
    VectorXd deg;               // weighted degree per vertex
    MatrixXd E;                 // edge message term, p x n
};

Forward forward(const GraphInput& g, const EmbeddingParams& P) {
    const int n = g.vertex_count();
    Forward f;
    f.deg = g.W.cwiseProduct(g.A).colwise().sum().transpose();
    // relu(theta4 * w) = w * relu(theta4) because normalized weights are >= 0.
    f.E = relu(P.theta[3]) * f.deg.transpose();
    const MatrixXd base = P.theta[0] * g.X + P.theta[2] * f.E;
    f.mu.push_back(MatrixXd::Zero(P.p, n));
    for (int t = 0; t < P.rounds; ++t) {
        f.pre.push_back(base + P.theta[1] * (f.mu.back() * g.A));
        f.mu.push_back(relu(f.pre.back()));
    }
    return f;
}

}  // namespace

Embedding embed_graph(const GraphInput& g, const EmbeddingParams& params) {
    Forward f = forward(g, params);
    Embedding e;
    e.mu = std::move(f.mu.back());
    e.pooled = e.mu.rowwise().sum();
    return e;
}

double q_value(const Embedding& e, int v, const EmbeddingParams& P) {
    VectorXd h(2 * P.p);
    h.head(P.p) = P.theta[5] * e.pooled;
    h.tail(P.p) = P.theta[6] * e.mu.col(v);
    return (P.theta[4] * h.cwiseMax(0.0))(0, 0);
}

Eigen::VectorXd q_values(const Embedding& e, const EmbeddingParams& P) {
    const VectorXd glob = (P.theta[5] * e.pooled).cwiseMax(0.0);
    const double g = P.theta[4].leftCols(P.p).row(0).dot(glob);
    const MatrixXd loc = relu(P.theta[6] * e.mu);
    return (P.theta[4].rightCols(P.p) * loc).transpose().array() + g;
}

double accumulate_gradient(const GraphInput& g, int v, double scale, const EmbeddingParams& P, EmbeddingParams& grad) {
    const int p = P.p;
    const Forward f = forward(g, P);
    const MatrixXd& mu = f.mu.back();
    const VectorXd pooled = mu.rowwise().sum();

    VectorXd h(2 * p);
    h.head(p) = P.theta[5] * pooled;
    h.tail(p) = P.theta[6] * mu.col(v);
    const VectorXd z = h.cwiseMax(0.0);
    const double q = P.theta[4].row(0).dot(z);

    grad.theta[4] += scale * z.transpose();
    const VectorXd dh = (scale * P.theta[4].row(0).transpose()).cwiseProduct(relu_mask(h));
    grad.theta[5] += dh.head(p) * pooled.transpose();
    grad.theta[6] += dh.tail(p) * mu.col(v).transpose();

    MatrixXd dmu = (P.theta[5].transpose() * dh.head(p)).replicate(1, g.vertex_count());
    dmu.col(v) += P.theta[6].transpose() * dh.tail(p);

    MatrixXd dE = MatrixXd::Zero(p, g.vertex_count());
    for (int t = P.rounds; t >= 1; --t) {
        const MatrixXd dpre = dmu.cwiseProduct(relu_mask(f.pre[t - 1]));
        grad.theta[0] += dpre * g.X.transpose();
        grad.theta[1] += dpre * (f.mu[t - 1] * g.A).transpose();
        grad.theta[2] += dpre * f.E.transpose();
        dE += P.theta[2].transpose() * dpre;
        dmu = P.theta[1].transpose() * dpre * g.A.transpose();
    }
    grad.theta[3] += (dE * f.deg).cwiseProduct(relu_mask(P.theta[3]));
    return q;
}

void write_params(std::ostream& os, const EmbeddingParams& params) {
    os << "wrsn-s2v v1 p=" << params.p << " d=" << params.feature_width() << " T=" << params.rounds << '\n';
    for (int k = 0; k < 7; ++k) {
        const MatrixXd& m = params.theta[k];
        os << "theta" << (k + 1) << ' ' << m.rows() << ' ' << m.cols() << '\n';
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c ? " " : "") << fmt_double(m(r, c));
            os << '\n';
        }
    }
}

EmbeddingParams read_params(std::istream& is) {
    std::string line;
    int lineno = 0;
    auto next = [&]() -> std::vector<std::string> {
        while (std::getline(is, line)) {
            ++lineno;
            auto tok = split_ws(line);
            if (!tok.empty()) return tok;
        }
        throw ParseError("checkpoint truncated after line " + std::to_string(lineno));
    };
    auto fail = [&](const std::string& what) { return ParseError("checkpoint line " + std::to_string(lineno) + ": " + what); };
    auto header = next();
    if (header.size() != 5 || header[0] != "wrsn-s2v" || header[1] != "v1") throw fail("expected 'wrsn-s2v v1' header");
    auto kv = [&](const std::string& tok, const std::string& key) {
        if (tok.rfind(key + "=", 0) != 0) throw fail("expected " + key + "=");
        try {
            return std::stoi(tok.substr(key.size() + 1));
        } catch (const std::exception&) {
            throw fail("bad integer for " + key);
        }
    };
    EmbeddingParams out;
    out.p = kv(header[2], "p");
    const int d = kv(header[3], "d");
    out.rounds = kv(header[4], "T");
    if (out.p < 1 || d < 1 || out.rounds < 1) throw fail("p, d and T must be >= 1");
    const std::array<std::pair<int, int>, 7> shapes{
        {{out.p, d}, {out.p, out.p}, {out.p, out.p}, {out.p, 1}, {1, 2 * out.p}, {out.p, out.p}, {out.p, out.p}}};
    for (int k = 0; k < 7; ++k) {
        auto tok = next();
        if (tok.size() != 3 || tok[0] != "theta" + std::to_string(k + 1)) throw fail("expected theta" + std::to_string(k + 1));
        int rows = 0, cols = 0;
        try {
            rows = std::stoi(tok[1]);
            cols = std::stoi(tok[2]);
        } catch (const std::exception&) {
            throw fail("bad shape for " + tok[0]);
        }
        if (rows != shapes[k].first || cols != shapes[k].second) throw fail("shape mismatch for " + tok[0]);
        MatrixXd m(rows, cols);
        for (int r = 0; r < rows; ++r) {
            auto vals = next();
            if (static_cast<int>(vals.size()) != cols) throw fail("expected " + std::to_string(cols) + " values");
            for (int c = 0; c < cols; ++c) {
                try {
                    m(r, c) = parse_double(vals[c]);
                } catch (const std::exception&) {
                    throw fail("bad number '" + vals[c] + "'");
                }
            }
        }
        out.theta[k] = std::move(m);
    }
    if (!out.all_finite()) throw ValidationError("checkpoint contains non-finite parameters");
    return out;
}

void save_params(const std::filesystem::path& path, const EmbeddingParams& params) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    write_params(os, params);
}

EmbeddingParams load_params(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot read " + path.string());
    return read_params(is);
}

}  // namespace wrsn
