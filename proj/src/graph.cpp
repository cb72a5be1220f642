#include "wrsn/graph.hpp"

#include <algorithm>
#include <deque>
#include <ostream>

#include "wrsn/text.hpp"

namespace wrsn {

double charge_duration(const ProblemInstance& inst, const SensorNode& node, double t) {
    const double rate = inst.charger.transfer_rate;
    switch (inst.variant) {
        case Variant::P1_MobilePath: return std::max(0.0, inst.p1_target_level(node) - node.residual) / rate;
        case Variant::P2_FullyChargingReward: return (node.capacity - node.residual) / rate;
        case Variant::P3_KCoverage: return (node.capacity - node.residual_at(t, inst.t0)) / rate;
    }
    return 0.0;
}

long slot_ceil(double t, double t0, double dt) { return static_cast<long>(std::ceil((t - t0) / dt)); }

double absolute_deadline(const ProblemInstance& inst, const SensorNode& node) {
    return node.deadline ? inst.t0 + *node.deadline : kInf;
}

std::optional<Interception> intercept(const ProblemInstance& inst, const SensorNode& node, Point from, double clock) {
    const double dt = inst.meet_dt;
    const double speed = inst.charger.speed;
    if (!node.trajectory) {
        const double arrive = clock + distance(from, node.position) / speed;
        return Interception{slot_time(slot_ceil(arrive, inst.t0, dt), inst.t0, dt), node.position};
    }
    const double horizon = node.trajectory->end_time();
    for (long k = std::max(0L, slot_ceil(clock, inst.t0, dt));; ++k) {
        const double tk = slot_time(k, inst.t0, dt);
        if (tk > horizon) return std::nullopt;
        const Point p = node.trajectory->position_at(tk);
        if (distance(from, p) / speed <= tk - clock) return Interception{tk, p};
    }
}

ChargingGraph::ChargingGraph(const ProblemInstance& inst) : variant_(inst.variant) {
    directed_ = inst.variant == Variant::P3_KCoverage;
    GraphVertex start;
    start.position = inst.charger.depot;
    vertices_.push_back(start);
    for (int idx : inst.requesters()) {
        const auto& node = inst.nodes[idx];
        GraphVertex v;
        v.node_index = idx;
        v.node_id = node.id;
        v.position = node.position;
        v.deadline = node.deadline;
        v.prize = node.prize;
        vertices_.push_back(v);
    }
    const std::size_t V = vertices_.size();
    out_.assign(V, {});
    dist_.assign(V * V, 0.0);
    adj_.assign(V * V, 0);
    for (std::size_t u = 0; u < V; ++u) {
        for (std::size_t v = 0; v < V; ++v) dist_[u * V + v] = distance(vertices_[u].position, vertices_[v].position);
    }
    auto add = [&](int u, int v) {
        adj_[static_cast<std::size_t>(u) * V + v] = 1;
        out_[u].push_back(v);
    };
    if (!directed_) {
        for (int u = 1; u < static_cast<int>(V); ++u) {
            for (int v = u + 1; v < static_cast<int>(V); ++v) {
                add(u, v);
                add(v, u);
                edges_.push_back({u, v, weight(u, v)});
            }
        }
        return;
    }
    const double rate = inst.charger.transfer_rate;
    const double speed = inst.charger.speed;
    for (int u = 0; u < static_cast<int>(V); ++u) {
        const double charge =
            u == 0 ? 0.0 : (inst.nodes[vertices_[u].node_index].capacity - inst.nodes[vertices_[u].node_index].residual) / rate;
        for (int v = 0; v < static_cast<int>(V); ++v) {
            if (u == v) continue;
            const double deadline = vertices_[v].deadline ? *vertices_[v].deadline : kInf;
            if (charge + weight(u, v) / speed <= deadline) {
                add(u, v);
                edges_.push_back({u, v, weight(u, v)});
            }
        }
    }
}

bool ChargingGraph::has_edge(int u, int v) const { return adj_[static_cast<std::size_t>(u) * vertices_.size() + v] != 0; }

ChargingGraph build_graph(const ProblemInstance& inst) { return ChargingGraph(inst); }

double dynamic_weight(const ProblemInstance& inst, const ChargingGraph& g, int u, int v, double t) {
    const Point from = u == 0 ? inst.charger.depot : position_at(inst.nodes[g.vertex(u).node_index], t);
    if (v == 0) return distance(from, inst.charger.depot);
    const auto meet = intercept(inst, inst.nodes[g.vertex(v).node_index], from, t);
    if (!meet) return kInf;
    return distance(from, meet->position);
}

void write_edges_csv(std::ostream& os, const ChargingGraph& g) {
    os << "src,dst,weight_m\n";
    for (const auto& e : g.edges()) {
        os << g.vertex(e.src).node_id << ',' << g.vertex(e.dst).node_id << ',' << fmt_double(e.weight) << '\n';
    }
}

TimeExpandedDAG::TimeExpandedDAG(const ProblemInstance& inst, double dt, const DagOptions& opt)
    : depot_(inst.charger.depot), dt_(dt) {
    if (!(dt > 0)) throw ValidationError("time step dt must be positive");
    if (inst.variant != Variant::P3_KCoverage) throw ValidationError("time-expanded DAG requires a k-coverage instance");
    requester_nodes_ = inst.requesters();
    const int R = static_cast<int>(requester_nodes_.size());

    vertices_.push_back({-1, 0, inst.t0});
    std::size_t total = 1;
    for (int r = 0; r < R; ++r) {
        const auto& node = inst.nodes[requester_nodes_[r]];
        requester_pos_.push_back(node.position);
        const long slots = static_cast<long>(std::floor(*node.deadline / dt)) + 1;
        total += static_cast<std::size_t>(slots);
        if (total > opt.max_vertices) {
            throw ResourceLimit("time-expanded DAG would exceed " + std::to_string(opt.max_vertices) + " vertices");
        }
        first_.push_back(static_cast<int>(vertices_.size()));
        slot_count_.push_back(slots);
        for (long k = 0; k < slots; ++k) vertices_.push_back({r, k, slot_time(k, inst.t0, dt)});
    }
    out_.assign(vertices_.size(), {});

    const double speed = inst.charger.speed;
    // v0 -> first reachable slot of each requester
    for (int r = 0; r < R; ++r) {
        const double arrive = inst.t0 + distance(depot_, requester_pos_[r]) / speed;
        const int w = vertex_at(r, slot_ceil(arrive, inst.t0, dt));
        if (w >= 0) out_[0].push_back(w);
    }
    for (int r = 0; r < R; ++r) {
        const auto& node = inst.nodes[requester_nodes_[r]];
        for (long k = 0; k < slot_count_[r]; ++k) {
            const int u = first_[r] + static_cast<int>(k);
            const double leave = vertices_[u].time + charge_duration(inst, node, vertices_[u].time);
            for (int q = 0; q < R; ++q) {
                if (q == r) continue;
                const double arrive = leave + distance(requester_pos_[r], requester_pos_[q]) / speed;
                const long kk = slot_ceil(arrive, inst.t0, dt);
                if (kk <= 0) continue;
                const int w = vertex_at(q, kk);
                if (w >= 0) out_[u].push_back(w);
            }
        }
    }

    // Kahn's algorithm in index order.
    std::vector<int> indeg(vertices_.size(), 0);
    for (const auto& adj : out_) {
        for (int w : adj) ++indeg[w];
    }
    std::deque<int> ready;
    for (int v = 0; v < vertex_count(); ++v) {
        if (indeg[v] == 0) ready.push_back(v);
    }
    while (!ready.empty()) {
        const int v = ready.front();
        ready.pop_front();
        topo_.push_back(v);
        for (int w : out_[v]) {
            if (--indeg[w] == 0) ready.push_back(w);
        }
    }
    if (topo_.size() != vertices_.size()) throw Error("time-expanded graph contains a cycle");
}

int TimeExpandedDAG::vertex_at(int requester, long slot) const {
    if (slot < 0 || slot >= slot_count_[requester]) return -1;
    return first_[requester] + static_cast<int>(slot);
}

std::size_t TimeExpandedDAG::edge_count() const {
    std::size_t e = 0;
    for (const auto& adj : out_) e += adj.size();
    return e;
}

Point TimeExpandedDAG::position(int v) const {
    return v == 0 ? depot_ : requester_pos_[vertices_[v].clique];
}

double TimeExpandedDAG::edge_length(int u, int v) const { return distance(position(u), position(v)); }

TimeExpandedDAG build_time_expanded_dag(const ProblemInstance& inst, double dt, const DagOptions& opt) {
    return TimeExpandedDAG(inst, dt, opt);
}

void write_dag_csv(std::ostream& os, const ProblemInstance& inst, const TimeExpandedDAG& dag) {
    os << "src_node,src_t,dst_node,dst_t\n";
    auto id = [&](int v) { return v == 0 ? -1 : inst.nodes[dag.requester_node(dag.clique_of(v))].id; };
    for (int u : dag.topological_order()) {
        for (int w : dag.out(u)) {
            os << id(u) << ',' << fmt_double(dag.vertex(u).time) << ',' << id(w) << ',' << fmt_double(dag.vertex(w).time)
               << '\n';
        }
    }
}

}  // namespace wrsn
