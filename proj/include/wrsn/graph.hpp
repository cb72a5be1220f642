#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "wrsn/instances.hpp"

namespace wrsn {

// --- timing primitives shared by graphs, environments and solvers ---

// Seconds needed to charge `node` when charging starts at time t.
// P1: up to (1 - eps) alpha B from the static residual; P2: to full from
// B_i(t0); P3: to full from the residual extrapolated with beta_i.
double charge_duration(const ProblemInstance& inst, const SensorNode& node, double t);

// Smallest k with t0 + k*dt >= t.
long slot_ceil(double t, double t0, double dt);
inline double slot_time(long k, double t0, double dt) { return t0 + static_cast<double>(k) * dt; }

// Absolute deadline t0 + D_i, or +inf.
double absolute_deadline(const ProblemInstance& inst, const SensorNode& node);

struct Interception {
    double time = 0.0;  // charger meets the sensor here and starts charging
    Point position;
};

// Earliest grid step t_k >= clock at which a charger standing at `from`
// reaches the sensor's position at t_k. Empty past the trace horizon.
std::optional<Interception> intercept(const ProblemInstance& inst, const SensorNode& node, Point from, double clock);

// --- charging graph ---

struct GraphVertex {
    int node_index = -1;  // into ProblemInstance::nodes; -1 for the start vertex
    int node_id = -1;
    Point position;
    std::optional<double> deadline;  // relative to t0; absent means +inf
    std::optional<int> prize;
};

struct Edge {
    int src = 0;
    int dst = 0;
    double weight = 0.0;
};

// Vertex 0 is the charger's start v0; vertices 1..R are the requesters in
// ascending id order. P1/P2 edges are the complete undirected graph over
// the requesters (legs to v0 are implicit); P3 edges are directed and
// include v0.
class ChargingGraph {
public:
    ChargingGraph() = default;
    explicit ChargingGraph(const ProblemInstance& inst);

    Variant variant() const { return variant_; }
    bool directed() const { return directed_; }
    int start_vertex() const { return 0; }
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    const GraphVertex& vertex(int v) const { return vertices_[v]; }
    const std::vector<GraphVertex>& vertices() const { return vertices_; }
    const std::vector<int>& out(int v) const { return out_[v]; }
    const std::vector<Edge>& edges() const { return edges_; }
    bool has_edge(int u, int v) const;

    // Euclidean distance between the vertices' reference positions.
    double weight(int u, int v) const { return dist_[static_cast<std::size_t>(u) * vertices_.size() + v]; }

private:
    Variant variant_ = Variant::P2_FullyChargingReward;
    bool directed_ = false;
    std::vector<GraphVertex> vertices_;
    std::vector<std::vector<int>> out_;
    std::vector<Edge> edges_;
    std::vector<double> dist_;
    std::vector<char> adj_;
};

ChargingGraph build_graph(const ProblemInstance& inst);

// P1: distance from u's position at time t to v's position at the earliest
// step the charger can intercept it; +inf when unreachable in the horizon.
// u = 0 denotes the charger at its depot.
double dynamic_weight(const ProblemInstance& inst, const ChargingGraph& g, int u, int v, double t);

// src,dst,weight_m
void write_edges_csv(std::ostream& os, const ChargingGraph& g);

// --- time-expanded DAG for the exact k-coverage solver ---

struct DagVertex {
    int clique = -1;  // requester index (0-based) or -1 for v0
    long slot = 0;
    double time = 0.0;
};

struct DagOptions {
    std::size_t max_vertices = 5'000'000;
};

class TimeExpandedDAG {
public:
    TimeExpandedDAG(const ProblemInstance& inst, double dt, const DagOptions& opt = {});

    double dt() const { return dt_; }
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    const DagVertex& vertex(int v) const { return vertices_[v]; }
    int clique_of(int v) const { return vertices_[v].clique; }
    const std::vector<int>& out(int v) const { return out_[v]; }
    std::size_t edge_count() const;
    // Vertex of requester r at slot k, or -1 when past its deadline.
    int vertex_at(int requester, long slot) const;
    long slot_count(int requester) const { return slot_count_[requester]; }

    int requester_count() const { return static_cast<int>(requester_nodes_.size()); }
    // Node index (into ProblemInstance::nodes) of requester r.
    int requester_node(int r) const { return requester_nodes_[r]; }
    const std::vector<int>& topological_order() const { return topo_; }
    // Euclidean length of an edge (v0 legs included).
    double edge_length(int u, int v) const;
    Point position(int v) const;

private:
    std::vector<DagVertex> vertices_;
    std::vector<std::vector<int>> out_;
    std::vector<int> first_;
    std::vector<long> slot_count_;
    std::vector<int> requester_nodes_;
    std::vector<Point> requester_pos_;
    std::vector<int> topo_;
    Point depot_;
    double dt_ = 1.0;
};

TimeExpandedDAG build_time_expanded_dag(const ProblemInstance& inst, double dt, const DagOptions& opt = {});

// src_node,src_t,dst_node,dst_t (node -1 is v0)
void write_dag_csv(std::ostream& os, const ProblemInstance& inst, const TimeExpandedDAG& dag);

}  // namespace wrsn
