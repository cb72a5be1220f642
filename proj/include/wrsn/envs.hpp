#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "wrsn/geometry.hpp"
#include "wrsn/graph.hpp"
#include "wrsn/instances.hpp"

namespace wrsn {

// Reward of an action that cannot be placed anywhere without missing a
// deadline. Never used as a learning target.
inline constexpr double kInfeasibleReward = -kInf;

struct Visit {
    int vertex = 0;
    double arrive = 0.0;  // charger reaches the meeting point
    double start = 0.0;   // charging begins (>= arrive; later for P1 sojourn or grid rounding)
    double charge = 0.0;  // charging duration (s)
    double energy = 0.0;  // energy delivered (J)
    double leg = 0.0;     // distance from the previous visit (m)
    Point position;
};

// Partial charging tour. visits[0] is the start vertex v0.
struct ScheduleState {
    std::vector<Visit> visits;
    std::vector<int> rejected;  // vertices removed by the stop function (P1/P2)
    double travel_distance = 0.0;   // sum of legs along visits
    double closing_distance = 0.0;  // last visit -> depot (P2/P3) or end point (P1)
    double charge_energy = 0.0;
    double clock = 0.0;  // end of the last charge
    bool feasible = true;  // false once a deadline is missed
    std::vector<int> coverage_T;  // P3 only

    std::size_t length() const { return visits.empty() ? 0 : visits.size() - 1; }
    double tour_distance() const { return travel_distance + closing_distance; }
    std::vector<int> order() const;  // visited vertices without v0
    bool contains(int vertex) const;
    bool is_rejected(int vertex) const;
};

struct StepOutcome {
    ScheduleState next_state;
    double reward = 0.0;
    bool terminal = false;
    bool rejected = false;
    int insert_pos = -1;        // index in visits where the vertex landed
    double charged_energy = 0;  // energy delivered to the chosen vertex (J)
};

struct EnvOptions {
    // P3 only: round charging start times up to this grid (0 = continuous).
    // Matches the time-expanded DAG when set to its dt.
    double p3_grid_dt = 0.0;
    ArrangementOptions arrangement;
};

class Environment {
public:
    explicit Environment(ProblemInstance inst, const EnvOptions& opt = {});

    const ProblemInstance& instance() const { return inst_; }
    const ChargingGraph& graph() const { return graph_; }
    Variant variant() const { return inst_.variant; }
    int vertex_count() const { return graph_.vertex_count(); }
    const SensorNode& node_of(int vertex) const { return inst_.nodes[graph_.vertex(vertex).node_index]; }
    const SubregionTable& initial_table() const { return table_; }
    const EnvOptions& options() const { return opt_; }

    ScheduleState initial_state() const;

    double objective(const ScheduleState& s) const;
    std::vector<int> actions(const ScheduleState& s) const;

    struct Insertion {
        ScheduleState state;
        int position = -1;  // index into visits
        double added_distance = kInf;
        bool feasible = false;
    };
    // Insertion function g: append for P1, cheapest position for P2, cheapest
    // deadline-feasible position for P3. Ties go to the append position.
    Insertion best_insertion(const ScheduleState& s, int vertex) const;
    ScheduleState insert(const ScheduleState& s, int vertex) const { return best_insertion(s, vertex).state; }

    // Objective change of the accepted transition (P3: -inf when infeasible).
    double reward(const ScheduleState& s, int vertex) const;
    // Energy needed to fill `vertex` when the charger reaches it after s.
    double charge_energy(const ScheduleState& s, int vertex) const;
    StepOutcome step(const ScheduleState& s, int vertex) const;

    // Stop-function constraint: Gamma <= C (P1), energy <= IE (P2),
    // every deadline met (P3).
    bool within_limits(const ScheduleState& s) const;
    bool coverage_satisfied(const ScheduleState& s) const;
    bool is_terminal(const ScheduleState& s) const;

    double total_time(const ScheduleState& s) const;    // Gamma(P), P1
    double total_energy(const ScheduleState& s) const;  // charge + xi * distance

    // Recompute a state from scratch for a visit order (vertices, v0 excluded).
    ScheduleState replay(std::span<const int> order, std::span<const int> rejected = {}) const;

    // Appends one visit to a state.
    void extend(ScheduleState& s, int vertex) const;

    SubregionTable table_of(const ScheduleState& s) const;
    // Number of positive T entries charging `vertex` would decrement.
    int coverage_gain(const ScheduleState& s, int vertex) const;

private:
    void close(ScheduleState& s) const;
    ScheduleState prefix(const ScheduleState& s, std::size_t keep) const;

    ProblemInstance inst_;
    EnvOptions opt_;
    ChargingGraph graph_;
    SubregionTable table_;
    std::vector<std::vector<int>> cover_rows_;  // per vertex: subregions with T0 > 0 it covers
};

// Replays a visit order (graph vertex ids, v0 excluded) under the charging
// time recurrence; a missed deadline marks the state infeasible and leaves
// +inf start times from that visit on.
ScheduleState replay_schedule(const ProblemInstance& inst, std::span<const int> order, double grid_dt = 0.0);

struct TraceRow {
    int step = 0;
    int vertex = 0;
    int node_id = -1;
    int insert_pos = -1;
    double reward = 0.0;
    double clock = 0.0;
    double distance = 0.0;
    double energy = 0.0;
};

// One row per visit of the final tour; reward is the objective change of
// each prefix.
std::vector<TraceRow> tour_trace(const Environment& env, const ScheduleState& s);

// step,vertex,insert_pos,reward,clock_s,dist_m,energy_J  (vertex as node id)
void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows);

}  // namespace wrsn
