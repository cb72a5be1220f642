#include "wrsn/envs.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "wrsn/text.hpp"

namespace wrsn {

std::vector<int> ScheduleState::order() const {
    std::vector<int> out;
    for (std::size_t i = 1; i < visits.size(); ++i) out.push_back(visits[i].vertex);
    return out;
}

bool ScheduleState::contains(int vertex) const {
    return std::any_of(visits.begin() + (visits.empty() ? 0 : 1), visits.end(),
                       [&](const Visit& v) { return v.vertex == vertex; });
}

bool ScheduleState::is_rejected(int vertex) const {
    return std::find(rejected.begin(), rejected.end(), vertex) != rejected.end();
}

Environment::Environment(ProblemInstance inst, const EnvOptions& opt)
    : inst_(std::move(inst)), opt_(opt), graph_(inst_) {
    if (inst_.variant != Variant::P3_KCoverage) return;
    table_ = build_subregions(inst_, opt_.arrangement);
    cover_rows_.assign(graph_.vertex_count(), {});
    for (int v = 1; v < graph_.vertex_count(); ++v) {
        const int id = graph_.vertex(v).node_id;
        for (std::size_t i = 0; i < table_.size(); ++i) {
            if (table_.T[i] <= 0) continue;
            const auto& ids = table_.subregions[i].covering_ids;
            if (std::binary_search(ids.begin(), ids.end(), id)) cover_rows_[v].push_back(static_cast<int>(i));
        }
    }
}

void Environment::close(ScheduleState& s) const {
    const Point last = s.visits.back().position;
    const Point target = inst_.variant == Variant::P1_MobilePath ? inst_.charger.end_point : inst_.charger.depot;
    s.closing_distance = distance(last, target);
}

ScheduleState Environment::initial_state() const {
    ScheduleState s;
    Visit start;
    start.arrive = start.start = inst_.t0;
    start.position = inst_.charger.depot;
    s.visits.push_back(start);
    s.clock = inst_.t0;
    if (inst_.variant == Variant::P3_KCoverage) s.coverage_T = table_.T;
    close(s);
    return s;
}

void Environment::extend(ScheduleState& s, int vertex) const {
    const SensorNode& node = node_of(vertex);
    const Point from = s.visits.back().position;
    const double speed = inst_.charger.speed;
    const double rate = inst_.charger.transfer_rate;
    Visit v;
    v.vertex = vertex;

    if (!s.feasible) {
        v.position = node.position;
        v.leg = distance(from, v.position);
        v.arrive = v.start = kInf;
    } else if (inst_.variant == Variant::P1_MobilePath) {
        const auto meet = intercept(inst_, node, from, s.clock);
        if (meet) {
            v.position = meet->position;
            v.leg = distance(from, v.position);
            v.arrive = s.clock + v.leg / speed;
            v.start = meet->time;
            v.charge = charge_duration(inst_, node, v.start);
            v.energy = v.charge * rate;
        } else {
            v.position = node.position;
            v.leg = distance(from, v.position);
            v.arrive = v.start = kInf;
            s.feasible = false;
        }
    } else {
        v.position = node.position;
        v.leg = distance(from, v.position);
        v.arrive = s.clock + v.leg / speed;
        v.start = v.arrive;
        if (inst_.variant == Variant::P3_KCoverage && opt_.p3_grid_dt > 0) {
            v.start = slot_time(slot_ceil(v.arrive, inst_.t0, opt_.p3_grid_dt), inst_.t0, opt_.p3_grid_dt);
        }
        if (v.start > absolute_deadline(inst_, node)) {
            v.start = kInf;
            s.feasible = false;
        } else {
            v.charge = charge_duration(inst_, node, v.start);
            v.energy = v.charge * rate;
        }
    }

    s.travel_distance += v.leg;
    s.charge_energy += v.energy;
    s.clock = s.feasible ? v.start + v.charge : kInf;
    if (inst_.variant == Variant::P3_KCoverage) {
        for (int i : cover_rows_[vertex]) s.coverage_T[i] = std::max(0, s.coverage_T[i] - 1);
    }
    s.visits.push_back(v);
    close(s);
}

ScheduleState Environment::prefix(const ScheduleState& s, std::size_t keep) const {
    ScheduleState out = initial_state();
    out.rejected = s.rejected;
    for (std::size_t i = 1; i < keep; ++i) {
        const Visit& v = s.visits[i];
        out.visits.push_back(v);
        out.travel_distance += v.leg;
        out.charge_energy += v.energy;
        if (!std::isfinite(v.start)) out.feasible = false;
        out.clock = out.feasible ? v.start + v.charge : kInf;
        if (inst_.variant == Variant::P3_KCoverage) {
            for (int r : cover_rows_[v.vertex]) out.coverage_T[r] = std::max(0, out.coverage_T[r] - 1);
        }
    }
    close(out);
    return out;
}

ScheduleState Environment::replay(std::span<const int> order, std::span<const int> rejected) const {
    ScheduleState s = initial_state();
    s.rejected.assign(rejected.begin(), rejected.end());
    for (int v : order) extend(s, v);
    return s;
}

Environment::Insertion Environment::best_insertion(const ScheduleState& s, int vertex) const {
    Insertion best;
    const std::size_t L = s.visits.size();
    if (inst_.variant == Variant::P1_MobilePath) {
        best.state = s;
        extend(best.state, vertex);
        best.position = static_cast<int>(L);
        best.added_distance = best.state.tour_distance() - s.tour_distance();
        best.feasible = best.state.feasible;
        return best;
    }

    const Point p = node_of(vertex).position;
    const Point depot = inst_.charger.depot;
    struct Candidate {
        std::size_t pos;
        double delta;
    };
    std::vector<Candidate> cands;
    {
        const Point last = s.visits.back().position;
        cands.push_back({L, distance(last, p) + distance(p, depot) - distance(last, depot)});
    }
    for (std::size_t pos = 1; pos < L; ++pos) {
        const Point a = s.visits[pos - 1].position;
        const Point b = s.visits[pos].position;
        cands.push_back({pos, distance(a, p) + distance(p, b) - distance(a, b)});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) { return x.delta < y.delta; });

    auto build = [&](std::size_t pos) {
        ScheduleState out = prefix(s, pos);
        extend(out, vertex);
        for (std::size_t i = pos; i < L; ++i) extend(out, s.visits[i].vertex);
        return out;
    };

    if (inst_.variant == Variant::P2_FullyChargingReward) {
        best.state = build(cands.front().pos);
        best.position = static_cast<int>(cands.front().pos);
        best.added_distance = cands.front().delta;
        best.feasible = true;
        return best;
    }
    for (const auto& c : cands) {
        ScheduleState out = build(c.pos);
        if (!out.feasible) continue;
        best.state = std::move(out);
        best.position = static_cast<int>(c.pos);
        best.added_distance = c.delta;
        best.feasible = true;
        return best;
    }
    best.state = s;
    best.state.feasible = false;
    return best;
}

double Environment::total_time(const ScheduleState& s) const {
    return s.clock + s.closing_distance / inst_.charger.speed - inst_.t0;
}

double Environment::total_energy(const ScheduleState& s) const {
    return s.charge_energy + inst_.charger.travel_energy * s.tour_distance();
}

bool Environment::within_limits(const ScheduleState& s) const {
    if (!s.feasible) return false;
    switch (inst_.variant) {
        case Variant::P1_MobilePath:
            return !inst_.charger.timespan || total_time(s) <= *inst_.charger.timespan;
        case Variant::P2_FullyChargingReward:
            return !inst_.charger.energy_capacity || total_energy(s) <= *inst_.charger.energy_capacity;
        case Variant::P3_KCoverage: return true;
    }
    return true;
}

bool Environment::coverage_satisfied(const ScheduleState& s) const {
    return std::all_of(s.coverage_T.begin(), s.coverage_T.end(), [](int t) { return t == 0; });
}

double Environment::objective(const ScheduleState& s) const {
    switch (inst_.variant) {
        case Variant::P1_MobilePath: return static_cast<double>(s.length());
        case Variant::P2_FullyChargingReward: {
            double sum = 0.0;
            for (std::size_t i = 1; i < s.visits.size(); ++i) sum += graph_.vertex(s.visits[i].vertex).prize.value_or(0);
            return sum;
        }
        case Variant::P3_KCoverage: return s.feasible ? -s.tour_distance() : -kInf;
    }
    return 0.0;
}

std::vector<int> Environment::actions(const ScheduleState& s) const {
    std::vector<int> out;
    if (!s.feasible) return out;
    if (inst_.variant == Variant::P3_KCoverage && coverage_satisfied(s)) return out;
    for (int v = 1; v < graph_.vertex_count(); ++v) {
        if (s.contains(v) || s.is_rejected(v)) continue;
        if (inst_.variant == Variant::P3_KCoverage) {
            const bool reachable = std::any_of(s.visits.begin(), s.visits.end(),
                                               [&](const Visit& u) { return graph_.has_edge(u.vertex, v); });
            if (!reachable || !best_insertion(s, v).feasible) continue;
        }
        out.push_back(v);
    }
    return out;
}

StepOutcome Environment::step(const ScheduleState& s, int vertex) const {
    if (vertex <= 0 || vertex >= graph_.vertex_count()) throw ValidationError("action is not a requester vertex");
    if (s.contains(vertex) || s.is_rejected(vertex)) throw ValidationError("action was already taken");
    StepOutcome out;
    Insertion ins = best_insertion(s, vertex);

    if (inst_.variant == Variant::P3_KCoverage) {
        if (!ins.feasible) {
            out.next_state = s;
            out.reward = kInfeasibleReward;
            out.terminal = true;
            return out;
        }
        out.reward = -ins.added_distance;
        out.insert_pos = ins.position;
        out.charged_energy = ins.state.visits[ins.position].energy;
        out.next_state = std::move(ins.state);
        out.terminal = is_terminal(out.next_state);
        return out;
    }

    if (!within_limits(ins.state)) {
        out.next_state = s;
        out.next_state.rejected.push_back(vertex);
        out.rejected = true;
        out.reward = 0.0;
    } else {
        out.insert_pos = ins.position;
        out.charged_energy = ins.state.visits[ins.position].energy;
        out.reward = inst_.variant == Variant::P1_MobilePath ? 1.0 : graph_.vertex(vertex).prize.value_or(0);
        out.next_state = std::move(ins.state);
    }
    out.terminal = is_terminal(out.next_state);
    return out;
}

double Environment::reward(const ScheduleState& s, int vertex) const { return step(s, vertex).reward; }

double Environment::charge_energy(const ScheduleState& s, int vertex) const {
    const Insertion ins = best_insertion(s, vertex);
    if (!ins.feasible) return kInf;
    return ins.state.visits[ins.position].energy;
}

bool Environment::is_terminal(const ScheduleState& s) const {
    if (inst_.variant == Variant::P3_KCoverage && (!s.feasible || coverage_satisfied(s))) return true;
    return actions(s).empty();
}

SubregionTable Environment::table_of(const ScheduleState& s) const {
    SubregionTable t = table_;
    t.T = s.coverage_T;
    return t;
}

int Environment::coverage_gain(const ScheduleState& s, int vertex) const {
    if (inst_.variant != Variant::P3_KCoverage) return 0;
    int gain = 0;
    for (int i : cover_rows_[vertex]) gain += s.coverage_T[i] > 0 ? 1 : 0;
    return gain;
}

ScheduleState replay_schedule(const ProblemInstance& inst, std::span<const int> order, double grid_dt) {
    EnvOptions opt;
    opt.p3_grid_dt = grid_dt;
    return Environment(inst, opt).replay(order);
}

std::vector<TraceRow> tour_trace(const Environment& env, const ScheduleState& s) {
    std::vector<TraceRow> rows;
    const auto order = s.order();
    ScheduleState cur = env.initial_state();
    double prev = env.objective(cur);
    for (std::size_t i = 0; i < order.size(); ++i) {
        env.extend(cur, order[i]);
        TraceRow r;
        r.step = static_cast<int>(i + 1);
        r.vertex = order[i];
        r.node_id = env.graph().vertex(order[i]).node_id;
        r.insert_pos = static_cast<int>(i + 1);
        const double obj = env.objective(cur);
        r.reward = obj - prev;
        prev = obj;
        r.clock = cur.clock;
        r.distance = cur.travel_distance;
        r.energy = cur.charge_energy + env.instance().charger.travel_energy * cur.travel_distance;
        rows.push_back(r);
    }
    return rows;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> rows) {
    os << "step,vertex,insert_pos,reward,clock_s,dist_m,energy_J\n";
    for (const auto& r : rows) {
        os << r.step << ',' << r.node_id << ',' << r.insert_pos << ',' << fmt_double(r.reward) << ','
           << fmt_double(r.clock) << ',' << fmt_double(r.distance) << ',' << fmt_double(r.energy) << '\n';
    }
}

}  // namespace wrsn
