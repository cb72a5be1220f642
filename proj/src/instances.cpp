#include "wrsn/instances.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "wrsn/geometry.hpp"

namespace wrsn {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::P1_MobilePath: return "p1";
        case Variant::P2_FullyChargingReward: return "p2";
        case Variant::P3_KCoverage: return "p3";
    }
    return "?";
}

Variant parse_variant(std::string_view s) {
    if (s == "p1" || s == "P1" || s == "P1_MobilePath") return Variant::P1_MobilePath;
    if (s == "p2" || s == "P2" || s == "P2_FullyChargingReward") return Variant::P2_FullyChargingReward;
    if (s == "p3" || s == "P3" || s == "P3_KCoverage") return Variant::P3_KCoverage;
    throw ParseError("unknown variant '" + std::string(s) + "'");
}

Point MobilityTrace::position_at(double t) const {
    if (waypoints.empty()) throw std::out_of_range("empty trace");
    if (t < start_time() || t > end_time()) {
        throw std::out_of_range("time " + std::to_string(t) + " outside trace horizon [" +
                                std::to_string(start_time()) + ", " + std::to_string(end_time()) + "]");
    }
    auto it = std::upper_bound(waypoints.begin(), waypoints.end(), t,
                               [](double v, const Waypoint& w) { return v < w.t; });
    if (it == waypoints.end()) return waypoints.back().p;
    const Waypoint& b = *it;
    const Waypoint& a = *(it - 1);
    return lerp(a.p, b.p, (t - a.t) / (b.t - a.t));
}

Point position_at(const SensorNode& node, double t) {
    if (!node.trajectory) return node.position;
    return node.trajectory->position_at(t);
}

int prize_of(const SensorNode& node, int n) {
    const long long n2 = static_cast<long long>(n) * n;
    const double raw = std::ceil(static_cast<double>(n2) * (node.capacity - node.residual) / node.capacity);
    return static_cast<int>(std::clamp<long long>(static_cast<long long>(raw), 1, n2));
}

bool ProblemInstance::is_requester(const SensorNode& node) const {
    switch (variant) {
        case Variant::P1_MobilePath: return node.residual < p1_target_level(node);
        case Variant::P2_FullyChargingReward:
        case Variant::P3_KCoverage: return node.residual <= alpha * node.capacity;
    }
    return false;
}

double ProblemInstance::p1_target_level(const SensorNode& node) const {
    return (1.0 - epsilon_charge) * alpha * node.capacity;
}

std::vector<int> ProblemInstance::requesters() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
        if (is_requester(nodes[i])) out.push_back(i);
    }
    std::stable_sort(out.begin(), out.end(), [&](int a, int b) { return nodes[a].id < nodes[b].id; });
    return out;
}

namespace {

void fail(const std::string& what) { throw ValidationError(what); }

std::string node_tag(const SensorNode& n) { return "node " + std::to_string(n.id) + ": "; }

}  // namespace

void validate(const ProblemInstance& inst) {
    if (inst.nodes.empty()) fail("empty instance");
    const int n = static_cast<int>(inst.nodes.size());
    const auto& ch = inst.charger;
    if (!(ch.speed > 0)) fail("charger speed must be positive");
    if (!(ch.transfer_rate > 0)) fail("charger transfer rate must be positive");
    if (!(ch.travel_energy >= 0)) fail("charger travel energy must be non-negative");
    if (!(inst.alpha > 0 && inst.alpha <= 1)) fail("alpha must lie in (0, 1]");
    if (!(inst.area.x1 > inst.area.x0 && inst.area.y1 > inst.area.y0)) fail("area must be non-degenerate");

    std::set<int> ids;
    for (const auto& node : inst.nodes) {
        if (!ids.insert(node.id).second) fail(node_tag(node) + "duplicate id");
        if (!(node.capacity > 0)) fail(node_tag(node) + "capacity must be positive");
        if (!(node.residual >= 0 && node.residual <= node.capacity)) fail(node_tag(node) + "residual outside [0, B]");
        if (node.deadline) {
            if (!(node.consumption > 0)) fail(node_tag(node) + "deadline requires a positive consumption rate");
            const double expect = node.residual / node.consumption;
            if (std::abs(*node.deadline - expect) > 1e-12 * std::max(1.0, expect))
                fail(node_tag(node) + "deadline differs from residual / consumption");
        }
        if (node.prize && (*node.prize < 1 || static_cast<long long>(*node.prize) > 1LL * n * n))
            fail(node_tag(node) + "prize outside [1, n^2]");
        if (node.trajectory) {
            const auto& tr = *node.trajectory;
            if (tr.waypoints.empty()) fail(node_tag(node) + "empty trajectory");
            for (std::size_t i = 1; i < tr.waypoints.size(); ++i) {
                const auto& a = tr.waypoints[i - 1];
                const auto& b = tr.waypoints[i];
                if (!(b.t > a.t)) fail(node_tag(node) + "waypoint times must increase strictly");
                const double v = distance(a.p, b.p) / (b.t - a.t);
                if (v > tr.max_speed * (1 + 1e-9) + 1e-12) fail(node_tag(node) + "segment speed exceeds max speed");
            }
        }
    }

    switch (inst.variant) {
        case Variant::P1_MobilePath:
            if (!ch.timespan || !(*ch.timespan > 0)) fail("P1 requires a positive timespan C");
            if (!(inst.meet_dt > 0)) fail("P1 requires a positive interception step");
            for (const auto& node : inst.nodes) {
                if (!node.trajectory) fail(node_tag(node) + "P1 requires a trajectory");
                if (!(ch.speed > node.trajectory->max_speed)) fail(node_tag(node) + "charger must outrun every sensor");
                if (node.trajectory->start_time() > inst.t0 ||
                    node.trajectory->end_time() < inst.t0 + *ch.timespan)
                    fail(node_tag(node) + "trajectory must cover [t0, t0 + C]");
            }
            break;
        case Variant::P2_FullyChargingReward:
            if (!ch.energy_capacity || !(*ch.energy_capacity > 0)) fail("P2 requires a positive energy capacity IE");
            for (const auto& node : inst.nodes) {
                if (inst.is_requester(node) && !node.prize) fail(node_tag(node) + "requester without prize");
            }
            break;
        case Variant::P3_KCoverage:
            if (inst.coverage_k < 1) fail("P3 requires coverage k >= 1");
            for (const auto& node : inst.nodes) {
                if (!node.deadline) fail(node_tag(node) + "P3 requires a deadline");
                if (!node.sensing_radius || !(*node.sensing_radius > 0)) fail(node_tag(node) + "P3 requires a sensing radius");
            }
            if (!verify_k_coverage(inst)) fail("initial deployment does not k-cover the area");
            break;
    }
}

GenParams GenParams::defaults(Variant v) {
    GenParams p;
    switch (v) {
        case Variant::P1_MobilePath:
            p.area_side = 100.0;
            p.transfer_rate = 40.0;
            p.travel_energy = 0.0;
            p.timespan = 1800.0;
            p.alpha = 0.9;
            p.epsilon = 0.1;
            break;
        case Variant::P2_FullyChargingReward:
            p.area_side = 1000.0;
            p.energy_capacity = 300e3;
            p.travel_energy = 600.0;
            p.alpha = 0.2;
            break;
        case Variant::P3_KCoverage:
            p.area_side = 500.0;
            p.sensing_radius = 135.0;
            p.transfer_rate = 20.0;
            p.travel_energy = 600.0;
            p.alpha = 0.45;
            p.coverage_k = 2;
            break;
    }
    return p;
}

namespace {

MobilityTrace random_waypoint(Point start, const Rect& area, double t0, double horizon, double max_speed,
                              std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(area.x0, area.x1);
    std::uniform_real_distribution<double> uy(area.y0, area.y1);
    std::uniform_real_distribution<double> us(0.0, max_speed);
    MobilityTrace tr;
    tr.max_speed = max_speed;
    tr.waypoints.push_back({t0, start});
    const double floor_speed = 1e-3 * max_speed;
    while (tr.waypoints.back().t < t0 + horizon) {
        const Point next{ux(rng), uy(rng)};
        const double speed = std::max(us(rng), floor_speed);
        const double d = distance(tr.waypoints.back().p, next);
        if (d <= 0) continue;
        tr.waypoints.push_back({tr.waypoints.back().t + d / speed, next});
    }
    return tr;
}

}  // namespace

ProblemInstance generate_instance(Variant variant, int n, const GenParams& params, std::uint64_t seed) {
    if (n < 1) throw ValidationError("empty instance rejected: n must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ProblemInstance inst;
    inst.variant = variant;
    inst.seed = seed;
    inst.alpha = params.alpha;
    inst.epsilon_charge = params.epsilon;
    inst.t0 = params.t0;
    inst.meet_dt = params.meet_dt;
    inst.area = {0.0, 0.0, params.area_side, params.area_side};
    inst.charger.depot = inst.area.center();
    inst.charger.end_point = inst.area.center();
    inst.charger.speed = params.charger_speed;
    inst.charger.transfer_rate = params.transfer_rate;
    inst.charger.travel_energy = params.travel_energy;

    auto place = [&](std::vector<Point>& pts) {
        pts.resize(n);
        for (auto& p : pts) p = {inst.area.x0 + unit(rng) * inst.area.width(), inst.area.y0 + unit(rng) * inst.area.height()};
    };

    std::vector<Point> pts;
    if (variant == Variant::P3_KCoverage) {
        inst.coverage_k = params.coverage_k;
        int attempt = 0;
        for (;; ++attempt) {
            if (attempt >= params.retry_budget) {
                throw InfeasibleDeployment("no " + std::to_string(params.coverage_k) + "-covering deployment of " +
                                           std::to_string(n) + " sensors found in " +
                                           std::to_string(params.retry_budget) + " attempts");
            }
            place(pts);
            if (min_coverage(pts, params.sensing_radius, inst.area) >= params.coverage_k) break;
        }
    } else {
        place(pts);
    }

    inst.nodes.resize(n);
    for (int i = 0; i < n; ++i) {
        SensorNode& node = inst.nodes[i];
        node.id = i;
        node.position = pts[i];
        node.capacity = params.battery;
    }

    switch (variant) {
        case Variant::P1_MobilePath: {
            inst.charger.end_point = {inst.area.x1, inst.area.y1};
            inst.charger.timespan = params.timespan;
            for (auto& node : inst.nodes) {
                node.residual = unit(rng) * node.capacity;
                node.trajectory = random_waypoint(node.position, inst.area, inst.t0, params.timespan,
                                                  params.sensor_max_speed, rng);
            }
            break;
        }
        case Variant::P2_FullyChargingReward: {
            inst.charger.energy_capacity = params.energy_capacity;
            for (auto& node : inst.nodes) {
                node.residual = (1.0 - unit(rng)) * node.capacity;  // (0, B]
                if (inst.is_requester(node)) node.prize = prize_of(node, n);
            }
            break;
        }
        case Variant::P3_KCoverage: {
            std::uniform_real_distribution<double> ub(params.beta_min, params.beta_max);
            for (auto& node : inst.nodes) {
                node.sensing_radius = params.sensing_radius;
                node.residual = node.capacity - unit(rng) * (node.capacity - params.residual_min);  // (min, B]
                node.consumption = ub(rng);
                node.deadline = node.residual / node.consumption;
            }
            break;
        }
    }
    return inst;
}

}  // namespace wrsn
