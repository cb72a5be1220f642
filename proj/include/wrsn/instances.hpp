#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wrsn/core.hpp"

namespace wrsn {

enum class Variant {
    P1_MobilePath,           // maximize charged mobile sensors within a timespan
    P2_FullyChargingReward,  // maximize collected prizes within an energy capacity
    P3_KCoverage,            // minimize tour length while restoring k-coverage
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);  // accepts p1/p2/p3 and the long names

struct Waypoint {
    double t = 0.0;
    Point p;

    friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

// Piecewise-linear trajectory of a mobile sensor.
struct MobilityTrace {
    std::vector<Waypoint> waypoints;
    double max_speed = 0.0;

    double start_time() const { return waypoints.front().t; }
    double end_time() const { return waypoints.back().t; }
    Point position_at(double t) const;

    friend bool operator==(const MobilityTrace&, const MobilityTrace&) = default;
};

struct SensorNode {
    int id = 0;
    Point position;
    double capacity = 0.0;    // B (J)
    double residual = 0.0;    // B_i(t0) (J)
    double consumption = 0.0; // beta_i (W)
    std::optional<double> sensing_radius;
    std::optional<double> deadline;  // D_i (s, relative to t0)
    std::optional<int> prize;
    std::optional<MobilityTrace> trajectory;

    // Residual energy extrapolated with the consumption rate.
    double residual_at(double t, double t0) const { return residual - consumption * (t - t0); }

    friend bool operator==(const SensorNode&, const SensorNode&) = default;
};

struct Charger {
    Point depot;
    Point end_point;
    double speed = 5.0;           // m/s
    double transfer_rate = 20.0;  // W
    double travel_energy = 0.0;   // J per meter
    std::optional<double> energy_capacity;  // IE (J)
    std::optional<double> timespan;         // C (s)

    friend bool operator==(const Charger&, const Charger&) = default;
};

struct ProblemInstance {
    Variant variant = Variant::P2_FullyChargingReward;
    std::vector<SensorNode> nodes;
    Charger charger;
    double alpha = 0.2;
    double epsilon_charge = 0.1;  // P1 only
    int coverage_k = 0;           // P3 only
    Rect area;
    double t0 = 0.0;
    double meet_dt = 1.0;  // P1 interception grid (s)
    std::uint64_t seed = 0;

    std::size_t size() const { return nodes.size(); }

    // Indices into `nodes` of the sensors that send a charging request,
    // ascending by node id.
    std::vector<int> requesters() const;
    bool is_requester(const SensorNode& node) const;

    // Energy level a P1 sensor is charged up to: (1 - eps) * alpha * B.
    double p1_target_level(const SensorNode& node) const;

    friend bool operator==(const ProblemInstance&, const ProblemInstance&) = default;
};

// Throws ValidationError naming the first broken invariant.
void validate(const ProblemInstance& inst);

struct GenParams {
    double area_side = 1000.0;
    double battery = 10800.0;
    double sensing_radius = 135.0;
    double charger_speed = 5.0;
    double transfer_rate = 20.0;
    double travel_energy = 600.0;
    double energy_capacity = 300e3;
    double timespan = 1800.0;
    double alpha = 0.2;
    double epsilon = 0.1;
    int coverage_k = 2;
    double sensor_max_speed = 2.0;
    double beta_min = 1.0;  // W
    double beta_max = 10.0; // W
    double residual_min = 540.0;  // P3 lower bound (exclusive)
    double t0 = 0.0;
    double meet_dt = 1.0;
    int retry_budget = 2000;

    // Simulation settings per problem family at full field scale.
    static GenParams defaults(Variant v);
};

ProblemInstance generate_instance(Variant variant, int n, const GenParams& params, std::uint64_t seed);

// clamp(ceil(n^2 (B - B0) / B), 1, n^2)
int prize_of(const SensorNode& node, int n);

// Stationary nodes return their fixed position; mobile ones interpolate
// their trace and throw std::out_of_range outside the horizon.
Point position_at(const SensorNode& node, double t);

void write_instance(std::ostream& os, const ProblemInstance& inst);
ProblemInstance read_instance(std::istream& is);
void save_instance(const std::filesystem::path& path, const ProblemInstance& inst);
ProblemInstance load_instance(const std::filesystem::path& path);

}  // namespace wrsn
