#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "wrsn/instances.hpp"

namespace wrsn {

// Closed-disk sensing model: ||p_i - q|| <= r.
bool covers(const SensorNode& node, Point q);
int coverage_count(std::span<const SensorNode> nodes, Point q);

struct Subregion {
    Point representative;
    std::vector<int> covering_ids;  // ascending node ids
    int requesting_cover = 0;       // r(a_i)
    bool deficient = false;         // fewer than k sensors cover it even before any depletion

    int cover_count() const { return static_cast<int>(covering_ids.size()); }
    friend bool operator==(const Subregion&, const Subregion&) = default;
};

// Cells of the disk arrangement clipped to the field, with the per-cell
// minimum number of requesters that must be charged (T).
struct SubregionTable {
    int k = 0;
    std::vector<Subregion> subregions;  // ordered by covering_ids
    std::vector<int> T;
    std::vector<int> requester_ids;     // ascending

    std::size_t size() const { return subregions.size(); }
    bool all_zero() const;
    int deficit() const;  // sum of T
    bool has_deficient() const;
    // Subregion whose covering set equals the set of disks containing q.
    std::optional<std::size_t> locate(std::span<const SensorNode> nodes, Point q) const;
    // Whether charging `node_id` would decrease at least one entry.
    bool charging_helps(int node_id) const;

    friend bool operator==(const SubregionTable&, const SubregionTable&) = default;
};

struct ArrangementOptions {
    double grid_cell = 1.0;  // fallback raster spacing (m)
};

SubregionTable build_subregions(const ProblemInstance& inst, const ArrangementOptions& opt = {});
bool verify_k_coverage(const ProblemInstance& inst, const ArrangementOptions& opt = {});

// Decrements T[i] (floored at 0) once per charged requester whose disk
// contains subregion i. Non-requesters and repeated ids are ignored.
SubregionTable table_after_charging(const SubregionTable& table, std::span<const int> charged_ids);

// Minimum coverage count over the field for equal-radius disks; the same
// sample-point set as build_subregions.
int min_coverage(std::span<const Point> centers, double radius, const Rect& area, const ArrangementOptions& opt = {});

// subregion_id,cover_count,r_ai,T
void write_table_csv(std::ostream& os, const SubregionTable& table);

}  // namespace wrsn
