#include "wrsn/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <unordered_map>

namespace wrsn {

bool covers(const SensorNode& node, Point q) {
    if (!node.sensing_radius) return false;
    return distance(node.position, q) <= *node.sensing_radius;
}

int coverage_count(std::span<const SensorNode> nodes, Point q) {
    int c = 0;
    for (const auto& n : nodes) c += covers(n, q) ? 1 : 0;
    return c;
}

namespace {

struct Circle {
    Point c;
    double r;
};

// Probe points closer than this to a circle boundary are dropped: their
// covering set depends on rounding.
constexpr double kBoundaryBand = 1e-9;

Point add(Point a, Point b, double s) { return {a.x + b.x * s, a.y + b.y * s}; }

Point unit(Point v) {
    const double len = std::hypot(v.x, v.y);
    return len > 0 ? Point{v.x / len, v.y / len} : Point{0, 0};
}

// Candidate interior points of every arrangement cell: probes around circle
// intersections, circle/edge intersections, centers, corners and arcs, plus
// a uniform raster. Raster points are reported separately because callers
// treat them in bulk.
std::vector<Point> probe_points(std::span<const Circle> circles, const Rect& area) {
    std::vector<Point> out;
    auto push = [&](Point p) {
        if (area.contains(p)) out.push_back(p);
    };
    auto wedge_probes = [&](Point p, Point t1, Point t2, double rho) {
        for (double a : {1.0, -1.0}) {
            for (double b : {1.0, -1.0}) {
                const Point d = unit({a * t1.x + b * t2.x, a * t1.y + b * t2.y});
                push(add(p, d, rho));
            }
        }
    };

    const std::size_t n = circles.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Circle& A = circles[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Circle& B = circles[j];
            const double d = distance(A.c, B.c);
            if (d <= 0 || d > A.r + B.r || d < std::abs(A.r - B.r)) continue;
            const double a = (A.r * A.r - B.r * B.r + d * d) / (2 * d);
            const double h = std::sqrt(std::max(0.0, A.r * A.r - a * a));
            const Point ex{(B.c.x - A.c.x) / d, (B.c.y - A.c.y) / d};
            const Point mid = add(A.c, ex, a);
            for (double sgn : {1.0, -1.0}) {
                const Point p{mid.x - ex.y * h * sgn, mid.y + ex.x * h * sgn};
                const Point ta = unit({-(p.y - A.c.y), p.x - A.c.x});
                const Point tb = unit({-(p.y - B.c.y), p.x - B.c.x});
                const double s = std::abs(ta.x * tb.y - ta.y * tb.x);
                const double rho = std::clamp(0.25 * std::min(A.r, B.r) * s, 1e-7, 1e-3);
                wedge_probes(p, ta, tb, rho);
                if (h == 0) break;
            }
        }
    }

    const Point corners[4] = {{area.x0, area.y0}, {area.x1, area.y0}, {area.x1, area.y1}, {area.x0, area.y1}};
    for (const Circle& C : circles) {
        for (int e = 0; e < 4; ++e) {
            const Point P = corners[e];
            const Point Q = corners[(e + 1) % 4];
            const Point dir = unit({Q.x - P.x, Q.y - P.y});
            const double len = distance(P, Q);
            // |P + s dir - c|^2 = r^2
            const Point w{P.x - C.c.x, P.y - C.c.y};
            const double bq = w.x * dir.x + w.y * dir.y;
            const double cq = w.x * w.x + w.y * w.y - C.r * C.r;
            const double disc = bq * bq - cq;
            if (disc < 0) continue;
            for (double sgn : {1.0, -1.0}) {
                const double s = -bq + sgn * std::sqrt(disc);
                if (s < 0 || s > len) continue;
                const Point p = add(P, dir, s);
                const Point t = unit({-(p.y - C.c.y), p.x - C.c.x});
                const double sn = std::abs(t.x * dir.y - t.y * dir.x);
                const double rho = std::clamp(0.25 * C.r * sn, 1e-7, 1e-3);
                wedge_probes(p, t, dir, rho);
            }
        }
        push(C.c);
        for (int q = 0; q < 4; ++q) {
            const double ang = 0.3 + q * std::numbers::pi / 2;
            const Point u{std::cos(ang), std::sin(ang)};
            push(add(C.c, u, C.r - 1e-3));
            push(add(C.c, u, C.r + 1e-3));
        }
    }
    const double inset = 1e-3;
    push({area.x0 + inset, area.y0 + inset});
    push({area.x1 - inset, area.y0 + inset});
    push({area.x1 - inset, area.y1 - inset});
    push({area.x0 + inset, area.y1 - inset});
    return out;
}

struct Raster {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double cell = 1.0;
    Rect area;

    Raster(const Rect& a, double c) : cell(c), area(a) {
        nx = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(a.width() / c)));
        ny = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(a.height() / c)));
    }
    std::size_t count() const { return nx * ny; }
    Point at(std::size_t ix, std::size_t iy) const {
        return {std::min(area.x0 + (ix + 0.5) * cell, area.x1), std::min(area.y0 + (iy + 0.5) * cell, area.y1)};
    }

    // Calls f(cell_index, point) for raster points inside the disk.
    template <class F>
    void for_each_in(const Circle& C, F&& f) const {
        const auto lo = [&](double v, double o) {
            return static_cast<long>(std::floor((v - o) / cell - 0.5));
        };
        const long ix0 = std::max(0L, lo(C.c.x - C.r, area.x0));
        const long ix1 = std::min(static_cast<long>(nx) - 1, lo(C.c.x + C.r, area.x0) + 1);
        const long iy0 = std::max(0L, lo(C.c.y - C.r, area.y0));
        const long iy1 = std::min(static_cast<long>(ny) - 1, lo(C.c.y + C.r, area.y0) + 1);
        for (long iy = iy0; iy <= iy1; ++iy) {
            for (long ix = ix0; ix <= ix1; ++ix) {
                const Point p = at(ix, iy);
                if (distance(p, C.c) <= C.r) f(static_cast<std::size_t>(iy) * nx + ix, p);
            }
        }
    }
};

bool near_boundary(std::span<const Circle> circles, Point p) {
    for (const auto& C : circles) {
        if (std::abs(distance(p, C.c) - C.r) < kBoundaryBand) return true;
    }
    return false;
}

struct WordsHash {
    std::size_t operator()(const std::vector<std::uint64_t>& w) const {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (auto x : w) {
            h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace

bool SubregionTable::all_zero() const {
    return std::all_of(T.begin(), T.end(), [](int t) { return t == 0; });
}

int SubregionTable::deficit() const {
    int s = 0;
    for (int t : T) s += t;
    return s;
}

bool SubregionTable::has_deficient() const {
    return std::any_of(subregions.begin(), subregions.end(), [](const Subregion& s) { return s.deficient; });
}

std::optional<std::size_t> SubregionTable::locate(std::span<const SensorNode> nodes, Point q) const {
    std::vector<int> sig;
    for (const auto& n : nodes) {
        if (covers(n, q)) sig.push_back(n.id);
    }
    std::sort(sig.begin(), sig.end());
    auto it = std::lower_bound(subregions.begin(), subregions.end(), sig,
                               [](const Subregion& s, const std::vector<int>& v) { return s.covering_ids < v; });
    if (it == subregions.end() || it->covering_ids != sig) return std::nullopt;
    return static_cast<std::size_t>(it - subregions.begin());
}

bool SubregionTable::charging_helps(int node_id) const {
    if (!std::binary_search(requester_ids.begin(), requester_ids.end(), node_id)) return false;
    for (std::size_t i = 0; i < subregions.size(); ++i) {
        if (T[i] > 0 && std::binary_search(subregions[i].covering_ids.begin(), subregions[i].covering_ids.end(), node_id))
            return true;
    }
    return false;
}

SubregionTable build_subregions(const ProblemInstance& inst, const ArrangementOptions& opt) {
    // Work in id order so the output does not depend on node ordering.
    std::vector<const SensorNode*> sorted;
    for (const auto& n : inst.nodes) {
        if (n.sensing_radius) sorted.push_back(&n);
    }
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
    std::vector<Circle> circles;
    for (auto* n : sorted) circles.push_back({n->position, *n->sensing_radius});
    const std::size_t words = std::max<std::size_t>(1, (circles.size() + 63) / 64);

    std::unordered_map<std::vector<std::uint64_t>, Point, WordsHash> seen;
    std::vector<std::uint64_t> sig(words);
    auto signature_of = [&](Point p) {
        std::fill(sig.begin(), sig.end(), 0);
        for (std::size_t i = 0; i < circles.size(); ++i) {
            if (distance(p, circles[i].c) <= circles[i].r) sig[i / 64] |= 1ULL << (i % 64);
        }
    };

    for (Point p : probe_points(circles, inst.area)) {
        if (near_boundary(circles, p)) continue;
        signature_of(p);
        seen.try_emplace(sig, p);
    }

    Raster raster(inst.area, opt.grid_cell);
    std::vector<std::uint64_t> cells(raster.count() * words, 0);
    for (std::size_t i = 0; i < circles.size(); ++i) {
        raster.for_each_in(circles[i], [&](std::size_t idx, Point) { cells[idx * words + i / 64] |= 1ULL << (i % 64); });
    }
    for (std::size_t iy = 0; iy < raster.ny; ++iy) {
        for (std::size_t ix = 0; ix < raster.nx; ++ix) {
            const std::size_t idx = iy * raster.nx + ix;
            std::copy(cells.begin() + idx * words, cells.begin() + (idx + 1) * words, sig.begin());
            if (seen.count(sig)) continue;
            const Point p = raster.at(ix, iy);
            if (near_boundary(circles, p)) continue;
            seen.emplace(sig, p);
        }
    }

    SubregionTable table;
    table.k = inst.coverage_k;
    for (auto* n : sorted) {
        if (inst.is_requester(*n)) table.requester_ids.push_back(n->id);
    }
    for (const auto& [words_sig, rep] : seen) {
        Subregion s;
        s.representative = rep;
        for (std::size_t i = 0; i < circles.size(); ++i) {
            if (words_sig[i / 64] >> (i % 64) & 1ULL) {
                s.covering_ids.push_back(sorted[i]->id);
                if (inst.is_requester(*sorted[i])) ++s.requesting_cover;
            }
        }
        table.subregions.push_back(std::move(s));
    }
    std::sort(table.subregions.begin(), table.subregions.end(),
              [](const Subregion& a, const Subregion& b) { return a.covering_ids < b.covering_ids; });
    for (auto& s : table.subregions) {
        const int cover = s.cover_count();
        s.deficient = cover < table.k;
        if (s.deficient) {
            // Charging cannot reach k here; every covering requester is needed.
            table.T.push_back(s.requesting_cover);
        } else {
            table.T.push_back(std::max(0, table.k - (cover - s.requesting_cover)));
        }
    }
    return table;
}

bool verify_k_coverage(const ProblemInstance& inst, const ArrangementOptions& opt) {
    const auto table = build_subregions(inst, opt);
    return !table.has_deficient();
}

SubregionTable table_after_charging(const SubregionTable& table, std::span<const int> charged_ids) {
    std::vector<int> charged(charged_ids.begin(), charged_ids.end());
    std::sort(charged.begin(), charged.end());
    charged.erase(std::unique(charged.begin(), charged.end()), charged.end());
    SubregionTable out = table;
    for (int id : charged) {
        if (!std::binary_search(table.requester_ids.begin(), table.requester_ids.end(), id)) continue;
        for (std::size_t i = 0; i < out.subregions.size(); ++i) {
            const auto& cov = out.subregions[i].covering_ids;
            if (out.T[i] > 0 && std::binary_search(cov.begin(), cov.end(), id)) --out.T[i];
        }
    }
    return out;
}

int min_coverage(std::span<const Point> centers, double radius, const Rect& area, const ArrangementOptions& opt) {
    std::vector<Circle> circles;
    for (Point c : centers) circles.push_back({c, radius});
    auto count_at = [&](Point p) {
        int c = 0;
        for (const auto& C : circles) c += distance(p, C.c) <= C.r ? 1 : 0;
        return c;
    };
    int best = static_cast<int>(circles.size());
    for (Point p : probe_points(circles, area)) {
        if (near_boundary(circles, p)) continue;
        best = std::min(best, count_at(p));
        if (best == 0) return 0;
    }
    Raster raster(area, opt.grid_cell);
    std::vector<std::uint16_t> counts(raster.count(), 0);
    for (const auto& C : circles) raster.for_each_in(C, [&](std::size_t idx, Point) { ++counts[idx]; });
    for (std::size_t idx = 0; idx < counts.size(); ++idx) {
        if (counts[idx] < best) {
            const Point p = raster.at(idx % raster.nx, idx / raster.nx);
            if (!near_boundary(circles, p)) best = counts[idx];
        }
    }
    return best;
}

void write_table_csv(std::ostream& os, const SubregionTable& table) {
    os << "subregion_id,cover_count,r_ai,T\n";
    for (std::size_t i = 0; i < table.subregions.size(); ++i) {
        const auto& s = table.subregions[i];
        os << i << ',' << s.cover_count() << ',' << s.requesting_cover << ',' << table.T[i] << '\n';
    }
}

}  // namespace wrsn
