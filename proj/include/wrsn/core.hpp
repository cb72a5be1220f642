#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wrsn {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline Point lerp(Point a, Point b, double f) { return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f}; }

// Axis-aligned field of interest.
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double diameter() const { return std::hypot(width(), height()); }
    Point center() const { return {(x0 + x1) / 2, (y0 + y1) / 2}; }
    bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }

    friend bool operator==(const Rect&, const Rect&) = default;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed instance/checkpoint/config text.
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally well-formed data that breaks a model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Random deployment could not reach the requested k-coverage.
class InfeasibleDeployment : public Error {
public:
    using Error::Error;
};

// A solver refused or aborted because of a size/memory guard.
class ResourceLimit : public Error {
public:
    using Error::Error;
};

// Training produced a non-finite loss.
class Divergence : public Error {
public:
    using Error::Error;
};

}  // namespace wrsn
