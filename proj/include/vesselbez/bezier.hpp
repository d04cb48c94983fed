#pragma once

#include "vesselbez/skeleton.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vesselbez {

/// 2D point in pixel units; x = column, y = row.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
    bool operator==(const Point2&) const = default;
};

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline Point2 to_point(Pixel p) { return {static_cast<double>(p.col), static_cast<double>(p.row)}; }

struct CubicBezier {
    std::array<Point2, 4> p{};

    double chord() const { return distance(p[3], p[0]); }
    bool operator==(const CubicBezier&) const = default;
};

/// Bernstein-form evaluation. Throws std::domain_error for t outside [0, 1].
Point2 eval(const CubicBezier& b, double t);
Point2 derivative(const CubicBezier& b, double t);
Point2 second_derivative(const CubicBezier& b, double t);

/// Composite 5-point Gauss-Legendre over 64 subintervals of |B'(t)|.
double arc_length(const CubicBezier& b);
/// Arc length over [t0, t1].
double arc_length(const CubicBezier& b, double t0, double t1);

/// Unsigned curvature; std::nullopt when |B'(t)| <= 1e-9.
std::optional<double> curvature(const CubicBezier& b, double t);

/// de Casteljau split at t; returns the [t, 1] piece.
CubicBezier split_tail(const CubicBezier& b, double t);

inline constexpr int kChunkSize = 30;
inline constexpr int kChunkOverlap = 4;
inline constexpr int kMinPolylinePoints = 5;

/// Inclusive index ranges [first, last] of the overlapping chunks.
struct ChunkRange {
    int first = 0;
    int last = 0;
    bool operator==(const ChunkRange&) const = default;
};

/// Chunks of kChunkSize points sharing kChunkOverlap points with their predecessor. A tail shorter
/// than kMinPolylinePoints is merged into the previous chunk. Throws for polylines under 5 points.
std::vector<ChunkRange> chunk_polyline(std::size_t n_points);

struct FitResult {
    CubicBezier curve;
    double rms_residual = 0.0;
    bool fallback = false;  // singular normal equations; chord interpolant used
};

/// Cumulative chord-length parameters normalised to [0, 1].
std::vector<double> chord_length_parameters(std::span<const Point2> points);

/// Least-squares cubic with P0/P3 clamped to the first/last point and the given parameters.
FitResult fit_cubic_with_parameters(std::span<const Point2> points, std::span<const double> t);

/// fit_cubic_with_parameters on chord-length parameters. Requires >= 5 points and a nonzero chord.
FitResult fit_cubic(std::span<const Point2> points);

inline constexpr int kNoParent = -1;

struct Segment {
    int id = 0;          // positive, unique within a tree
    int parent = kNoParent;
    CubicBezier curve;
    double radius = 0.0;  // mean local radius in px
    bool operator==(const Segment&) const = default;
};

struct BezierTree {
    std::vector<Segment> segments;
    int source_width = 0;
    int source_height = 0;
    std::string provenance;

    const Segment* find(int id) const;
    bool operator==(const BezierTree&) const = default;
};

inline constexpr double kLinkTolerance = 1.5;

/// Assigns parents by endpoint coincidence: a segment's P0 links to the nearest endpoint (P0 or P3)
/// of another segment within kLinkTolerance, ties to the lower id, skipping links that would close a cycle.
void link_parents(BezierTree& tree, double tolerance = kLinkTolerance);

/// True when parent links reference existing ids and contain no cycle.
bool parents_acyclic(const BezierTree& tree);

}  // namespace vesselbez
