#include "vesselbez/bezier.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace vesselbez {
namespace {

constexpr std::array<double, 5> kGlNodes = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                            0.9061798459386640};
constexpr std::array<double, 5> kGlWeights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                              0.4786286704993665, 0.2369268850561891};
constexpr int kGlIntervals = 64;

std::array<double, 4> bernstein(double t) {
    const double u = 1.0 - t;
    return {u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t};
}

}  // namespace

Point2 eval(const CubicBezier& b, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw std::domain_error("bezier parameter outside [0, 1]");
    }
    if (t == 0.0) {
        return b.p[0];
    }
    if (t == 1.0) {
        return b.p[3];
    }
    const auto w = bernstein(t);
    return w[0] * b.p[0] + w[1] * b.p[1] + w[2] * b.p[2] + w[3] * b.p[3];
}

Point2 derivative(const CubicBezier& b, double t) {
    const double u = 1.0 - t;
    return 3.0 * u * u * (b.p[1] - b.p[0]) + 6.0 * u * t * (b.p[2] - b.p[1]) + 3.0 * t * t * (b.p[3] - b.p[2]);
}

Point2 second_derivative(const CubicBezier& b, double t) {
    const double u = 1.0 - t;
    return 6.0 * u * (b.p[2] - 2.0 * b.p[1] + b.p[0]) + 6.0 * t * (b.p[3] - 2.0 * b.p[2] + b.p[1]);
}

double arc_length(const CubicBezier& b, double t0, double t1) {
    const double h = (t1 - t0) / kGlIntervals;
    double total = 0.0;
    for (int i = 0; i < kGlIntervals; ++i) {
        const double mid = t0 + (i + 0.5) * h;
        double sub = 0.0;
        for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
            sub += kGlWeights[k] * norm(derivative(b, mid + 0.5 * h * kGlNodes[k]));
        }
        total += 0.5 * h * sub;
    }
    return total;
}

double arc_length(const CubicBezier& b) { return arc_length(b, 0.0, 1.0); }

std::optional<double> curvature(const CubicBezier& b, double t) {
    const auto d1 = derivative(b, t);
    const double speed = norm(d1);
    if (speed <= 1e-9) {
        return std::nullopt;
    }
    const auto d2 = second_derivative(b, t);
    return std::abs(d1.x * d2.y - d1.y * d2.x) / (speed * speed * speed);
}

CubicBezier split_tail(const CubicBezier& b, double t) {
    const auto lerp = [t](Point2 a, Point2 c) { return a + t * (c - a); };
    const Point2 a01 = lerp(b.p[0], b.p[1]);
    const Point2 a12 = lerp(b.p[1], b.p[2]);
    const Point2 a23 = lerp(b.p[2], b.p[3]);
    const Point2 b012 = lerp(a01, a12);
    const Point2 b123 = lerp(a12, a23);
    const Point2 mid = lerp(b012, b123);
    return CubicBezier{{mid, b123, a23, b.p[3]}};
}

std::vector<ChunkRange> chunk_polyline(std::size_t n_points) {
    if (n_points < static_cast<std::size_t>(kMinPolylinePoints)) {
        throw std::invalid_argument("polyline too short to chunk (" + std::to_string(n_points) + " points)");
    }
    const int n = static_cast<int>(n_points);
    constexpr int stride = kChunkSize - kChunkOverlap;
    std::vector<ChunkRange> chunks;
    int first = 0;
    while (true) {
        const int last = first + kChunkSize - 1;
        if (last >= n - 1) {
            chunks.push_back({first, n - 1});
            break;
        }
        const int next = first + stride;
        if (n - next < kMinPolylinePoints) {
            chunks.push_back({first, n - 1});
            break;
        }
        chunks.push_back({first, last});
        first = next;
    }
    return chunks;
}

std::vector<double> chord_length_parameters(std::span<const Point2> points) {
    std::vector<double> t(points.size(), 0.0);
    for (std::size_t i = 1; i < points.size(); ++i) {
        t[i] = t[i - 1] + distance(points[i], points[i - 1]);
    }
    const double total = t.empty() ? 0.0 : t.back();
    if (total > 0.0) {
        for (auto& v : t) {
            v /= total;
        }
        t.back() = 1.0;
    }
    return t;
}

FitResult fit_cubic_with_parameters(std::span<const Point2> points, std::span<const double> t) {
    if (points.size() != t.size()) {
        throw std::invalid_argument("point and parameter counts differ");
    }
    if (points.size() < 2) {
        throw std::invalid_argument("need at least two points to fit");
    }
    FitResult out;
    const Point2 p0 = points.front();
    const Point2 p3 = points.back();
    double a11 = 0.0, a12 = 0.0, a22 = 0.0;
    Point2 r1, r2;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto w = bernstein(t[i]);
        const Point2 rhs = points[i] - w[0] * p0 - w[3] * p3;
        a11 += w[1] * w[1];
        a12 += w[1] * w[2];
        a22 += w[2] * w[2];
        r1 = r1 + w[1] * rhs;
        r2 = r2 + w[2] * rhs;
    }
    const double det = a11 * a22 - a12 * a12;
    if (std::abs(det) <= 1e-12 * std::max(1.0, a11 * a22)) {
        out.fallback = true;
        out.curve = CubicBezier{{p0, p0 + (1.0 / 3.0) * (p3 - p0), p0 + (2.0 / 3.0) * (p3 - p0), p3}};
    } else {
        const Point2 p1 = (1.0 / det) * (a22 * r1 - a12 * r2);
        const Point2 p2 = (1.0 / det) * (a11 * r2 - a12 * r1);
        out.curve = CubicBezier{{p0, p1, p2, p3}};
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point2 d = eval(out.curve, std::clamp(t[i], 0.0, 1.0)) - points[i];
        sq += d.x * d.x + d.y * d.y;
    }
    out.rms_residual = std::sqrt(sq / static_cast<double>(points.size()));
    return out;
}

FitResult fit_cubic(std::span<const Point2> points) {
    if (points.size() < static_cast<std::size_t>(kMinPolylinePoints)) {
        throw std::invalid_argument("fit_cubic needs at least 5 points");
    }
    if (distance(points.front(), points.back()) <= 0.0) {
        throw std::invalid_argument("fit_cubic: zero chord");
    }
    const auto t = chord_length_parameters(points);
    return fit_cubic_with_parameters(points, t);
}

const Segment* BezierTree::find(int id) const {
    for (const auto& s : segments) {
        if (s.id == id) {
            return &s;
        }
    }
    return nullptr;
}

bool parents_acyclic(const BezierTree& tree) {
    std::map<int, int> parent;
    for (const auto& s : tree.segments) {
        parent[s.id] = s.parent;
    }
    for (const auto& [id, p] : parent) {
        if (p != kNoParent && !parent.contains(p)) {
            return false;
        }
    }
    for (const auto& [id, p0] : parent) {
        int steps = 0;
        int cur = p0;
        while (cur != kNoParent) {
            if (cur == id || ++steps > static_cast<int>(parent.size())) {
                return false;
            }
            cur = parent[cur];
        }
    }
    return true;
}

void link_parents(BezierTree& tree, double tolerance) {
    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < tree.segments.size(); ++i) {
        tree.segments[i].parent = kNoParent;
        index[tree.segments[i].id] = i;
    }
    auto creates_cycle = [&](int child, int candidate) {
        int cur = candidate;
        std::size_t steps = 0;
        while (cur != kNoParent && steps++ <= tree.segments.size()) {
            if (cur == child) {
                return true;
            }
            cur = tree.segments[index[cur]].parent;
        }
        return false;
    };
    // Segments are linked in ascending id order so that the outcome is independent of storage order.
    std::vector<std::size_t> order(tree.segments.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return tree.segments[a].id < tree.segments[b].id; });
    for (const auto ci : order) {
        auto& child = tree.segments[ci];
        const Point2 start = child.curve.p[0];
        std::vector<std::pair<double, int>> candidates;
        for (const auto oi : order) {
            if (oi == ci) {
                continue;
            }
            const auto& other = tree.segments[oi];
            const double d = std::min(distance(start, other.curve.p[0]), distance(start, other.curve.p[3]));
            if (d <= tolerance) {
                candidates.emplace_back(d, other.id);
            }
        }
        std::sort(candidates.begin(), candidates.end());
        for (const auto& [d, id] : candidates) {
            if (!creates_cycle(child.id, id)) {
                child.parent = id;
                break;
            }
        }
    }
}

}  // namespace vesselbez
