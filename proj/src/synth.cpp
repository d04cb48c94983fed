#include "vesselbez/synth.hpp"

#include "vesselbez/encode.hpp"
#include "vesselbez/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace vesselbez {
namespace {

constexpr int kPlacementSamples = 64;
constexpr int kSegmentAttempts = 60;
constexpr int kTreeAttempts = 200;

struct Placed {
    std::vector<Point2> samples;
    double radius = 0.0;
};

Point2 rotate(Point2 v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Point2 unit(Point2 v) {
    const double n = norm(v);
    return {v.x / n, v.y / n};
}

struct Builder {
    const SynthSpec& spec;
    CounterRng rng;
    double scale;
    double margin;
    std::vector<Segment> segments;
    std::vector<Placed> placed;

    Builder(const SynthSpec& s, std::uint64_t attempt)
        : spec(s),
          rng(s.seed ^ mix64(attempt), RngStream::synth),
          scale(s.canvas / static_cast<double>(kWorkingResolution)),
          margin(s.root_radius * scale + 4.0) {}

    double radius_at(int level) const { return spec.root_radius * scale * std::pow(spec.radius_decay, level); }

    CubicBezier make_curve(Point2 start, Point2 dir, double length) {
        const Point2 n{-dir.y, dir.x};
        const double b1 = rng.uniform(-spec.bend, spec.bend) * length;
        const double b2 = rng.uniform(-spec.bend, spec.bend) * length;
        return {{start, start + (length / 3.0) * dir + b1 * n, start + (2.0 * length / 3.0) * dir + b2 * n,
                 start + length * dir}};
    }

    bool inside(const std::vector<Point2>& pts) const {
        return std::all_of(pts.begin(), pts.end(), [&](Point2 p) {
            return p.x >= margin && p.y >= margin && p.x <= spec.canvas - 1 - margin &&
                   p.y <= spec.canvas - 1 - margin;
        });
    }

    bool separated(const std::vector<Point2>& pts, double radius) const {
        if (!spec.enforce_separation) {
            return true;
        }
        const Point2 start = pts.front();
        for (const auto& other : placed) {
            const double gap = radius + other.radius + 6.0;
            const double skip = 3.0 * gap + 4.0;
            for (Point2 p : pts) {
                if (distance(p, start) < skip) {
                    continue;
                }
                for (Point2 q : other.samples) {
                    if (distance(p, q) < gap) {
                        return false;
                    }
                }
            }
        }
        return true;
    }

    bool grow(int parent, Point2 start, Point2 dir, double length, int level) {
        const double radius = radius_at(level);
        CubicBezier curve;
        std::vector<Point2> pts(kPlacementSamples + 1);
        bool ok = false;
        for (int attempt = 0; attempt < kSegmentAttempts && !ok; ++attempt) {
            curve = make_curve(start, dir, length);
            for (int i = 0; i <= kPlacementSamples; ++i) {
                pts[i] = eval(curve, static_cast<double>(i) / kPlacementSamples);
            }
            ok = inside(pts) && separated(pts, radius);
        }
        if (!ok) {
            return false;
        }
        const int id = static_cast<int>(segments.size()) + 1;
        segments.push_back({id, parent, curve, radius});
        placed.push_back({pts, radius});
        if (level == spec.depth) {
            return true;
        }
        const Point2 end_dir = unit(curve.p[3] - curve.p[2]);
        const double child_length = length * spec.length_decay;
        const double deg = std::numbers::pi / 180.0;
        for (int k = 0; k < spec.n_branches; ++k) {
            double angle = rng.uniform(20.0, 50.0) * deg;
            if (spec.n_branches == 1) {
                angle *= rng.uniform() < 0.5 ? -1.0 : 1.0;
            } else {
                // Children fan out symmetrically; with two children one goes each side.
                const double side = -1.0 + 2.0 * k / (spec.n_branches - 1);
                angle = side == 0.0 ? 0.0 : std::copysign(angle * std::abs(side), side);
            }
            if (!grow(id, curve.p[3], unit(rotate(end_dir, angle)), child_length, level + 1)) {
                return false;
            }
        }
        return true;
    }
};

void stamp_disk(VesselMask& mask, Point2 c, double radius) {
    const int r0 = static_cast<int>(std::floor(c.y - radius));
    const int r1 = static_cast<int>(std::ceil(c.y + radius));
    const int c0 = static_cast<int>(std::floor(c.x - radius));
    const int c1 = static_cast<int>(std::ceil(c.x + radius));
    const double r2 = radius * radius + 1e-9;
    for (int r = r0; r <= r1; ++r) {
        for (int col = c0; col <= c1; ++col) {
            const double dx = col - c.x;
            const double dy = r - c.y;
            if (dx * dx + dy * dy <= r2 && mask.contains(r, col)) {
                mask.set(r, col, true);
            }
        }
    }
    const int nr = static_cast<int>(std::lround(c.y));
    const int nc = static_cast<int>(std::lround(c.x));
    if (mask.contains(nr, nc)) {
        mask.set(nr, nc, true);
    }
}

double rel_error(double got, double want) { return want == 0.0 ? std::abs(got) : std::abs(got - want) / want; }

}  // namespace

void validate(const SynthSpec& spec) {
    if (spec.n_branches <= 0 || spec.depth < 0 || !(spec.root_radius > 0.0) || !(spec.radius_decay > 0.0) ||
        spec.canvas <= 0 || !(spec.root_length > 0.0) || !(spec.length_decay > 0.0) || spec.bend < 0.0) {
        throw SynthError("synthetic spec fields must be positive");
    }
    if (spec.depth > 8) {
        throw SynthError("synthetic depth must be <= 8");
    }
}

double reference_arc_length(const CubicBezier& curve, int samples) {
    double total = 0.0;
    Point2 prev = curve.p[0];
    for (int i = 1; i <= samples; ++i) {
        const Point2 cur = eval(curve, static_cast<double>(i) / samples);
        total += distance(prev, cur);
        prev = cur;
    }
    return total;
}

SynthTree generate_tree(const SynthSpec& spec) {
    validate(spec);
    const double scale = spec.canvas / static_cast<double>(kWorkingResolution);
    const Point2 root{0.5 * (spec.canvas - 1), 0.94 * (spec.canvas - 1)};
    for (int attempt = 0; attempt < kTreeAttempts; ++attempt) {
        Builder b(spec, static_cast<std::uint64_t>(attempt));
        if (!b.grow(kNoParent, root, {0.0, -1.0}, spec.root_length * scale, 0)) {
            continue;
        }
        SynthTree out;
        out.tree.segments = std::move(b.segments);
        out.tree.source_width = spec.canvas;
        out.tree.source_height = spec.canvas;
        std::vector<int> children(out.tree.segments.size() + 1, 0);
        double tort_sum = 0.0;
        for (const auto& s : out.tree.segments) {
            if (s.parent != kNoParent) {
                ++children[s.parent];
            }
            SegmentTruth t;
            t.id = s.id;
            t.arc = reference_arc_length(s.curve);
            t.chord = s.curve.chord();
            t.tortuosity = std::max(1.0, t.arc / t.chord);
            t.radius = s.radius;
            out.truth.total_arc_length += t.arc;
            tort_sum += t.tortuosity;
            out.truth.segments.push_back(t);
        }
        out.truth.branch_count =
            static_cast<int>(std::count_if(children.begin(), children.end(), [](int c) { return c > 0; }));
        out.truth.mean_tortuosity = tort_sum / static_cast<double>(out.tree.segments.size());
        return out;
    }
    throw SynthError("synthetic tree does not fit the canvas");
}

VesselMask rasterize_tree(const BezierTree& tree, int width, int height) {
    std::vector<double> radii;
    radii.reserve(tree.segments.size());
    for (const auto& s : tree.segments) {
        radii.push_back(s.radius);
    }
    return rasterize_tree(tree, width, height, radii);
}

VesselMask rasterize_tree(const BezierTree& tree, int width, int height, const std::vector<double>& radius_profile) {
    if (radius_profile.size() != tree.segments.size()) {
        throw SynthError("radius profile needs one value per segment");
    }
    VesselMask mask(width, height);
    for (std::size_t i = 0; i < tree.segments.size(); ++i) {
        const auto& curve = tree.segments[i].curve;
        const double radius = radius_profile[i];
        if (radius < 0.0) {
            throw SynthError("negative stamp radius");
        }
        // Control polygon length bounds the arc, so this keeps the step at or below 0.5 px.
        const double bound = distance(curve.p[0], curve.p[1]) + distance(curve.p[1], curve.p[2]) +
                             distance(curve.p[2], curve.p[3]);
        const int steps = std::max(1, static_cast<int>(std::ceil(bound / 0.5)));
        for (int k = 0; k <= steps; ++k) {
            const Point2 c = eval(curve, static_cast<double>(k) / steps);
            if (c.x < -0.5 || c.y < -0.5 || c.x > width - 0.5 || c.y > height - 0.5) {
                throw SynthError("segment " + std::to_string(tree.segments[i].id) + " leaves the canvas");
            }
            stamp_disk(mask, c, radius);
        }
    }
    return mask;
}

RoundtripReport roundtrip_report(const SynthSpec& spec) {
    const auto synth = generate_tree(spec);
    const auto mask = rasterize_tree(synth.tree, spec.canvas, spec.canvas);
    const auto enc = encode_mask(mask);
    RoundtripReport rep;
    rep.truth = synth.truth;
    rep.recovered = compute_features(enc.tree, enc.field, mask, enc.diagnostics.junctions);
    rep.recovered_branch_count = enc.diagnostics.junctions;
    rep.arc_rel_error = rel_error(rep.recovered["total_arc_length"], synth.truth.total_arc_length);
    rep.tortuosity_rel_error = rel_error(rep.recovered["mean_tortuosity"], synth.truth.mean_tortuosity);
    double rsum = 0.0;
    for (const auto& s : synth.truth.segments) {
        rsum += s.radius;
    }
    rep.radius_rel_error = rel_error(rep.recovered["mean_radius"], rsum / synth.truth.segments.size());
    return rep;
}

void write_ground_truth_csv(std::ostream& out, const GroundTruth& truth) {
    char buf[160];
    out << "# branch_count " << truth.branch_count << '\n';
    out << "segment_id,arc_length,chord_length,tortuosity,radius\n";
    for (const auto& s : truth.segments) {
        std::snprintf(buf, sizeof(buf), "%d,%.9f,%.9f,%.9f,%.6f\n", s.id, s.arc, s.chord, s.tortuosity, s.radius);
        out << buf;
    }
}

void write_roundtrip_report(std::ostream& out, const RoundtripReport& report) {
    char buf[200];
    out << "quantity,truth,recovered,relative_error\n";
    std::snprintf(buf, sizeof(buf), "total_arc_length,%.6f,%.6f,%.6f\n", report.truth.total_arc_length,
                  report.recovered["total_arc_length"], report.arc_rel_error);
    out << buf;
    std::snprintf(buf, sizeof(buf), "mean_tortuosity,%.6f,%.6f,%.6f\n", report.truth.mean_tortuosity,
                  report.recovered["mean_tortuosity"], report.tortuosity_rel_error);
    out << buf;
    double rsum = 0.0;
    for (const auto& s : report.truth.segments) {
        rsum += s.radius;
    }
    std::snprintf(buf, sizeof(buf), "mean_radius,%.6f,%.6f,%.6f\n", rsum / report.truth.segments.size(),
                  report.recovered["mean_radius"], report.radius_rel_error);
    out << buf;
    std::snprintf(buf, sizeof(buf), "branch_count,%d,%d,%d\n", report.truth.branch_count,
                  report.recovered_branch_count, report.recovered_branch_count - report.truth.branch_count);
    out << buf;
}

}  // namespace vesselbez
