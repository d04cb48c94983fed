#include "vesselbez/encode.hpp"

namespace vesselbez {
namespace {

struct FittedPiece {
    CubicBezier curve;
    double rms = 0.0;
    bool fallback = false;
};

struct PolylineFit {
    std::vector<FittedPiece> pieces;
    bool discarded = false;
    int degenerate = 0;
};

// One [1 2 1] / 4 pass over interior points; the end points stay on their skeleton pixels.
std::vector<Point2> smooth_interior(const std::vector<Point2>& pts) {
    std::vector<Point2> out = pts;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        out[i] = 0.25 * (pts[i - 1] + pts[i + 1]) + 0.5 * pts[i];
    }
    return out;
}

PolylineFit fit_one(const Polyline& line) {
    PolylineFit out;
    if (line.points.size() < static_cast<std::size_t>(kMinPolylinePoints)) {
        out.discarded = true;
        return out;
    }
    std::vector<Point2> pts;
    pts.reserve(line.points.size());
    for (const auto& p : line.points) {
        pts.push_back(to_point(p));
    }
    pts = smooth_interior(pts);
    const auto chunks = chunk_polyline(pts.size());
    for (std::size_t k = 0; k < chunks.size(); ++k) {
        const auto [first, last] = chunks[k];
        const std::span<const Point2> chunk(pts.data() + first, static_cast<std::size_t>(last - first + 1));
        if (distance(chunk.front(), chunk.back()) <= 0.0) {
            ++out.degenerate;
            continue;
        }
        const auto t = chord_length_parameters(chunk);
        auto fit = fit_cubic_with_parameters(chunk, t);
        if (k > 0) {
            // Last point shared with the previous chunk.
            const int shared = chunks[k - 1].last - first;
            fit.curve = split_tail(fit.curve, t[static_cast<std::size_t>(shared)]);
            if (fit.curve.chord() < 1e-6) {
                ++out.degenerate;
                continue;
            }
        }
        out.pieces.push_back({fit.curve, fit.rms_residual, fit.fallback});
    }
    return out;
}

}  // namespace

BezierTree fit_polylines(const std::vector<Polyline>& polylines, const RadiusField& field, int width, int height,
                         EncodeDiagnostics* diagnostics) {
    std::vector<PolylineFit> fits(polylines.size());
    const auto n = static_cast<std::ptrdiff_t>(polylines.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        fits[static_cast<std::size_t>(i)] = fit_one(polylines[static_cast<std::size_t>(i)]);
    }

    BezierTree tree;
    tree.source_width = width;
    tree.source_height = height;
    EncodeDiagnostics diag;
    diag.polylines = static_cast<int>(polylines.size());
    double rms_sum = 0.0;
    int next_id = 1;
    for (const auto& f : fits) {
        diag.discarded_polylines += f.discarded ? 1 : 0;
        diag.degenerate_chunks += f.degenerate;
        for (const auto& piece : f.pieces) {
            Segment seg;
            seg.id = next_id++;
            seg.curve = piece.curve;
            seg.radius = mean_radius_along(piece.curve, field);
            tree.segments.push_back(seg);
            rms_sum += piece.rms;
            diag.fallback_fits += piece.fallback ? 1 : 0;
        }
    }
    diag.mean_rms_residual = tree.segments.empty() ? 0.0 : rms_sum / static_cast<double>(tree.segments.size());
    link_parents(tree);
    if (diagnostics) {
        *diagnostics = diag;
    }
    return tree;
}

Encoding encode_mask(const VesselMask& mask) {
    Encoding enc;
    enc.field = distance_transform(mask);
    enc.skeleton = skeletonize(mask);
    const auto polylines = extract_polylines(enc.skeleton);
    enc.tree = fit_polylines(polylines, enc.field, mask.width(), mask.height(), &enc.diagnostics);
    enc.diagnostics.branch_nodes = static_cast<int>(classify_nodes(enc.skeleton).branch_nodes.size());
    enc.diagnostics.junctions = count_junctions(enc.skeleton);
    return enc;
}

FeatureVector features_from_mask(const VesselMask& mask, const FeatureOptions& options) {
    const auto enc = encode_mask(mask);
    return compute_features(enc.tree, enc.field, mask, enc.diagnostics.junctions, options);
}

}  // namespace vesselbez
