#pragma once

#include "vesselbez/bezier.hpp"
#include "vesselbez/features.hpp"
#include "vesselbez/mask.hpp"
#include "vesselbez/skeleton.hpp"

namespace vesselbez {

struct EncodeDiagnostics {
    int polylines = 0;
    int discarded_polylines = 0;   // fewer than kMinPolylinePoints points
    int degenerate_chunks = 0;     // zero chord, dropped
    int fallback_fits = 0;         // singular normal equations
    double mean_rms_residual = 0.0;
    int branch_nodes = 0;          // raw degree >= 3 pixels
    int junctions = 0;             // clusters of branch pixels
};

struct Encoding {
    BezierTree tree;
    RadiusField field;
    Skeleton skeleton;
    EncodeDiagnostics diagnostics;
};

/// Fits every polyline piecewise into cubic segments (ids 1..n in polyline order). A chunk that
/// continues the previous chunk of the same polyline is fitted over its full overlap and then
/// trimmed at the last shared point, so consecutive pieces meet end to start and overlapped arc
/// is counted once. Fitting of distinct polylines runs under OpenMP.
BezierTree fit_polylines(const std::vector<Polyline>& polylines, const RadiusField& field, int width, int height,
                         EncodeDiagnostics* diagnostics = nullptr);

/// distance_transform -> skeletonize -> extract_polylines -> fit_polylines -> link_parents.
/// The mask is used at its own resolution; callers resample first when needed.
Encoding encode_mask(const VesselMask& mask);

/// encode_mask + compute_features with the junction count as branch count.
FeatureVector features_from_mask(const VesselMask& mask, const FeatureOptions& options = {});

}  // namespace vesselbez
