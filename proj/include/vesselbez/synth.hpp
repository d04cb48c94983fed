#pragma once

#include "vesselbez/bezier.hpp"
#include "vesselbez/features.hpp"
#include "vesselbez/mask.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace vesselbez {

class SynthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SynthSpec {
    std::uint64_t seed = 1;
    int n_branches = 2;  // children per internal node
    int depth = 3;       // levels below the root segment
    double root_radius = 2.0;
    double radius_decay = 0.8;
    int canvas = kWorkingResolution;
    double root_length = 110.0;  // px at a 512 canvas, scaled with the canvas
    double length_decay = 0.72;
    double bend = 0.08;           // max perpendicular control-point offset, fraction of length
    bool enforce_separation = true;
};

/// Throws SynthError for non-positive fields or depth > 8.
void validate(const SynthSpec& spec);

struct SegmentTruth {
    int id = 0;
    double arc = 0.0;
    double chord = 0.0;
    double tortuosity = 1.0;
    double radius = 0.0;
};

struct GroundTruth {
    std::vector<SegmentTruth> segments;
    int branch_count = 0;  // internal nodes
    double total_arc_length = 0.0;
    double mean_tortuosity = 1.0;
};

inline constexpr int kGroundTruthSamples = 100000;

/// Polyline arc length with kGroundTruthSamples chords.
double reference_arc_length(const CubicBezier& curve, int samples = kGroundTruthSamples);

struct SynthTree {
    BezierTree tree;
    GroundTruth truth;
};

/// Recursive branching tree of cubic segments. Segment radii follow root_radius * decay^level.
/// Throws SynthError when no placement fits the canvas.
SynthTree generate_tree(const SynthSpec& spec);

/// Disks of each segment's radius stamped every <= 0.5 px along the curve; the nearest pixel of
/// every sample is always set. Throws SynthError for geometry outside the canvas.
VesselMask rasterize_tree(const BezierTree& tree, int width, int height);
VesselMask rasterize_tree(const BezierTree& tree, int width, int height, const std::vector<double>& radius_profile);

struct RoundtripReport {
    FeatureVector recovered;
    GroundTruth truth;
    int recovered_branch_count = 0;
    double arc_rel_error = 0.0;
    double tortuosity_rel_error = 0.0;
    double radius_rel_error = 0.0;
};

RoundtripReport roundtrip_report(const SynthSpec& spec);

void write_ground_truth_csv(std::ostream& out, const GroundTruth& truth);
void write_roundtrip_report(std::ostream& out, const RoundtripReport& report);

}  // namespace vesselbez
