#pragma once

#include "vesselbez/bezier.hpp"
#include "vesselbez/mask.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vesselbez {

inline constexpr int kFeatureCount = 20;

/// Column order of the features CSV. Frozen.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "total_arc_length",  "n_segments",     "mean_segment_length", "std_segment_length", "mean_chord_length",
    "std_chord_length",  "mean_tortuosity", "std_tortuosity",     "max_tortuosity",     "mean_curvature",
    "std_curvature",     "max_curvature",  "mean_radius",         "std_radius",         "min_radius",
    "max_radius",        "radius_cv",      "thick_vessel_ratio",  "branching_density",  "coverage_ratio",
};

struct FeatureVector {
    std::array<double, kFeatureCount> values{};

    double& operator[](std::string_view name);
    double operator[](std::string_view name) const;
    bool operator==(const FeatureVector&) const = default;
};

std::optional<std::size_t> feature_index(std::string_view name);

inline constexpr int kCurvatureSamples = 50;
inline constexpr int kRadiusSamples = 20;
inline constexpr double kDefaultThickThreshold = 3.0;

struct SegmentMetrics {
    double arc = 0.0;
    double chord = 0.0;
    double tortuosity = 1.0;
    double mean_curvature = 0.0;
    int curvature_samples_dropped = 0;  // samples with vanishing derivative
    double mean_radius = 0.0;
    std::array<double, kRadiusSamples> radius_samples{};
};

/// Field value at the pixel nearest to p (clamped to the canvas).
double field_at(const RadiusField& field, Point2 p);

/// Mean of field_at over `samples` uniformly spaced t in [0, 1].
double mean_radius_along(const CubicBezier& curve, const RadiusField& field, int samples = kRadiusSamples);

/// std::nullopt when the chord is below 1e-6 (segment excluded from aggregates).
std::optional<SegmentMetrics> segment_metrics(const CubicBezier& curve, const RadiusField& field);

struct FeatureDiagnostics {
    int excluded_segments = 0;
    int dropped_curvature_samples = 0;
};

struct FeatureOptions {
    double thick_threshold = kDefaultThickThreshold;
};

/// Aggregates per-segment metrics into the 20 features. Throws std::invalid_argument for an
/// empty tree (or a tree whose every segment is degenerate).
FeatureVector compute_features(const BezierTree& tree, const RadiusField& field, const VesselMask& mask,
                               int branch_count, const FeatureOptions& options = {},
                               FeatureDiagnostics* diagnostics = nullptr);

struct FeatureRow {
    std::string image_id;
    FeatureVector features;
    int label = 0;
};

class FeatureCsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Header "image_id,<20 names>,label". Rejects duplicate ids and non-finite values.
void write_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows,
                        const std::vector<std::string>& comments = {});
void write_features_csv(const std::filesystem::path& path, const std::vector<FeatureRow>& rows,
                        const std::vector<std::string>& comments = {});
std::vector<FeatureRow> read_features_csv(std::istream& in);
std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path);

}  // namespace vesselbez
