#pragma once

#include "vesselbez/bezier.hpp"
#include "vesselbez/mask.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vesselbez {

enum class Family { baseline, tortuosity, arc_drop, radius_scale, pixel_drop };

inline constexpr double kDefaultGamma = 0.15;

struct PerturbationConfig {
    Family family = Family::baseline;
    double strength = 0.0;  // alpha, drop fraction or radius factor; unused for baseline
    double gamma = kDefaultGamma;
    std::uint64_t seed = 0;

    /// Canonical name: baseline, tortuosity_4x, arc_drop_30, radius_x0.55, pixdrop_30, ...
    std::string name() const;
    bool operator==(const PerturbationConfig&) const = default;
};

std::string family_name(Family family);
/// Accepts family_name() spellings plus "radius" and "pixdrop".
Family parse_family(const std::string& name);

/// Inverse of PerturbationConfig::name(). Throws std::invalid_argument for unknown names.
PerturbationConfig config_from_name(const std::string& name, std::uint64_t seed = 0, double gamma = kDefaultGamma);

/// Throws for invalid strengths; returns a warning when the strength is valid but off the default grid.
std::optional<std::string> validate(const PerturbationConfig& config);

/// The 13 standard configurations: baseline, tortuosity x{1,2,4}, arc_drop {10,20,30}%,
/// radius x{0.85,0.70,0.55}, pixdrop {10,20,30}%.
std::vector<PerturbationConfig> standard_grid(std::uint64_t seed, double gamma = kDefaultGamma);

/// Per-segment sign in {-1, +1}, a pure function of (seed, segment id).
int tortuosity_sign(std::uint64_t seed, int segment_id);

/// Displaces P1 by +s*gamma*alpha*L*n and P2 by the negative of that, n the unit chord normal.
/// Segments with zero chord are passed through unchanged.
BezierTree perturb_tortuosity(const BezierTree& tree, double alpha, double gamma, std::uint64_t seed);

/// Removes exactly round(fraction * n) segments; survivors are untouched apart from parent links
/// to removed segments, which become kNoParent.
BezierTree arc_drop(const BezierTree& tree, double fraction, std::uint64_t seed);

RadiusField radius_scale(const RadiusField& field, double factor);

struct PerturbedInputs {
    BezierTree tree;
    RadiusField field;
    VesselMask mask;
};

/// Dispatches to the configured family. baseline returns the inputs unchanged; radius_scale also
/// rescales stored segment radii; pixel_drop degrades the mask and re-encodes it from scratch.
PerturbedInputs apply(const PerturbationConfig& config, const BezierTree& tree, const RadiusField& field,
                      const VesselMask& mask);

}  // namespace vesselbez
