#include "vesselbez/perturb.hpp"

#include "vesselbez/encode.hpp"
#include "vesselbez/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace vesselbez {
namespace {

constexpr std::array<double, 3> kAlphaGrid = {1.0, 2.0, 4.0};
constexpr std::array<double, 3> kDropGrid = {0.10, 0.20, 0.30};
constexpr std::array<double, 3> kRadiusGrid = {0.85, 0.70, 0.55};

std::string compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string percent(double fraction) { return compact(std::round(fraction * 1e6) / 1e4); }

std::string radius_label(double factor) {
    char buf[32];
    const double hundredths = factor * 100.0;
    if (std::abs(hundredths - std::round(hundredths)) < 1e-9) {
        std::snprintf(buf, sizeof(buf), "%.2f", factor);
    } else {
        std::snprintf(buf, sizeof(buf), "%g", factor);
    }
    return buf;
}

bool on_grid(double v, const std::array<double, 3>& grid) {
    return std::any_of(grid.begin(), grid.end(), [v](double g) { return std::abs(v - g) < 1e-12; });
}

double ulp_of(double x) { return x == 0.0 ? 0.0 : std::ldexp(1.0, std::ilogb(x) - 52); }

constexpr int kOffsetSearch = 64;

double round_to(double x, double grid) { return grid == 0.0 ? x : std::nearbyint(x / grid) * grid; }

// Nudges `offset` (by at most one ulp of the coordinates) so that a + offset and b - offset are both
// exact, which makes (a' - a) == -(b' - b) bit for bit. The coordinate that lands on the coarser grid
// is rounded onto it and the offset is read back from it. When a + b itself carries bits finer than
// both target grids no such offset exists and the plain offset is returned.
double exact_offset(double offset, double a, double b) {
    const double ga = ulp_of(a + offset);
    const double gb = ulp_of(b - offset);
    const double d = gb >= ga ? b - round_to(b - offset, gb) : round_to(a + offset, ga) - a;
    if (((a + d) - a) == -((b - d) - b)) {
        return d;
    }
    // Rounded differences can still cancel; scan the finest grid around the snapped value.
    const double g = std::min({ulp_of(a), ulp_of(b), ga, gb});
    for (int k = 1; g > 0.0 && k <= kOffsetSearch; ++k) {
        for (const double c : {d + k * g, d - k * g}) {
            if (((a + c) - a) == -((b - c) - b)) {
                return c;
            }
        }
    }
    return offset;
}

double parse_number(const std::string& s, const std::string& name) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) {
        throw std::invalid_argument("unknown configuration '" + name + "'");
    }
    return v;
}

}  // namespace

std::string family_name(Family family) {
    switch (family) {
        case Family::baseline: return "baseline";
        case Family::tortuosity: return "tortuosity";
        case Family::arc_drop: return "arc_drop";
        case Family::radius_scale: return "radius_scale";
        case Family::pixel_drop: return "pixel_drop";
    }
    throw std::invalid_argument("unknown perturbation family");
}

Family parse_family(const std::string& name) {
    static const std::map<std::string, Family> names = {
        {"baseline", Family::baseline},         {"tortuosity", Family::tortuosity},
        {"arc_drop", Family::arc_drop},         {"radius_scale", Family::radius_scale},
        {"radius", Family::radius_scale},       {"pixel_drop", Family::pixel_drop},
        {"pixdrop", Family::pixel_drop},
    };
    const auto it = names.find(name);
    if (it == names.end()) {
        throw std::invalid_argument("unknown perturbation family '" + name + "'");
    }
    return it->second;
}

std::string PerturbationConfig::name() const {
    switch (family) {
        case Family::baseline: return "baseline";
        case Family::tortuosity: return "tortuosity_" + compact(strength) + "x";
        case Family::arc_drop: return "arc_drop_" + percent(strength);
        case Family::radius_scale: return "radius_x" + radius_label(strength);
        case Family::pixel_drop: return "pixdrop_" + percent(strength);
    }
    throw std::invalid_argument("unknown perturbation family");
}

PerturbationConfig config_from_name(const std::string& name, std::uint64_t seed, double gamma) {
    PerturbationConfig c;
    c.seed = seed;
    c.gamma = gamma;
    auto starts = [&](const std::string& prefix) { return name.rfind(prefix, 0) == 0; };
    if (name == "baseline") {
        c.family = Family::baseline;
    } else if (starts("tortuosity_") && name.size() > 12 && name.back() == 'x') {
        c.family = Family::tortuosity;
        c.strength = parse_number(name.substr(11, name.size() - 12), name);
    } else if (starts("arc_drop_")) {
        c.family = Family::arc_drop;
        c.strength = parse_number(name.substr(9), name) / 100.0;
    } else if (starts("radius_x")) {
        c.family = Family::radius_scale;
        c.strength = parse_number(name.substr(8), name);
    } else if (starts("pixdrop_")) {
        c.family = Family::pixel_drop;
        c.strength = parse_number(name.substr(8), name) / 100.0;
    } else {
        throw std::invalid_argument("unknown configuration '" + name + "'");
    }
    return c;
}

std::optional<std::string> validate(const PerturbationConfig& config) {
    const double s = config.strength;
    switch (config.family) {
        case Family::baseline: return std::nullopt;
        case Family::tortuosity:
            if (!(s > 0.0) || !(config.gamma > 0.0)) {
                throw std::invalid_argument("tortuosity needs alpha > 0 and gamma > 0");
            }
            if (!on_grid(s, kAlphaGrid) || std::abs(config.gamma - kDefaultGamma) > 1e-12) {
                return "tortuosity strength " + compact(s) + " / gamma " + compact(config.gamma) +
                       " is off the default grid (alpha 1, 2, 4; gamma 0.15)";
            }
            return std::nullopt;
        case Family::arc_drop:
        case Family::pixel_drop:
            if (!(s > 0.0 && s < 1.0)) {
                throw std::invalid_argument(family_name(config.family) + " fraction must lie in (0, 1)");
            }
            if (!on_grid(s, kDropGrid)) {
                return family_name(config.family) + " fraction " + compact(s) +
                       " is off the default grid (0.10, 0.20, 0.30)";
            }
            return std::nullopt;
        case Family::radius_scale:
            if (!(s > 0.0 && s <= 1.0)) {
                throw std::invalid_argument("radius factor must lie in (0, 1]");
            }
            if (!on_grid(s, kRadiusGrid)) {
                return "radius factor " + compact(s) + " is off the default grid (0.85, 0.70, 0.55)";
            }
            return std::nullopt;
    }
    throw std::invalid_argument("unknown perturbation family");
}

std::vector<PerturbationConfig> standard_grid(std::uint64_t seed, double gamma) {
    std::vector<PerturbationConfig> grid;
    grid.push_back({Family::baseline, 0.0, gamma, seed});
    for (double a : kAlphaGrid) {
        grid.push_back({Family::tortuosity, a, gamma, seed});
    }
    for (double f : kDropGrid) {
        grid.push_back({Family::arc_drop, f, gamma, seed});
    }
    for (double r : kRadiusGrid) {
        grid.push_back({Family::radius_scale, r, gamma, seed});
    }
    for (double f : kDropGrid) {
        grid.push_back({Family::pixel_drop, f, gamma, seed});
    }
    return grid;
}

int tortuosity_sign(std::uint64_t seed, int segment_id) {
    return (counter_hash(seed, RngStream::tortuosity_sign, static_cast<std::uint64_t>(segment_id)) >> 63) ? 1 : -1;
}

BezierTree perturb_tortuosity(const BezierTree& tree, double alpha, double gamma, std::uint64_t seed) {
    if (!(alpha > 0.0) || !(gamma > 0.0)) {
        throw std::invalid_argument("perturb_tortuosity needs alpha > 0 and gamma > 0");
    }
    BezierTree out = tree;
    const auto n = static_cast<std::ptrdiff_t>(out.segments.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto& seg = out.segments[static_cast<std::size_t>(i)];
        auto& p = seg.curve.p;
        const Point2 v = p[3] - p[0];
        const double len = norm(v);
        if (len <= 0.0) {
            continue;
        }
        // gamma*alpha*L * n_hat, with n_hat = (-v_y, v_x)/L; the L cancels.
        const double s = tortuosity_sign(seed, seg.id);
        const Point2 offset{exact_offset(s * gamma * alpha * -v.y, p[1].x, p[2].x),
                            exact_offset(s * gamma * alpha * v.x, p[1].y, p[2].y)};
        p[1] = p[1] + offset;
        p[2] = p[2] - offset;
    }
    return out;
}

BezierTree arc_drop(const BezierTree& tree, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("arc_drop fraction must lie in (0, 1)");
    }
    if (tree.segments.empty()) {
        throw std::invalid_argument("arc_drop needs a nonempty tree");
    }
    const auto n = tree.segments.size();
    const auto n_drop = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    std::vector<std::pair<std::uint64_t, int>> keyed;
    keyed.reserve(n);
    for (const auto& s : tree.segments) {
        keyed.emplace_back(counter_hash(seed, RngStream::arc_drop, static_cast<std::uint64_t>(s.id)), s.id);
    }
    std::sort(keyed.begin(), keyed.end());
    std::set<int> removed;
    for (std::size_t k = 0; k < n_drop; ++k) {
        removed.insert(keyed[k].second);
    }
    BezierTree out;
    out.source_width = tree.source_width;
    out.source_height = tree.source_height;
    out.provenance = tree.provenance;
    for (const auto& s : tree.segments) {
        if (removed.contains(s.id)) {
            continue;
        }
        Segment kept = s;
        if (removed.contains(kept.parent)) {
            kept.parent = kNoParent;
        }
        out.segments.push_back(kept);
    }
    return out;
}

RadiusField radius_scale(const RadiusField& field, double factor) {
    if (!(factor > 0.0 && factor <= 1.0)) {
        throw std::invalid_argument("radius factor must lie in (0, 1]");
    }
    RadiusField out = field;
    for (auto& v : out.values()) {
        v *= factor;
    }
    return out;
}

PerturbedInputs apply(const PerturbationConfig& config, const BezierTree& tree, const RadiusField& field,
                      const VesselMask& mask) {
    validate(config);
    switch (config.family) {
        case Family::baseline: return {tree, field, mask};
        case Family::tortuosity:
            return {perturb_tortuosity(tree, config.strength, config.gamma, config.seed), field, mask};
        case Family::arc_drop: return {arc_drop(tree, config.strength, config.seed), field, mask};
        case Family::radius_scale: {
            BezierTree scaled = tree;
            for (auto& s : scaled.segments) {
                s.radius *= config.strength;
            }
            return {std::move(scaled), radius_scale(field, config.strength), mask};
        }
        case Family::pixel_drop: {
            auto degraded = pixel_drop(mask, config.strength, config.seed);
            auto enc = encode_mask(degraded);
            enc.tree.provenance = tree.provenance;
            return {std::move(enc.tree), std::move(enc.field), std::move(degraded)};
        }
    }
    throw std::invalid_argument("unknown perturbation family");
}

}  // namespace vesselbez
