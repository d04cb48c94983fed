#include "vesselbez/mask.hpp"

#include "vesselbez/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace vesselbez {

VesselMask::VesselMask(int width, int height, std::vector<std::uint8_t> bits) : bits_(width, height, std::move(bits)) {
    for (auto v : bits_.values()) {
        if (v > 1) {
            throw std::invalid_argument("mask values must be 0 or 1");
        }
    }
}

std::size_t VesselMask::foreground_count() const {
    return static_cast<std::size_t>(std::count(bits_.values().begin(), bits_.values().end(), std::uint8_t{1}));
}

VesselMask resample_to_working(const VesselMask& mask, int target) {
    if (target <= 0) {
        throw std::invalid_argument("resample target must be positive");
    }
    if (mask.empty()) {
        throw std::invalid_argument("cannot resample an empty mask");
    }
    if (mask.width() == target && mask.height() == target) {
        return mask;
    }
    VesselMask out(target, target);
    // Destination pixel center maps back to the source pixel that contains it.
    for (int r = 0; r < target; ++r) {
        const int sr = std::min(mask.height() - 1, static_cast<int>((r + 0.5) * mask.height() / target));
        for (int c = 0; c < target; ++c) {
            const int sc = std::min(mask.width() - 1, static_cast<int>((c + 0.5) * mask.width() / target));
            out.set(r, c, mask.at(sr, sc));
        }
    }
    return out;
}

VesselMask pixel_drop(const VesselMask& mask, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("pixel_drop fraction must lie in (0, 1)");
    }
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    const auto bits = mask.bits();
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) {
            keyed.emplace_back(counter_hash(seed, RngStream::pixel_drop, i), i);
        }
    }
    if (keyed.empty()) {
        throw std::invalid_argument("pixel_drop requires a non-empty foreground");
    }
    const auto n_drop = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(keyed.size())));
    // The n_drop smallest keys form a uniform sample without replacement.
    std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(n_drop), keyed.end());
    VesselMask out = mask;
    for (std::size_t k = 0; k < n_drop; ++k) {
        const auto idx = keyed[k].second;
        out.set(static_cast<int>(idx / mask.width()), static_cast<int>(idx % mask.width()), false);
    }
    return out;
}

}  // namespace vesselbez
