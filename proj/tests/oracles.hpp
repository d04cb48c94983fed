#pragma once

#include "vesselbez/bezier.hpp"
#include "vesselbez/mask.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// All-pairs scan: distance from each foreground pixel to the nearest background pixel centre.
inline vesselbez::RadiusField brute_force_dt(const vesselbez::VesselMask& m) {
    vesselbez::RadiusField out(m.width(), m.height(), 0.0);
    for (int r = 0; r < m.height(); ++r) {
        for (int c = 0; c < m.width(); ++c) {
            if (!m.at(r, c)) {
                continue;
            }
            double best = std::numeric_limits<double>::infinity();
            for (int rr = 0; rr < m.height(); ++rr) {
                for (int cc = 0; cc < m.width(); ++cc) {
                    if (!m.at(rr, cc)) {
                        best = std::min(best, std::hypot(double(rr - r), double(cc - c)));
                    }
                }
            }
            out(r, c) = best;
        }
    }
    return out;
}

// Closed-form Student-t CDF for integer df (Abramowitz & Stegun 26.7.3 / 26.7.4).
inline double t_cdf_series(double t, int df) {
    const long double theta = std::atan(static_cast<long double>(t) / std::sqrt(static_cast<long double>(df)));
    const long double s = std::sin(theta);
    const long double c = std::cos(theta);
    long double a = 0.0L;
    if (df % 2 == 1) {
        long double sum = 0.0L;
        if (df > 1) {
            long double term = c;
            sum = term;
            for (int k = 3; k <= df - 2; k += 2) {
                term *= c * c * static_cast<long double>(k - 1) / k;
                sum += term;
            }
        }
        a = 2.0L / std::numbers::pi_v<long double> * (theta + s * sum);
    } else {
        long double term = 1.0L;
        long double sum = 1.0L;
        for (int k = 2; k <= df - 2; k += 2) {
            term *= c * c * static_cast<long double>(k - 1) / k;
            sum += term;
        }
        a = s * sum;
    }
    return static_cast<double>(0.5L + 0.5L * a);
}

inline double dense_arc(const vesselbez::CubicBezier& b, int samples = 100000) {
    double total = 0.0;
    vesselbez::Point2 prev = b.p[0];
    for (int i = 1; i <= samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        const double u = 1.0 - t;
        const vesselbez::Point2 cur = u * u * u * b.p[0] + 3 * u * u * t * b.p[1] + 3 * u * t * t * b.p[2] +
                                      t * t * t * b.p[3];
        total += vesselbez::distance(prev, cur);
        prev = cur;
    }
    return total;
}

// Normalised 7x7 kernel built directly in 2-D.
inline std::vector<double> gaussian_kernel_2d(double sigma = 2.0) {
    std::vector<double> k(49);
    double sum = 0.0;
    for (int y = -3; y <= 3; ++y) {
        for (int x = -3; x <= 3; ++x) {
            const double v = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
            k[(y + 3) * 7 + (x + 3)] = v;
            sum += v;
        }
    }
    for (auto& v : k) {
        v /= sum;
    }
    return k;
}

inline vesselbez::CubicBezier quarter_circle(double radius) {
    constexpr double kappa = 0.5522847498307936;
    return {{{{radius, 0.0}, {radius, kappa * radius}, {kappa * radius, radius}, {0.0, radius}}}};
}

inline vesselbez::VesselMask random_mask(std::mt19937_64& rng, int w, int h, double density) {
    std::bernoulli_distribution on(density);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
    for (auto& b : bits) {
        b = on(rng) ? 1 : 0;
    }
    bits[static_cast<std::size_t>(rng() % bits.size())] = 0;
    return vesselbez::VesselMask(w, h, std::move(bits));
}

inline vesselbez::VesselMask line_mask(int size, int row, int c0, int c1) {
    vesselbez::VesselMask m(size, size);
    for (int c = c0; c <= c1; ++c) {
        m.set(row, c, true);
    }
    return m;
}

}  // namespace oracle
