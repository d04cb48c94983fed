#include "vesselbez/mask.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <omp.h>

namespace vesselbez {
namespace {

constexpr double kInf = 1e20;

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher). `f` holds squared distances
// along one line; result written to `d`. `v` and `z` are scratch buffers of size n and n+1.
void edt_1d(const double* f, double* d, int n, std::vector<int>& v, std::vector<double>& z) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    auto intersect = [f](int q, int p) {
        return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
    };
    for (int q = 1; q < n; ++q) {
        double s = intersect(q, v[k]);
        while (s <= z[k]) {
            --k;
            s = intersect(q, v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) {
            ++k;
        }
        const double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

void check_has_background(const VesselMask& mask) {
    if (mask.foreground_count() == mask.bits().size() && !mask.empty()) {
        throw std::invalid_argument("distance transform is undefined for a mask without background pixels");
    }
}

void column_pass(const VesselMask& mask, std::vector<double>& sq, int c, std::vector<double>& f,
                 std::vector<double>& d, std::vector<int>& v, std::vector<double>& z) {
    const int w = mask.width();
    const int h = mask.height();
    for (int r = 0; r < h; ++r) {
        f[r] = mask.at(r, c) ? kInf : 0.0;
    }
    edt_1d(f.data(), d.data(), h, v, z);
    for (int r = 0; r < h; ++r) {
        sq[static_cast<std::size_t>(r) * w + c] = d[r];
    }
}

void row_pass(std::vector<double>& sq, RadiusField& out, int r, std::vector<double>& d, std::vector<int>& v,
              std::vector<double>& z) {
    const int w = out.width();
    double* line = sq.data() + static_cast<std::size_t>(r) * w;
    edt_1d(line, d.data(), w, v, z);
    auto dst = out.row(r);
    for (int c = 0; c < w; ++c) {
        dst[c] = std::sqrt(d[c]);
    }
}

}  // namespace

RadiusField distance_transform_serial(const VesselMask& mask) {
    check_has_background(mask);
    const int w = mask.width();
    const int h = mask.height();
    RadiusField out(w, h, 0.0);
    if (mask.empty()) {
        return out;
    }
    const int n = std::max(w, h);
    std::vector<double> sq(static_cast<std::size_t>(w) * h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);
    for (int c = 0; c < w; ++c) {
        column_pass(mask, sq, c, f, d, v, z);
    }
    for (int r = 0; r < h; ++r) {
        row_pass(sq, out, r, d, v, z);
    }
    return out;
}

RadiusField distance_transform(const VesselMask& mask) {
    check_has_background(mask);
    const int w = mask.width();
    const int h = mask.height();
    RadiusField out(w, h, 0.0);
    if (mask.empty()) {
        return out;
    }
    const int n = std::max(w, h);
    std::vector<double> sq(static_cast<std::size_t>(w) * h);
#pragma omp parallel
    {
        std::vector<double> f(n), d(n), z(n + 1);
        std::vector<int> v(n);
#pragma omp for schedule(static)
        for (int c = 0; c < w; ++c) {
            column_pass(mask, sq, c, f, d, v, z);
        }
#pragma omp for schedule(static)
        for (int r = 0; r < h; ++r) {
            row_pass(sq, out, r, d, v, z);
        }
    }
    return out;
}

}  // namespace vesselbez
