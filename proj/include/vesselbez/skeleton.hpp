#pragma once

#include "vesselbez/mask.hpp"

#include <compare>
#include <ostream>
#include <vector>

namespace vesselbez {

struct Pixel {
    int row = 0;
    int col = 0;
    auto operator<=>(const Pixel&) const = default;
};

/// 1-pixel-wide skeleton stored as a raster; degrees are 8-neighbour counts.
class Skeleton {
public:
    Skeleton() = default;
    explicit Skeleton(Grid<std::uint8_t> raster) : raster_(std::move(raster)) {}

    int width() const { return raster_.width(); }
    int height() const { return raster_.height(); }
    bool at(int row, int col) const { return raster_.contains(row, col) && raster_(row, col) != 0; }
    const Grid<std::uint8_t>& raster() const { return raster_; }

    /// Skeleton pixels in raster order.
    std::vector<Pixel> pixels() const;
    std::size_t size() const;
    int degree(Pixel p) const;

    bool operator==(const Skeleton&) const = default;

private:
    Grid<std::uint8_t> raster_;
};

struct NodeSets {
    std::vector<Pixel> endpoints;     // degree 1
    std::vector<Pixel> branch_nodes;  // degree >= 3
};

/// Ordered open path through 8-adjacent skeleton pixels.
struct Polyline {
    std::vector<Pixel> points;
    bool operator==(const Polyline&) const = default;
};

/// Zhang-Suen thinning followed by a simple-point cleanup pass. Marking runs under OpenMP.
Skeleton skeletonize(const VesselMask& mask);
/// Single-threaded reference for skeletonize; identical output.
Skeleton skeletonize_serial(const VesselMask& mask);

/// True when removing p leaves the 8-connectivity of its 3x3 neighbourhood unchanged.
bool is_simple_pixel(const Grid<std::uint8_t>& raster, int row, int col);

NodeSets classify_nodes(const Skeleton& skeleton);

/// Number of junctions: clusters of branch pixels, joining pixels up to 2 px apart (Chebyshev).
int count_junctions(const Skeleton& skeleton);

/// Splits the skeleton at endpoints and branch pixels. Pure cycles are opened at their
/// lexicographically smallest pixel. Deterministic: terminals are visited in raster order and
/// their neighbours clockwise from north.
std::vector<Polyline> extract_polylines(const Skeleton& skeleton);

/// Debug dump: one "id: (r,c) (r,c) ..." line per polyline.
void write_polylines_text(std::ostream& out, const std::vector<Polyline>& polylines);

}  // namespace vesselbez
