#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace vesselbez {

/// Row-major 2D grid. Used for masks (uint8_t), radius fields and hint channels.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(checked_area(width, height), fill) {}
    Grid(int width, int height, std::vector<T> data) : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != checked_area(width, height)) {
            throw std::invalid_argument("grid data size does not match dimensions");
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& operator()(int row, int col) { return data_[index(row, col)]; }
    const T& operator()(int row, int col) const { return data_[index(row, col)]; }
    bool contains(int row, int col) const { return row >= 0 && col >= 0 && row < height_ && col < width_; }

    std::span<T> values() { return data_; }
    std::span<const T> values() const { return data_; }
    std::span<T> row(int r) { return std::span<T>(data_).subspan(static_cast<std::size_t>(r) * width_, width_); }
    std::span<const T> row(int r) const {
        return std::span<const T>(data_).subspan(static_cast<std::size_t>(r) * width_, width_);
    }

    bool operator==(const Grid&) const = default;

private:
    static std::size_t checked_area(int width, int height) {
        if (width < 0 || height < 0) {
            throw std::invalid_argument("grid dimensions must be non-negative");
        }
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
    std::size_t index(int row, int col) const { return static_cast<std::size_t>(row) * width_ + col; }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Binary vessel mask: 1 = vessel foreground, 0 = background.
class VesselMask {
public:
    VesselMask() = default;
    VesselMask(int width, int height) : bits_(width, height, 0) {}
    /// Throws std::invalid_argument unless every value is 0 or 1.
    VesselMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const { return bits_.width(); }
    int height() const { return bits_.height(); }
    bool empty() const { return bits_.empty(); }
    bool contains(int row, int col) const { return bits_.contains(row, col); }

    bool at(int row, int col) const { return bits_(row, col) != 0; }
    void set(int row, int col, bool on) { bits_(row, col) = on ? 1 : 0; }

    std::span<const std::uint8_t> bits() const { return bits_.values(); }
    std::size_t foreground_count() const;

    bool operator==(const VesselMask&) const = default;

private:
    Grid<std::uint8_t> bits_;
};

/// Per-pixel Euclidean distance to the nearest background pixel center; 0 on background.
using RadiusField = Grid<double>;

inline constexpr int kWorkingResolution = 512;

/// Reads an 8-bit grayscale/RGB PNG or a binary/ASCII PGM. Luminance > 127 maps to foreground.
VesselMask load_mask(const std::filesystem::path& path);

/// Writes 8-bit grayscale (foreground = 255). Format chosen by extension (.png or .pgm).
void save_mask(const VesselMask& mask, const std::filesystem::path& path);

/// Nearest-neighbour resampling to target x target.
VesselMask resample_to_working(const VesselMask& mask, int target = kWorkingResolution);

/// Exact Euclidean distance transform (OpenMP-parallel separable passes).
RadiusField distance_transform(const VesselMask& mask);

/// Single-threaded reference for distance_transform; identical output.
RadiusField distance_transform_serial(const VesselMask& mask);

/// Flips exactly round(fraction * foreground_count) foreground pixels to background.
/// Pixels are chosen by a seeded counter-based hash, so the result depends only on (mask, fraction, seed).
VesselMask pixel_drop(const VesselMask& mask, double fraction, std::uint64_t seed);

}  // namespace vesselbez
