#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace vesselbez {

class ImageIoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Interleaved 8-bit raster with 1 (gray) or 3 (RGB) channels.
struct Raster8 {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;
};

/// Decodes PNG (8-bit gray, gray+alpha, RGB, RGBA) or PGM/PPM (P2, P5, P6, maxval 255).
/// Alpha is dropped. Throws ImageIoError on unreadable, unsupported or zero-area input.
Raster8 read_raster(const std::filesystem::path& path);

/// Writes PNG or PGM/PPM depending on extension.
void write_raster(const Raster8& image, const std::filesystem::path& path);

/// Writes `bytes` to `path` through a temp file + rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace vesselbez
