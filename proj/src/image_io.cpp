#include "vesselbez/image_io.hpp"

#include "vesselbez/mask.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vesselbez {
namespace {

std::string lower_ext(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ImageIoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Raster8 decode_png(const std::string& bytes, const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw ImageIoError(path.string() + ": " + image.message);
    }
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        throw ImageIoError(path.string() + ": unsupported bit depth (only 8-bit images are accepted)");
    }
    Raster8 out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    out.channels = color ? 3 : 1;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    out.pixels.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        throw ImageIoError(path.string() + ": " + image.message);
    }
    return out;
}

// Netpbm header token, skipping whitespace and '#' comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int ch = 0;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) {
                break;
            }
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

int pnm_int(std::istream& in, const std::filesystem::path& path) {
    const auto tok = pnm_token(in);
    try {
        return std::stoi(tok);
    } catch (const std::exception&) {
        throw ImageIoError(path.string() + ": malformed netpbm header");
    }
}

Raster8 decode_pnm(const std::string& bytes, const std::filesystem::path& path) {
    std::istringstream in(bytes);
    const auto magic = pnm_token(in);
    if (magic != "P2" && magic != "P5" && magic != "P6") {
        throw ImageIoError(path.string() + ": unsupported netpbm variant '" + magic + "'");
    }
    Raster8 out;
    out.width = pnm_int(in, path);
    out.height = pnm_int(in, path);
    const int maxval = pnm_int(in, path);
    if (maxval != 255) {
        throw ImageIoError(path.string() + ": unsupported bit depth (maxval " + std::to_string(maxval) + ")");
    }
    if (out.width < 0 || out.height < 0) {
        throw ImageIoError(path.string() + ": negative dimensions");
    }
    out.channels = magic == "P6" ? 3 : 1;
    const auto n = static_cast<std::size_t>(out.width) * out.height * out.channels;
    out.pixels.resize(n);
    if (magic == "P2") {
        for (auto& px : out.pixels) {
            const int v = pnm_int(in, path);
            if (v < 0 || v > 255) {
                throw ImageIoError(path.string() + ": pixel value out of range");
            }
            px = static_cast<std::uint8_t>(v);
        }
    } else {
        in.read(reinterpret_cast<char*>(out.pixels.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) {
            throw ImageIoError(path.string() + ": truncated pixel data");
        }
    }
    return out;
}

std::string encode_png(const Raster8& img) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.pixels.data(), 0, nullptr)) {
        throw ImageIoError(std::string("png encode failed: ") + image.message);
    }
    std::string buf(size, '\0');
    if (!png_image_write_to_memory(&image, buf.data(), &size, 0, img.pixels.data(), 0, nullptr)) {
        throw ImageIoError(std::string("png encode failed: ") + image.message);
    }
    buf.resize(size);
    return buf;
}

std::string encode_pnm(const Raster8& img) {
    std::string out = (img.channels == 3 ? "P6\n" : "P5\n") + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return out;
}

}  // namespace

Raster8 read_raster(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    Raster8 out;
    if (bytes.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) == 0) {
        out = decode_png(bytes, path);
    } else if (bytes.size() >= 2 && bytes[0] == 'P') {
        out = decode_pnm(bytes, path);
    } else {
        throw ImageIoError(path.string() + ": unrecognised image format");
    }
    if (out.width == 0 || out.height == 0) {
        throw ImageIoError(path.string() + ": zero-area image");
    }
    return out;
}

void write_raster(const Raster8& image, const std::filesystem::path& path) {
    if (image.channels != 1 && image.channels != 3) {
        throw ImageIoError("only 1- or 3-channel rasters can be written");
    }
    const auto ext = lower_ext(path);
    if (ext == ".png") {
        write_file_atomic(path, encode_png(image));
    } else if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") {
        write_file_atomic(path, encode_pnm(image));
    } else {
        throw ImageIoError(path.string() + ": unsupported output extension");
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ImageIoError("cannot open " + tmp.string() + " for writing");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw ImageIoError("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

VesselMask load_mask(const std::filesystem::path& path) {
    const auto img = read_raster(path);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(img.width) * img.height);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        int lum = 0;
        if (img.channels == 1) {
            lum = img.pixels[i];
        } else {
            const auto* p = &img.pixels[i * 3];
            // ITU-R BT.601 luma, integer form
            lum = (299 * p[0] + 587 * p[1] + 114 * p[2] + 500) / 1000;
        }
        bits[i] = lum > 127 ? 1 : 0;
    }
    return VesselMask(img.width, img.height, std::move(bits));
}

void save_mask(const VesselMask& mask, const std::filesystem::path& path) {
    Raster8 img;
    img.width = mask.width();
    img.height = mask.height();
    img.channels = 1;
    img.pixels.reserve(mask.bits().size());
    for (auto b : mask.bits()) {
        img.pixels.push_back(b ? 255 : 0);
    }
    write_raster(img, path);
}

}  // namespace vesselbez
