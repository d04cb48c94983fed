#include "vesselbez/hint.hpp"

#include "vesselbez/features.hpp"
#include "vesselbez/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vesselbez {
namespace {

struct Stamp {
    double x = 0.0;
    double y = 0.0;
    double radius = 0.0;
};

std::vector<Stamp> segment_stamps(const Segment& seg, const RadiusField& field) {
    const int n = render_sample_count(seg.curve);
    std::vector<Stamp> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Point2 c = eval(seg.curve, static_cast<double>(i) / (n - 1));
        const double local = field_at(field, c);
        out.push_back({c.x, c.y, local > 0.0 ? local : seg.radius});
    }
    return out;
}

// Pixels of row `r` covered by the stamp, as an inclusive column range (empty when lo > hi).
std::pair<int, int> stamp_span(const Stamp& s, int r, int width) {
    const double dy = r - s.y;
    const double reach2 = s.radius * s.radius - dy * dy;
    int lo = 1;
    int hi = 0;
    if (reach2 >= 0.0) {
        const double reach = std::sqrt(reach2) + 1e-9;
        lo = static_cast<int>(std::ceil(s.x - reach));
        hi = static_cast<int>(std::floor(s.x + reach));
    }
    const int nr = static_cast<int>(std::lround(s.y));
    const int nc = static_cast<int>(std::lround(s.x));
    if (nr == r) {
        lo = lo > hi ? nc : std::min(lo, nc);
        hi = std::max(hi, nc);
    }
    return {std::max(lo, 0), std::min(hi, width - 1)};
}

std::pair<int, int> stamp_rows(const Stamp& s, int height) {
    const int lo = std::min(static_cast<int>(std::ceil(s.y - s.radius - 1e-9)), static_cast<int>(std::lround(s.y)));
    const int hi = std::max(static_cast<int>(std::floor(s.y + s.radius + 1e-9)), static_cast<int>(std::lround(s.y)));
    return {std::max(lo, 0), std::min(hi, height - 1)};
}

int reflect101(int i, int n) {
    if (n == 1) {
        return 0;
    }
    while (i < 0 || i >= n) {
        i = i < 0 ? -i : 2 * (n - 1) - i;
    }
    return i;
}

void smooth_row(const Channel& in, std::vector<double>& tmp, int r, const std::array<double, kGaussianSize>& taps) {
    const int w = in.width();
    constexpr int half = kGaussianSize / 2;
    for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int k = 0; k < kGaussianSize; ++k) {
            acc += taps[k] * in(r, reflect101(c + k - half, w));
        }
        tmp[static_cast<std::size_t>(r) * w + c] = acc;
    }
}

void smooth_col_row(const std::vector<double>& tmp, Channel& out, int r,
                    const std::array<double, kGaussianSize>& taps) {
    const int w = out.width();
    const int h = out.height();
    constexpr int half = kGaussianSize / 2;
    for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int k = 0; k < kGaussianSize; ++k) {
            acc += taps[k] * tmp[static_cast<std::size_t>(reflect101(r + k - half, h)) * w + c];
        }
        out(r, c) = static_cast<float>(acc);
    }
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
    if (pos + 4 > in.size()) {
        throw std::runtime_error("BTEF: truncated data");
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    }
    return v;
}

}  // namespace

Channel render_channel0(const RadiusField& field) {
    Channel out(field.width(), field.height(), 0.0f);
    double max = 0.0;
    for (double v : field.values()) {
        max = std::max(max, v);
    }
    if (max <= 0.0) {
        return out;
    }
    auto dst = out.values();
    auto src = field.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<float>(src[i] / max);
    }
    return out;
}

int render_sample_count(const CubicBezier& curve) {
    return std::max(20, static_cast<int>(std::ceil(2.0 * curve.chord())));
}

Channel render_channel1_serial(const BezierTree& tree, const RadiusField& field) {
    Channel out(field.width(), field.height(), 0.0f);
    for (const auto& seg : tree.segments) {
        for (const auto& s : segment_stamps(seg, field)) {
            const auto [r0, r1] = stamp_rows(s, out.height());
            for (int r = r0; r <= r1; ++r) {
                const auto [c0, c1] = stamp_span(s, r, out.width());
                for (int c = c0; c <= c1; ++c) {
                    out(r, c) = 1.0f;
                }
            }
        }
    }
    return out;
}

Channel render_channel1(const BezierTree& tree, const RadiusField& field) {
    Channel out(field.width(), field.height(), 0.0f);
    const int h = out.height();
    const auto n_seg = static_cast<std::ptrdiff_t>(tree.segments.size());
    std::vector<std::vector<Stamp>> per_segment(tree.segments.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n_seg; ++i) {
        per_segment[static_cast<std::size_t>(i)] = segment_stamps(tree.segments[static_cast<std::size_t>(i)], field);
    }
    // Bucket stamps by the rows they touch; each row is then owned by a single thread.
    std::vector<std::vector<const Stamp*>> rows(static_cast<std::size_t>(std::max(h, 0)));
    for (const auto& stamps : per_segment) {
        for (const auto& s : stamps) {
            const auto [r0, r1] = stamp_rows(s, h);
            for (int r = r0; r <= r1; ++r) {
                rows[static_cast<std::size_t>(r)].push_back(&s);
            }
        }
    }
#pragma omp parallel for schedule(dynamic, 8)
    for (int r = 0; r < h; ++r) {
        auto dst = out.row(r);
        for (const Stamp* s : rows[static_cast<std::size_t>(r)]) {
            const auto [c0, c1] = stamp_span(*s, r, out.width());
            for (int c = c0; c <= c1; ++c) {
                dst[c] = 1.0f;
            }
        }
    }
    return out;
}

std::array<double, kGaussianSize> gaussian_taps(double sigma) {
    std::array<double, kGaussianSize> taps{};
    constexpr int half = kGaussianSize / 2;
    double sum = 0.0;
    for (int k = 0; k < kGaussianSize; ++k) {
        const double x = k - half;
        taps[k] = std::exp(-x * x / (2.0 * sigma * sigma));
        sum += taps[k];
    }
    for (auto& t : taps) {
        t /= sum;
    }
    return taps;
}

Channel gaussian_smooth_serial(const Channel& input) {
    Channel out(input.width(), input.height(), 0.0f);
    if (input.empty()) {
        return out;
    }
    const auto taps = gaussian_taps();
    std::vector<double> tmp(input.size());
    for (int r = 0; r < input.height(); ++r) {
        smooth_row(input, tmp, r, taps);
    }
    for (int r = 0; r < input.height(); ++r) {
        smooth_col_row(tmp, out, r, taps);
    }
    return out;
}

Channel gaussian_smooth(const Channel& input) {
    Channel out(input.width(), input.height(), 0.0f);
    if (input.empty()) {
        return out;
    }
    const auto taps = gaussian_taps();
    std::vector<double> tmp(input.size());
    const int h = input.height();
#pragma omp parallel
    {
#pragma omp for schedule(static)
        for (int r = 0; r < h; ++r) {
            smooth_row(input, tmp, r, taps);
        }
#pragma omp for schedule(static)
        for (int r = 0; r < h; ++r) {
            smooth_col_row(tmp, out, r, taps);
        }
    }
    return out;
}

HintImage assemble_hint(const Channel& ch0, const Channel& ch1, const Channel& ch2) {
    if (ch0.width() != ch1.width() || ch0.width() != ch2.width() || ch0.height() != ch1.height() ||
        ch0.height() != ch2.height()) {
        throw std::invalid_argument("hint channels differ in size");
    }
    HintImage hint;
    const std::array<const Channel*, 3> src = {&ch0, &ch1, &ch2};
    for (int k = 0; k < 3; ++k) {
        hint.channels[k] = *src[k];
        for (auto& v : hint.channels[k].values()) {
            v = 2.0f * v - 1.0f;
        }
    }
    return hint;
}

Channel to_unit_scale(const Channel& channel) {
    Channel out = channel;
    for (auto& v : out.values()) {
        v = (v + 1.0f) * 0.5f;
    }
    return out;
}

HintImage render_hint(const BezierTree& tree, const RadiusField& field) {
    const auto ch0 = render_channel0(field);
    const auto ch1 = render_channel1(tree, field);
    const auto ch2 = gaussian_smooth(ch1);
    return assemble_hint(ch0, ch1, ch2);
}

double channel0_invariance_report(const HintImage& a, const HintImage& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw std::invalid_argument("hint dimensions differ");
    }
    auto mean01 = [](const Channel& c) {
        double sum = 0.0;
        for (float v : c.values()) {
            sum += (static_cast<double>(v) + 1.0) * 0.5;
        }
        return c.empty() ? 0.0 : sum / static_cast<double>(c.size());
    };
    return std::abs(mean01(a.channels[0]) - mean01(b.channels[0]));
}

std::string encode_btef(const HintImage& hint, const std::string& metadata) {
    std::string out = "BTEF";
    put_u32(out, static_cast<std::uint32_t>(hint.width()));
    put_u32(out, static_cast<std::uint32_t>(hint.height()));
    put_u32(out, 3);
    out.reserve(out.size() + 3 * static_cast<std::size_t>(hint.width()) * hint.height() * 4 + metadata.size() + 8);
    for (const auto& ch : hint.channels) {
        for (float v : ch.values()) {
            put_u32(out, std::bit_cast<std::uint32_t>(v));
        }
    }
    if (!metadata.empty()) {
        out += "META";
        put_u32(out, static_cast<std::uint32_t>(metadata.size()));
        out += metadata;
    }
    return out;
}

HintImage decode_btef(const std::string& bytes, std::string* metadata) {
    if (bytes.size() < 16 || bytes.compare(0, 4, "BTEF") != 0) {
        throw std::runtime_error("BTEF: bad magic");
    }
    const auto w = get_u32(bytes, 4);
    const auto h = get_u32(bytes, 8);
    const auto c = get_u32(bytes, 12);
    if (c != 3) {
        throw std::runtime_error("BTEF: expected 3 channels, found " + std::to_string(c));
    }
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::size_t pos = 16;
    if (bytes.size() < pos + 3 * n * 4) {
        throw std::runtime_error("BTEF: truncated data");
    }
    HintImage hint;
    for (auto& ch : hint.channels) {
        std::vector<float> values(n);
        for (auto& v : values) {
            v = std::bit_cast<float>(get_u32(bytes, pos));
            pos += 4;
        }
        ch = Channel(static_cast<int>(w), static_cast<int>(h), std::move(values));
    }
    if (pos < bytes.size()) {
        if (bytes.compare(pos, 4, "META") != 0) {
            throw std::runtime_error("BTEF: unexpected trailing bytes");
        }
        const auto len = get_u32(bytes, pos + 4);
        if (pos + 8 + len != bytes.size()) {
            throw std::runtime_error("BTEF: metadata length mismatch");
        }
        if (metadata) {
            *metadata = bytes.substr(pos + 8, len);
        }
    } else if (metadata) {
        metadata->clear();
    }
    return hint;
}

void write_btef(const std::filesystem::path& path, const HintImage& hint, const std::string& metadata) {
    write_file_atomic(path, encode_btef(hint, metadata));
}

HintImage read_btef(const std::filesystem::path& path, std::string* metadata) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_btef(ss.str(), metadata);
}

void write_hint_preview(const std::filesystem::path& path, const HintImage& hint) {
    Raster8 img;
    img.width = hint.width();
    img.height = hint.height();
    img.channels = 3;
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    for (int k = 0; k < 3; ++k) {
        const auto src = hint.channels[k].values();
        for (std::size_t i = 0; i < src.size(); ++i) {
            const double v = std::clamp((static_cast<double>(src[i]) + 1.0) * 127.5, 0.0, 255.0);
            img.pixels[i * 3 + k] = static_cast<std::uint8_t>(std::lround(v));
        }
    }
    write_raster(img, path);
}

}  // namespace vesselbez
