#pragma once

#include "vesselbez/bezier.hpp"
#include "vesselbez/mask.hpp"

#include <array>
#include <filesystem>
#include <string>

namespace vesselbez {

using Channel = Grid<float>;

/// Three stacked channels, values in [-1, 1]: 0 = normalised radius field, 1 = variable-radius
/// curve render, 2 = Gaussian-smoothed channel 1.
struct HintImage {
    std::array<Channel, 3> channels;

    int width() const { return channels[0].width(); }
    int height() const { return channels[0].height(); }
    bool operator==(const HintImage&) const = default;
};

/// field / max(field); all-zero field gives all zeros.
Channel render_channel0(const RadiusField& field);

/// Samples per segment: max(20, ceil(2 * chord)).
int render_sample_count(const CubicBezier& curve);

/// Stamps a filled disk at every sample (pixel centers within the radius, plus the nearest pixel).
/// Radius = field value at the nearest pixel, or the segment's stored radius where the sample falls
/// on background. Output is binary coverage in {0, 1}.
Channel render_channel1(const BezierTree& tree, const RadiusField& field);
Channel render_channel1_serial(const BezierTree& tree, const RadiusField& field);

inline constexpr int kGaussianSize = 7;
inline constexpr double kGaussianSigma = 2.0;

/// Normalised 1D taps; the 2D kernel is their outer product.
std::array<double, kGaussianSize> gaussian_taps(double sigma = kGaussianSigma);

/// Separable 7x7, sigma 2 convolution with reflect-101 borders.
Channel gaussian_smooth(const Channel& input);
Channel gaussian_smooth_serial(const Channel& input);

/// Maps x -> 2x - 1 per value. Throws on dimension mismatch.
HintImage assemble_hint(const Channel& ch0, const Channel& ch1, const Channel& ch2);

/// Inverse of the [-1, 1] rescale for one channel.
Channel to_unit_scale(const Channel& channel);

/// render_channel0/1, gaussian_smooth, assemble_hint.
HintImage render_hint(const BezierTree& tree, const RadiusField& field);

/// |mean(ch0_a) - mean(ch0_b)| on the [0, 1] scale.
double channel0_invariance_report(const HintImage& a, const HintImage& b);

/// "BTEF" + u32 width, height, channels (little endian) + channel-major row-major f32, followed by an
/// optional metadata block: "META" + u32 byte count + UTF-8 text.
std::string encode_btef(const HintImage& hint, const std::string& metadata = {});
HintImage decode_btef(const std::string& bytes, std::string* metadata = nullptr);
void write_btef(const std::filesystem::path& path, const HintImage& hint, const std::string& metadata = {});
HintImage read_btef(const std::filesystem::path& path, std::string* metadata = nullptr);

/// 8-bit RGB preview, [-1, 1] -> [0, 255].
void write_hint_preview(const std::filesystem::path& path, const HintImage& hint);

}  // namespace vesselbez
