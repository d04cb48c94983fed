#include "oracles.hpp"
#include "vesselbez/encode.hpp"
#include "vesselbez/hint.hpp"
#include "vesselbez/perturb.hpp"
#include "vesselbez/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

using namespace vesselbez;

namespace {

double channel_sum(const Channel& c) {
    double s = 0.0;
    for (float v : c.values()) {
        s += v;
    }
    return s;
}

struct Scene {
    SynthTree st;
    VesselMask mask;
    RadiusField field;
};

Scene scene(std::uint64_t seed) {
    SynthSpec spec;
    spec.seed = seed;
    spec.depth = 3;
    Scene s{generate_tree(spec), {}, {}};
    s.mask = rasterize_tree(s.st.tree, 512, 512);
    s.field = distance_transform(s.mask);
    return s;
}

}  // namespace

TEST(Channel0, Normalisation) {
    RadiusField f(8, 8, 0.0);
    f(2, 3) = 8.0;
    f(4, 4) = 4.0;
    const auto c = render_channel0(f);
    EXPECT_FLOAT_EQ(c(4, 4), 0.5f);
    EXPECT_EQ(c(2, 3), 1.0f);
    EXPECT_EQ(*std::max_element(c.values().begin(), c.values().end()), 1.0f);
    EXPECT_EQ(channel_sum(render_channel0(RadiusField(8, 8, 0.0))), 0.0);
}

TEST(Channel1, EmptyTreeIsZero) {
    EXPECT_EQ(channel_sum(render_channel1(BezierTree{}, RadiusField(32, 32, 1.0))), 0.0);
}

TEST(Channel1, SampleCounts) {
    EXPECT_EQ(render_sample_count({{{{0, 0}, {1, 0}, {3, 0}, {5, 0}}}}), 20);
    EXPECT_EQ(render_sample_count({{{{0, 0}, {10, 0}, {40, 0}, {50, 0}}}}), 100);
    EXPECT_EQ(render_sample_count({{{{0, 0}, {10, 0}, {40, 0}, {50.2, 0}}}}), 101);
}

TEST(Channel1, DiagonalBandMatchesAnalyticArea) {
    VesselMask m(512, 512);
    for (int k = 100; k <= 200; ++k) {
        m.set(k, k, true);
    }
    const auto field = distance_transform(m);
    BezierTree t;
    t.segments.push_back({1, kNoParent, {{{{100, 100}, {133, 133}, {166, 166}, {200, 200}}}}, 1.0});
    const auto c = render_channel1(t, field);
    const double covered = channel_sum(c);
    const double length = 100.0 * std::sqrt(2.0);
    const double r = 1.0;
    const double analytic = 2.0 * r * length + M_PI * r * r;
    EXPECT_NEAR(covered, analytic, 0.15 * analytic);
    for (int k = 100; k <= 200; ++k) {
        EXPECT_EQ(c(k, k), 1.0f);
    }
    for (float v : c.values()) {
        EXPECT_TRUE(v == 0.0f || v == 1.0f);
    }
}

TEST(Channel1, BackgroundSamplesUseStoredRadius) {
    BezierTree t;
    t.segments.push_back({1, kNoParent, {{{{10, 20}, {20, 20}, {30, 20}, {40, 20}}}}, 2.0});
    const auto c = render_channel1(t, RadiusField(64, 64, 0.0));
    EXPECT_EQ(c(20, 25), 1.0f);
    EXPECT_EQ(c(21, 25), 1.0f);
    EXPECT_EQ(c(22, 10), 1.0f);
    EXPECT_EQ(c(23, 25), 0.0f);
}

TEST(Channel1, ParallelMatchesSerial) {
    for (std::uint64_t seed : {1u, 2u}) {
        const auto s = scene(seed);
        const auto enc = encode_mask(s.mask);
        EXPECT_EQ(render_channel1(enc.tree, enc.field), render_channel1_serial(enc.tree, enc.field));
    }
}

TEST(Gaussian, KernelMatchesOracle) {
    const auto k = oracle::gaussian_kernel_2d(2.0);
    const auto taps = gaussian_taps();
    for (int i = 0; i < 7; ++i) {
        for (int j = 0; j < 7; ++j) {
            EXPECT_NEAR(taps[i] * taps[j], k[i * 7 + j], 1e-15);
        }
    }
    EXPECT_NEAR(k[3 * 7 + 3], 0.0467018, 1e-7);
}

TEST(Gaussian, ConstantStaysConstant) {
    const auto out = gaussian_smooth(Channel(40, 30, 0.7f));
    for (float v : out.values()) {
        EXPECT_NEAR(v, 0.7f, 1e-6);
    }
}

TEST(Gaussian, ImpulseGivesKernel) {
    Channel c(31, 31, 0.0f);
    c(15, 15) = 1.0f;
    const auto out = gaussian_smooth(c);
    const auto k = oracle::gaussian_kernel_2d(2.0);
    EXPECT_NEAR(out(15, 15), 0.0467018, 1e-7);
    for (int dr = -3; dr <= 3; ++dr) {
        for (int dc = -3; dc <= 3; ++dc) {
            EXPECT_NEAR(out(15 + dr, 15 + dc), k[(dr + 3) * 7 + dc + 3], 1e-7);
        }
    }
    EXPECT_EQ(out(15, 19), 0.0f);
    EXPECT_NEAR(channel_sum(out), 1.0, 1e-6);
}

TEST(Gaussian, MassConservedAwayFromBorders) {
    std::mt19937_64 rng(8);
    Channel c(64, 64, 0.0f);
    for (int r = 8; r < 56; ++r) {
        for (int col = 8; col < 56; ++col) {
            c(r, col) = (rng() % 3 == 0) ? 1.0f : 0.0f;
        }
    }
    EXPECT_NEAR(channel_sum(gaussian_smooth(c)), channel_sum(c), 1e-3);
}

TEST(Gaussian, ReflectBorders) {
    Channel c(16, 16, 0.0f);
    c(0, 0) = 1.0f;
    const auto out = gaussian_smooth(c);
    // reflect-101 keeps the corner impulse unmirrored at the corner itself.
    EXPECT_NEAR(out(0, 0), 0.0467018, 1e-7);
    EXPECT_GT(channel_sum(out), 0.0);
}

TEST(Gaussian, ParallelMatchesSerial) {
    std::mt19937_64 rng(4);
    Channel c(97, 61, 0.0f);
    for (auto& v : c.values()) {
        v = float(rng() % 1000) / 1000.0f;
    }
    EXPECT_EQ(gaussian_smooth(c), gaussian_smooth_serial(c));
}

TEST(Assemble, AffineMapAndInverse) {
    Channel a(3, 1, 0.0f), b(3, 1, 0.0f), d(3, 1, 0.0f);
    a(0, 0) = 0.0f;
    a(0, 1) = 1.0f;
    a(0, 2) = 0.5f;
    const auto h = assemble_hint(a, b, d);
    EXPECT_EQ(h.channels[0](0, 0), -1.0f);
    EXPECT_EQ(h.channels[0](0, 1), 1.0f);
    EXPECT_EQ(h.channels[0](0, 2), 0.0f);
    EXPECT_EQ(to_unit_scale(h.channels[0]), a);
    EXPECT_THROW(assemble_hint(a, Channel(2, 1, 0.0f), d), std::invalid_argument);
}

TEST(Assemble, RoundTripOnRealHint) {
    const auto s = scene(3);
    const auto ch0 = render_channel0(s.field);
    const auto ch1 = render_channel1(s.st.tree, s.field);
    const auto ch2 = gaussian_smooth(ch1);
    const auto h = assemble_hint(ch0, ch1, ch2);
    EXPECT_EQ(h, render_hint(s.st.tree, s.field));
    EXPECT_EQ(to_unit_scale(h.channels[1]), ch1);
    EXPECT_EQ(to_unit_scale(h.channels[0]), ch0);
    for (const auto& c : h.channels) {
        for (float v : c.values()) {
            ASSERT_GE(v, -1.0f);
            ASSERT_LE(v, 1.0f);
        }
    }
}

TEST(Invariance, Channel0AcrossConfigs) {
    const auto s = scene(5);
    const auto enc = encode_mask(s.mask);
    const auto base = render_hint(enc.tree, enc.field);
    EXPECT_EQ(channel0_invariance_report(base, base), 0.0);
    for (const auto& name : {"tortuosity_4x", "tortuosity_1x", "arc_drop_30"}) {
        const auto p = apply(config_from_name(name, 5), enc.tree, enc.field, s.mask);
        const auto h = render_hint(p.tree, p.field);
        EXPECT_EQ(h.channels[0], base.channels[0]) << name;
        EXPECT_EQ(channel0_invariance_report(base, h), 0.0) << name;
        EXPECT_LT(channel0_invariance_report(base, h), 0.022);
    }
    const auto r = apply(config_from_name("radius_x0.55", 5), enc.tree, enc.field, s.mask);
    // Per-image max normalisation cancels a global factor up to float rounding.
    EXPECT_LT(channel0_invariance_report(base, render_hint(r.tree, r.field)), 1e-6);
    EXPECT_THROW(channel0_invariance_report(base, HintImage{}), std::invalid_argument);
}

TEST(Btef, RoundTripBitExact) {
    const auto s = scene(2);
    const auto h = render_hint(s.st.tree, s.field);
    const auto bytes = encode_btef(h, "seed=2");
    EXPECT_EQ(bytes.substr(0, 4), "BTEF");
    EXPECT_EQ(bytes.size(), 16u + 3u * 512u * 512u * 4u + 8u + 6u);
    std::string meta;
    EXPECT_EQ(decode_btef(bytes, &meta), h);
    EXPECT_EQ(meta, "seed=2");
    EXPECT_EQ(decode_btef(encode_btef(h)), h);
    const auto p = std::filesystem::temp_directory_path() / "vesselbez_test.btef";
    write_btef(p, h, "x");
    EXPECT_EQ(read_btef(p), h);
}

TEST(Btef, Errors) {
    HintImage h;
    for (auto& c : h.channels) {
        c = Channel(2, 2, 0.25f);
    }
    const auto bytes = encode_btef(h);
    EXPECT_EQ(bytes.size(), 16u + 48u);
    EXPECT_THROW(decode_btef("BTEX" + bytes.substr(4)), std::runtime_error);
    EXPECT_THROW(decode_btef(bytes.substr(0, bytes.size() - 1)), std::runtime_error);
    EXPECT_THROW(decode_btef(bytes + "junk"), std::runtime_error);
    auto bad_channels = bytes;
    bad_channels[12] = 4;
    EXPECT_THROW(decode_btef(bad_channels), std::runtime_error);
    EXPECT_THROW(read_btef("/nonexistent/x.btef"), std::runtime_error);
}
