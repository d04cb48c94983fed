#include "oracles.hpp"
#include "vesselbez/bezier.hpp"
#include "vesselbez/encode.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace vesselbez;

namespace {

const CubicBezier kWiggle{{{{0.0, 0.0}, {10.0, 25.0}, {30.0, -15.0}, {40.0, 5.0}}}};

std::vector<Point2> sample(const CubicBezier& b, const std::vector<double>& t) {
    std::vector<Point2> out;
    for (double v : t) {
        out.push_back(eval(b, v));
    }
    return out;
}

// Arc-length parameters of a curve, by inverting the quadrature arc length with bisection.
std::vector<double> arc_parameters(const CubicBezier& b, int n) {
    const double total = arc_length(b);
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) {
        const double target = total * i / (n - 1);
        double lo = 0.0, hi = 1.0;
        for (int k = 0; k < 100; ++k) {
            const double mid = 0.5 * (lo + hi);
            (arc_length(b, 0.0, mid) < target ? lo : hi) = mid;
        }
        t[i] = 0.5 * (lo + hi);
    }
    t.front() = 0.0;
    t.back() = 1.0;
    return t;
}

}  // namespace

TEST(Eval, EndpointsAndMidpoint) {
    EXPECT_EQ(eval(kWiggle, 0.0), kWiggle.p[0]);
    EXPECT_EQ(eval(kWiggle, 1.0), kWiggle.p[3]);
    const Point2 mid = 0.125 * (kWiggle.p[0] + 3.0 * kWiggle.p[1] + 3.0 * kWiggle.p[2] + kWiggle.p[3]);
    EXPECT_NEAR(eval(kWiggle, 0.5).x, mid.x, 1e-12);
    EXPECT_NEAR(eval(kWiggle, 0.5).y, mid.y, 1e-12);
}

TEST(Eval, PartitionOfUnity) {
    const Point2 q{3.25, -7.5};
    const CubicBezier b{{q, q, q, q}};
    for (int i = 0; i <= 10; ++i) {
        EXPECT_NEAR(eval(b, i / 10.0).x, q.x, 1e-12);
        EXPECT_NEAR(eval(b, i / 10.0).y, q.y, 1e-12);
    }
}

TEST(Eval, OutOfRangeThrows) {
    EXPECT_THROW(eval(kWiggle, -0.01), std::domain_error);
    EXPECT_THROW(eval(kWiggle, 1.01), std::domain_error);
}

TEST(ArcLength, StraightAndDegenerate) {
    EXPECT_NEAR(arc_length(CubicBezier{{{{0, 0}, {1, 0}, {2, 0}, {3, 0}}}}), 3.0, 1e-12);
    EXPECT_EQ(arc_length(CubicBezier{{{{1, 1}, {1, 1}, {1, 1}, {1, 1}}}}), 0.0);
}

TEST(ArcLength, QuarterCircle) {
    const auto q = oracle::quarter_circle(10.0);
    EXPECT_NEAR(arc_length(q), 10.0 * std::numbers::pi / 2.0, 10.0 * std::numbers::pi / 2.0 * 1e-3);
    EXPECT_NEAR(arc_length(q), oracle::dense_arc(q), oracle::dense_arc(q) * 1e-5);
}

TEST(ArcLength, AgreesWithDenseOracleAndBoundsChord) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int k = 0; k < 50; ++k) {
        const CubicBezier b{{{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}}};
        const double dense = oracle::dense_arc(b);
        EXPECT_NEAR(arc_length(b), dense, dense * 1e-5);
        EXPECT_GE(arc_length(b), b.chord());
    }
}

TEST(Curvature, StraightIsZero) {
    const CubicBezier b{{{{0, 0}, {1, 1}, {2, 2}, {3, 3}}}};
    for (int i = 0; i <= 10; ++i) {
        EXPECT_NEAR(*curvature(b, i / 10.0), 0.0, 1e-12);
    }
}

TEST(Curvature, QuarterCircleMidpoint) {
    EXPECT_NEAR(*curvature(oracle::quarter_circle(10.0), 0.5), 0.1, 0.002);
}

TEST(Curvature, ScalingHalves) {
    CubicBezier big = kWiggle;
    for (auto& p : big.p) {
        p = 2.0 * p;
    }
    for (int i = 0; i <= 10; ++i) {
        EXPECT_NEAR(*curvature(big, i / 10.0), 0.5 * *curvature(kWiggle, i / 10.0), 1e-12);
    }
}

TEST(Curvature, VanishingDerivativeFlagged) {
    const CubicBezier b{{{{1, 1}, {1, 1}, {1, 1}, {1, 1}}}};
    EXPECT_FALSE(curvature(b, 0.5).has_value());
}

TEST(Chunking, Examples) {
    EXPECT_EQ(chunk_polyline(30), (std::vector<ChunkRange>{{0, 29}}));
    EXPECT_EQ(chunk_polyline(56), (std::vector<ChunkRange>{{0, 29}, {26, 55}}));
    EXPECT_EQ(chunk_polyline(33), (std::vector<ChunkRange>{{0, 29}, {26, 32}}));
    EXPECT_EQ(chunk_polyline(5), (std::vector<ChunkRange>{{0, 4}}));
    EXPECT_EQ(chunk_polyline(34), (std::vector<ChunkRange>{{0, 29}, {26, 33}}));
    EXPECT_EQ(chunk_polyline(59), (std::vector<ChunkRange>{{0, 29}, {26, 55}, {52, 58}}));
    EXPECT_THROW(chunk_polyline(4), std::invalid_argument);
}

TEST(Chunking, OverlapIsFourEverywhere) {
    for (std::size_t n = 5; n < 400; ++n) {
        const auto chunks = chunk_polyline(n);
        EXPECT_EQ(chunks.front().first, 0);
        EXPECT_EQ(chunks.back().last, int(n) - 1);
        for (std::size_t k = 0; k < chunks.size(); ++k) {
            EXPECT_GE(chunks[k].last - chunks[k].first + 1, kMinPolylinePoints);
            if (k > 0) {
                EXPECT_EQ(chunks[k - 1].last - chunks[k].first + 1, kChunkOverlap);
            }
        }
    }
}

TEST(Fit, RecoversKnownCubicAtItsParameters) {
    const auto t = arc_parameters(kWiggle, 30);
    const auto fit = fit_cubic_with_parameters(sample(kWiggle, t), t);
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(fit.curve.p[i].x, kWiggle.p[i].x, 1e-6);
        EXPECT_NEAR(fit.curve.p[i].y, kWiggle.p[i].y, 1e-6);
    }
    EXPECT_LT(fit.rms_residual, 1e-9);
    EXPECT_FALSE(fit.fallback);
}

TEST(Fit, DensePolylineFitStaysOnTheCurve) {
    // Chord parameters differ from the curve's own t, so control points are not recovered exactly,
    // but the fitted shape stays close.
    const auto t = arc_parameters(kWiggle, 400);
    const auto fit = fit_cubic(sample(kWiggle, t));
    EXPECT_LT(fit.rms_residual, 1.0);
    EXPECT_NEAR(arc_length(fit.curve), arc_length(kWiggle), 0.02 * arc_length(kWiggle));
}

TEST(Fit, CollinearPoints) {
    std::vector<Point2> pts;
    for (int i = 0; i < 30; ++i) {
        pts.push_back({2.0 * i, 1.0 * i});
    }
    const auto fit = fit_cubic(pts);
    for (int i = 0; i <= 100; ++i) {
        const Point2 q = eval(fit.curve, i / 100.0);
        EXPECT_NEAR(q.y - 0.5 * q.x, 0.0, 1e-6);
    }
}

TEST(Fit, EndpointsClamped) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int k = 0; k < 20; ++k) {
        std::vector<Point2> pts;
        for (int i = 0; i < 12; ++i) {
            pts.push_back({u(rng), u(rng)});
        }
        const auto fit = fit_cubic(pts);
        EXPECT_EQ(fit.curve.p[0], pts.front());
        EXPECT_EQ(fit.curve.p[3], pts.back());
    }
}

TEST(Fit, IdempotentOnOwnSamples) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 60.0);
    for (int k = 0; k < 20; ++k) {
        std::vector<Point2> pts;
        for (int i = 0; i < 30; ++i) {
            pts.push_back({2.0 * i + u(rng) * 0.1, u(rng) * 0.2});
        }
        const auto t = chord_length_parameters(pts);
        const auto first = fit_cubic_with_parameters(pts, t);
        const auto again = fit_cubic_with_parameters(sample(first.curve, t), t);
        for (int i = 0; i < 4; ++i) {
            EXPECT_NEAR(again.curve.p[i].x, first.curve.p[i].x, 1e-6);
            EXPECT_NEAR(again.curve.p[i].y, first.curve.p[i].y, 1e-6);
        }
    }
}

TEST(Fit, SingularFallsBackToChordInterpolant) {
    const std::vector<Point2> pts{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
    const std::vector<double> t{0.0, 0.0, 0.0, 0.0, 1.0};
    const auto fit = fit_cubic_with_parameters(pts, t);
    EXPECT_TRUE(fit.fallback);
    EXPECT_NEAR(fit.curve.p[1].x, 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(fit.curve.p[2].x, 8.0 / 3.0, 1e-12);
}

TEST(Fit, Errors) {
    const std::vector<Point2> few{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
    EXPECT_THROW(fit_cubic(few), std::invalid_argument);
    const std::vector<Point2> loop{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
    EXPECT_THROW(fit_cubic(loop), std::invalid_argument);
}

TEST(SplitTail, MatchesOriginalCurve) {
    const auto tail = split_tail(kWiggle, 0.3);
    EXPECT_EQ(tail.p[3], kWiggle.p[3]);
    for (int i = 0; i <= 10; ++i) {
        const double s = i / 10.0;
        const Point2 a = eval(tail, s);
        const Point2 b = eval(kWiggle, 0.3 + 0.7 * s);
        EXPECT_NEAR(a.x, b.x, 1e-9);
        EXPECT_NEAR(a.y, b.y, 1e-9);
    }
    EXPECT_NEAR(arc_length(tail), arc_length(kWiggle, 0.3, 1.0), 1e-9);
}

TEST(LinkParents, NearestWithinToleranceAndAcyclic) {
    BezierTree t;
    t.segments.push_back({1, kNoParent, {{{{0, 0}, {1, 0}, {2, 0}, {10, 0}}}}, 1.0});
    t.segments.push_back({2, kNoParent, {{{{10.5, 0}, {12, 0}, {14, 0}, {20, 0}}}}, 1.0});
    t.segments.push_back({3, kNoParent, {{{{10, 1}, {10, 3}, {10, 5}, {10, 9}}}}, 1.0});
    t.segments.push_back({4, kNoParent, {{{{50, 50}, {51, 50}, {52, 50}, {53, 50}}}}, 1.0});
    link_parents(t);
    EXPECT_EQ(t.find(1)->parent, kNoParent);
    EXPECT_EQ(t.find(2)->parent, 1);
    EXPECT_EQ(t.find(3)->parent, 1);
    EXPECT_EQ(t.find(4)->parent, kNoParent);
    EXPECT_TRUE(parents_acyclic(t));
}

TEST(LinkParents, EncodedTreeEndpointsCoincide) {
    VesselMask m(128, 128);
    for (int c = 10; c <= 110; ++c) {
        m.set(64, c, true);
    }
    const auto enc = encode_mask(m);
    ASSERT_GE(enc.tree.segments.size(), 2u);
    EXPECT_TRUE(parents_acyclic(enc.tree));
    for (const auto& s : enc.tree.segments) {
        if (s.parent == kNoParent) {
            continue;
        }
        const auto* p = enc.tree.find(s.parent);
        ASSERT_NE(p, nullptr);
        const double d = std::min(distance(p->curve.p[3], s.curve.p[0]), distance(p->curve.p[0], s.curve.p[0]));
        EXPECT_LE(d, 1.5);
    }
}
