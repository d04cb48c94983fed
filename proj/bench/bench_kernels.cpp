#include "vesselbez/encode.hpp"
#include "vesselbez/hint.hpp"
#include "vesselbez/mask.hpp"
#include "vesselbez/skeleton.hpp"
#include "vesselbez/synth.hpp"

#include <benchmark/benchmark.h>

using namespace vesselbez;

namespace {

struct Scene {
    VesselMask mask;
    Encoding enc;
    Channel ch1;
};

const Scene& scene() {
    static const Scene s = [] {
        SynthSpec spec;
        spec.seed = 3;
        spec.depth = 7;
        const auto st = generate_tree(spec);
        Scene out{rasterize_tree(st.tree, 512, 512), {}, {}};
        out.enc = encode_mask(out.mask);
        out.ch1 = render_channel1(out.enc.tree, out.enc.field);
        return out;
    }();
    return s;
}

void BM_distance_transform(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(distance_transform(scene().mask));
    }
}

void BM_distance_transform_serial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(distance_transform_serial(scene().mask));
    }
}

void BM_skeletonize(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(skeletonize(scene().mask));
    }
}

void BM_skeletonize_serial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(skeletonize_serial(scene().mask));
    }
}

void BM_channel1(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_channel1(scene().enc.tree, scene().enc.field));
    }
}

void BM_channel1_serial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(render_channel1_serial(scene().enc.tree, scene().enc.field));
    }
}

void BM_gaussian(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(gaussian_smooth(scene().ch1));
    }
}

void BM_gaussian_serial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(gaussian_smooth_serial(scene().ch1));
    }
}

}  // namespace

BENCHMARK(BM_distance_transform)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_distance_transform_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_skeletonize)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_skeletonize_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_channel1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_channel1_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gaussian)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gaussian_serial)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    scene();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) {
        return 1;
    }
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
