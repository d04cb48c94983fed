#pragma once

#include "vesselbez/cfstats.hpp"

#include <cstdio>
#include <random>
#include <string>

namespace fixture {

inline std::string start_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "s%04d", i);
    return buf;
}

// 500 starts with a baseline record each; exactly 350 pass the fidelity filter. The 150 failures
// are spread over the four rejection reasons, including values sitting exactly on the thresholds.
// Every start also gets a tortuosity_4x record.
inline vesselbez::ScoreTable fidelity_500(std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> prob(0.0, 1.0);
    vesselbez::ScoreTable t;
    for (int i = 0; i < 500; ++i) {
        vesselbez::ScoreRecord r{start_name(i), "baseline", prob(rng), 100.0, 40.0, 1.6};
        if (i >= 350) {
            switch (i % 6) {
                case 0: r.mean_intensity = 49.9; break;
                case 1: r.mean_intensity = 170.5; break;
                case 2: r.std_intensity = 25.0; break;    // std must exceed 25
                case 3: r.rg_ratio = 1.3; break;          // ratio must exceed 1.3
                case 4: r.rg_ratio = 0.9; break;
                default: r.std_intensity = 3.0; break;
            }
        } else if (i % 7 == 0) {
            r.mean_intensity = i % 2 ? 50.0 : 170.0;  // inclusive bounds pass
        }
        t.add(r);
        t.add({r.start_id, "tortuosity_4x", std::min(1.0, r.prob + 0.3 * prob(rng)), 100.0, 40.0, 1.6});
    }
    return t;
}

}  // namespace fixture
