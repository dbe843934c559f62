// One-off generator for the frozen baseline targets used by the acceptance
// suite: high-rep Monte Carlo of delta_0 at M in {25, 100, 400}, r = 1,
// sigma = 1, with a pinned seed.
#include <cstdio>

#include "spl/delta.hpp"

int main() {
    const std::size_t reps = 100000;
    const std::uint64_t seed = 1000003;
    for (int m : {25, 100, 400}) {
        spl::SpectrumSpec spec;
        spec.m = m;
        spec.r = 1;
        spec.sigma = 1.0;
        spec.family.type = spl::FamilyType::Zero;
        spec.rotation.mode = spl::RotationMode::Identity;
        auto model = spl::build_model(spec);
        spl::RngStream stream(seed, 0);
        auto rep = spl::estimate_delta(model, reps, stream, false);
        std::printf("M=%d reps=%zu seed=%llu mean=%.17g stderr=%.17g norm=%.17g\n", m, reps,
                    (unsigned long long)seed, rep.delta.mean, rep.delta.stderr_, rep.normalized);
        std::fflush(stdout);
    }
    return 0;
}
