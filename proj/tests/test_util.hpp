#ifndef DCAVITY_TEST_UTIL_HPP
#define DCAVITY_TEST_UTIL_HPP

#include <random>

#include "dcavity/device.hpp"

namespace dcavity::testing {

// Random resonant device: every segment an integer number of half waves so
// the carrier-referenced phase evaluation applies, reflectivities
// log-uniform. Lossless by default; with_loss draws absorptions in
// [0, max_loss]. The reflectivity floors keep the relaxation-oracle
// lifetimes (~ 4/(R1 R2) sweeps) tractable.
inline DeviceParams random_device(std::mt19937& rng, bool with_loss = false,
                                  double max_loss = 1e-3) {
    std::uniform_int_distribution<long> halfwaves(2, 120);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) {
        return lo * std::pow(hi / lo, unit(rng));
    };

    DeviceParams p;
    p.geometry.lambda0 = 795e-9;
    p.geometry.L1 = static_cast<double>(halfwaves(rng)) * p.geometry.lambda0 / 2.0;
    p.geometry.L2 = static_cast<double>(halfwaves(rng)) * p.geometry.lambda0 / 2.0;
    p.geometry.L3 = static_cast<double>(halfwaves(rng)) * p.geometry.lambda0 / 2.0;
    p.geometry.L4 = static_cast<double>(halfwaves(rng)) * p.geometry.lambda0 / 2.0;
    p.geometry.L5 = static_cast<double>(halfwaves(rng)) * p.geometry.lambda0 / 2.0;

    const double R1 = log_uniform(0.05, 0.5);
    const double R2 = log_uniform(1e-3, 0.3);
    double A1 = 0.0, A2 = 0.0;
    if (with_loss) {
        A1 = unit(rng) * max_loss;
        A2 = unit(rng) * max_loss;
        p.m1.A = unit(rng) * max_loss;
        p.m2.A = unit(rng) * max_loss;
        p.m3.A = unit(rng) * max_loss;
        p.m4.A = unit(rng) * max_loss;
    }
    p.bs1 = {R1, 1.0 - R1 - A1, A1};
    p.bs2 = {R2, 1.0 - R2 - A2, A2};
    return p;
}

} // namespace dcavity::testing

#endif
