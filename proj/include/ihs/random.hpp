#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ihs {

/// Seeded generator with distribution code fixed here rather than taken
/// from the standard library, so sampled points are identical on every
/// platform for a given seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal()
    {
        // Box-Muller; the second variate is discarded.
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t index(std::uint64_t bound) { return engine_() % bound; }

private:
    std::mt19937_64 engine_;
};

}  // namespace ihs
