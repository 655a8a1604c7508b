#pragma once

#include <cstdint>
#include <random>

namespace funreg {

/**
 * Seeded generator with platform-independent output.
 *
 * std::mt19937_64 is bit-exact across standard libraries; the distribution
 * objects are not, so the transforms to uniform/normal/bounded integers are
 * done here.
 */
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; consumes two draws per pair of outputs.
    double normal();

    /// Uniform integer in [0, bound), bound > 0, by rejection.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace funreg
