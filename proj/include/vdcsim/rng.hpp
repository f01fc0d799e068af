#ifndef VDCSIM_RNG_HPP
#define VDCSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace vdcsim {

// mt19937_64 with hand-rolled distribution transforms. The engine's output
// sequence is pinned by the standard; the std::*_distribution adaptors are
// not, and generated traces must be stable across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Inclusive integer range.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        // Rejection sampling keeps the draw exactly uniform.
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    double normal() {
        // Box-Muller; one value per call keeps the draw order obvious.
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

private:
    std::mt19937_64 eng_;
};

} // namespace vdcsim

#endif
