#pragma once

#include <cstdint>

#include <random>

namespace rramcmc {

/// Seeded random stream with counted draws.
///
/// All stochastic code in the library draws through this wrapper so that the
/// number of uniform/normal draws consumed by a run is a deterministic
/// function of the accept/reject trace, and so that results are bit-identical
/// across platforms (the normal transform is fixed here instead of delegating
/// to the implementation-defined std::normal_distribution).
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw on (0,1]. Never returns 0, so std::log of the result is finite.
    double uniform01() {
        ++uniform_draws_;
        return unit_positive();
    }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_below(std::uint64_t bound) {
        ++uniform_draws_;
        return engine_() % bound;
    }

    /// One normal draw via Box-Muller (consumes two engine words, counts as one draw).
    double normal(double mean, double sd);

    std::uint64_t uniform_draws() const { return uniform_draws_; }
    std::uint64_t normal_draws() const { return normal_draws_; }

    /// Stateless seed derivation (splitmix64 mix) for per-run / per-episode streams.
    static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

private:
    double unit_positive() {
        // 53-bit mantissa, shifted into (0,1].
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }
    double unit_half_open() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53; // [0,1)
    }

    std::mt19937_64 engine_;
    std::uint64_t uniform_draws_ = 0;
    std::uint64_t normal_draws_ = 0;
};

} // namespace rramcmc
