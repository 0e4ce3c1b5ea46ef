#include "rramcmc/random_stream.hpp"

#include <cmath>
#include <numbers>

namespace rramcmc {

double RandomStream::normal(double mean, double sd) {
    ++normal_draws_;
    const double u1 = unit_positive();  // (0,1]: log(u1) is finite
    const double u2 = unit_half_open();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t RandomStream::derive_seed(std::uint64_t master, std::uint64_t index) {
    // splitmix64 finalizer over master advanced by index steps of the golden gamma.
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace rramcmc
