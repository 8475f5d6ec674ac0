#pragma once

#include <cmath>
#include <cstdint>

namespace mme {

// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Counter-based stream: output i of stream `key` is mix64(key + i*phi).
// Streams for independent orbits are derived as mix64(seed ^ orbit_index),
// so parallel and sequential execution see identical draws.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static CounterRng stream(std::uint64_t seed, std::uint64_t index) {
        return CounterRng(mix64(seed ^ index));
    }

    std::uint64_t next_u64() { return mix64(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

    // uniform in [0, 1), 53 mantissa bits
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n), fixed-point scaling
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // standard normal, Box-Muller (discards the second deviate)
    double next_normal() {
        double u = next_double();
        double v = next_double();
        while (u <= 0.0) u = next_double();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925 * v);
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace mme
