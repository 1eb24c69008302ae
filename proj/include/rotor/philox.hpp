// Counter-based random streams (Philox-4x32-10).
//
// Every random number is a pure function of (master seed, trajectory index,
// purpose, step), so ensembles can be evaluated in any order, on any worker
// count, with bit-identical results. The key holds the trajectory index and
// a purpose tag; the counter holds the step index and the master seed.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace rotor {

namespace philox {

inline constexpr std::uint32_t kMult0 = 0xD2511F53u;
inline constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

struct Counter {
    std::uint32_t v0, v1, v2, v3;
};

struct Key {
    std::uint32_t k0, k1;
};

inline Counter round_once(Counter c, Key k) {
    const std::uint64_t prod0 = static_cast<std::uint64_t>(kMult0) * c.v0;
    const std::uint64_t prod1 = static_cast<std::uint64_t>(kMult1) * c.v2;
    const std::uint32_t lo0 = static_cast<std::uint32_t>(prod0);
    const std::uint32_t hi0 = static_cast<std::uint32_t>(prod0 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(prod1);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(prod1 >> 32);
    return Counter{hi1 ^ c.v1 ^ k.k0, lo1, hi0 ^ c.v3 ^ k.k1, lo0};
}

inline Counter block(Counter c, Key k) {
    for (int r = 0; r < 10; ++r) {
        c = round_once(c, k);
        if (r < 9) k = Key{k.k0 + kWeyl0, k.k1 + kWeyl1};
    }
    return c;
}

}  // namespace philox

// Mantissa-filling map from 64 bits to a uniform double on (0, 1].
inline double uniform_from_bits(std::uint64_t u) {
    return static_cast<double>((u >> 12) + 1) * 0x1.0p-52;
}

enum class StreamPurpose : std::uint32_t {
    dynamics = 1,
    initial_conditions = 2,
    bootstrap = 3,
    synthetic = 4,
    gibbs = 5,
};

// One logical stream per (seed, trajectory, purpose). Values are addressed
// by step index; nothing is stored between calls.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t trajectory, StreamPurpose purpose)
        : key_{static_cast<std::uint32_t>(trajectory), static_cast<std::uint32_t>(purpose)},
          seed_lo_(static_cast<std::uint32_t>(seed)),
          seed_hi_(static_cast<std::uint32_t>(seed >> 32)) {}

    philox::Counter block_at(std::uint64_t step) const {
        return philox::block(philox::Counter{static_cast<std::uint32_t>(step),
                                             static_cast<std::uint32_t>(step >> 32), seed_lo_, seed_hi_},
                             key_);
    }

    // Two independent uniforms on (0, 1] from one block.
    std::array<double, 2> uniform_pair(std::uint64_t step) const {
        const philox::Counter out = block_at(step);
        const std::uint64_t a = (static_cast<std::uint64_t>(out.v0) << 32) | out.v1;
        const std::uint64_t b = (static_cast<std::uint64_t>(out.v2) << 32) | out.v3;
        return {uniform_from_bits(a), uniform_from_bits(b)};
    }

    double uniform(std::uint64_t step) const { return uniform_pair(step)[0]; }

    // Box-Muller pair from the block at step/2; the low bit picks the member,
    // so consecutive steps consume the pair in order.
    double normal(std::uint64_t step) const {
        const auto u = uniform_pair(step >> 1);
        const double r = std::sqrt(-2.0 * std::log(u[0]));
        const double angle = 2.0 * M_PI * u[1];
        return (step & 1) ? r * std::sin(angle) : r * std::cos(angle);
    }

  private:
    philox::Key key_;
    std::uint32_t seed_lo_, seed_hi_;
};

}  // namespace rotor
