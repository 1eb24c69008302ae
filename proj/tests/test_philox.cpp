#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdint>

#include "rotor/philox.hpp"

using namespace rotor;

TEST_CASE("philox block matches the published 4x32-10 vectors") {
    // Known-answer vectors for Philox-4x32 with 10 rounds (Random123 test set).
    const auto check = [](philox::Counter c, philox::Key k, std::array<std::uint32_t, 4> want) {
        const philox::Counter out = philox::block(c, k);
        CHECK(out.v0 == want[0]);
        CHECK(out.v1 == want[1]);
        CHECK(out.v2 == want[2]);
        CHECK(out.v3 == want[3]);
    };
    check({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu},
          {0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    check({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u},
          {0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
    check({0u, 0u, 0u, 0u}, {0u, 0u}, {0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
}

TEST_CASE("uniform_from_bits maps to (0, 1] and keeps order") {
    CHECK(uniform_from_bits(0) == 0x1.0p-52);
    CHECK(uniform_from_bits(~std::uint64_t{0}) == 1.0);
    CHECK(uniform_from_bits(std::uint64_t{1} << 63) > uniform_from_bits(std::uint64_t{1} << 62));
}

TEST_CASE("streams are pure functions of seed, trajectory, purpose, step") {
    const CounterRng a(42, 7, StreamPurpose::dynamics);
    const CounterRng b(42, 7, StreamPurpose::dynamics);
    for (std::uint64_t k = 0; k < 100; ++k) {
        CHECK(a.uniform(k) == b.uniform(k));
        CHECK(a.normal(k) == b.normal(k));
    }

    const CounterRng other_seed(43, 7, StreamPurpose::dynamics);
    const CounterRng other_traj(42, 8, StreamPurpose::dynamics);
    const CounterRng other_purpose(42, 7, StreamPurpose::gibbs);
    int equal = 0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        equal += a.uniform(k) == other_seed.uniform(k);
        equal += a.uniform(k) == other_traj.uniform(k);
        equal += a.uniform(k) == other_purpose.uniform(k);
    }
    CHECK(equal == 0);
}

TEST_CASE("uniforms stay inside (0, 1]") {
    const CounterRng rng(1, 0, StreamPurpose::synthetic);
    for (std::uint64_t k = 0; k < 10000; ++k) {
        const auto pair = rng.uniform_pair(k);
        CHECK(pair[0] > 0.0);
        CHECK(pair[0] <= 1.0);
        CHECK(pair[1] > 0.0);
        CHECK(pair[1] <= 1.0);
    }
}

TEST_CASE("normal pairs share one block through the Box-Muller radius") {
    const CounterRng rng(5, 3, StreamPurpose::synthetic);
    for (std::uint64_t k = 0; k < 50; ++k) {
        const double even = rng.normal(2 * k);
        const double odd = rng.normal(2 * k + 1);
        const double radius_sq = -2.0 * std::log(rng.uniform_pair(k)[0]);
        CHECK(even * even + odd * odd == doctest::Approx(radius_sq).epsilon(1e-12));
    }
}

TEST_CASE("gaussian stream has unit moments and no lag correlation") {
    const CounterRng rng(11, 0, StreamPurpose::synthetic);
    const std::uint64_t n = 40000;
    double sum = 0.0, sum_sq = 0.0, sum_cu = 0.0, lag = 0.0;
    double prev = rng.normal(0);
    for (std::uint64_t k = 0; k < n; ++k) {
        const double z = rng.normal(k);
        sum += z;
        sum_sq += z * z;
        sum_cu += z * z * z;
        if (k > 0) lag += z * prev;
        prev = z;
    }
    const double mean = sum / static_cast<double>(n);
    const double var = sum_sq / static_cast<double>(n) - mean * mean;
    CHECK(std::fabs(mean) < 0.02);
    CHECK(std::fabs(var - 1.0) < 0.04);
    CHECK(std::fabs(sum_cu / static_cast<double>(n)) < 0.06);
    CHECK(std::fabs(lag / static_cast<double>(n - 1)) < 0.02);
}
