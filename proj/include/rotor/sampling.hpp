// Deterministic low-discrepancy state samples for certification and
// supremum estimation.
//
// Samples are Halton points mapped region-exactly: the momentum plane is
// parameterized by radius and by angle inside each region's sector, so no
// rejection is needed and doubling a plan appends points (the first half of
// the doubled plan is the original sample). Suprema estimated on nested
// plans are monotone under doubling, which makes the stability checks
// meaningful.
//
// Fixed enrichment grids probe the places analysis says dominate: the inner
// edge of the radial blend, the rise of the angular cutoff where p2 - p1 is
// smallest, and the band |p1| <= 3.5 where the e^{beta_minus H} drift bound
// changes sign.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rotor/params.hpp"
#include "rotor/state.hpp"

namespace rotor {

inline double halton(std::uint64_t index, unsigned base) {
    double f = 1.0;
    double r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

struct SamplePlan {
    std::size_t count = 100000;
    double momentum_cap = 1000.0;
    bool include_enrichment = true;
    std::uint64_t index_offset = 0;
};

namespace detail {

inline State state_from_polar(double n, double theta, double q1, double s) {
    return State{q1, q1 + s, n * std::cos(theta), n * std::sin(theta)};
}

inline State state_from_ratio(double p2, double ratio, double sign1, double sign2, double q1, double s) {
    return State{q1, q1 + s, sign1 * p2 / ratio, sign2 * p2};
}

}  // namespace detail

// One Halton state of the certification stream. Indices are congruence-split
// over the four regions so each holds an exact quarter of any plan.
inline State certification_state(std::uint64_t index, double delta, double cap) {
    const std::uint64_t i = index + 1;
    const double u_rad = halton(i, 2);
    const double u_ang = halton(i, 3);
    const double u_sec = halton(i, 5);
    const double q1 = kTwoPi * halton(i, 7);
    const double s = kTwoPi * halton(i, 11);
    const double theta1 = std::atan(1.0 + delta);
    const double theta2 = std::atan(1.0 + 2.0 * delta);

    switch (index % 4) {
        case 0: {  // Omega0: area-uniform on the unit disc
            const double n = std::sqrt(u_rad);
            return detail::state_from_polar(n, kTwoPi * u_ang, q1, s);
        }
        case 1: {  // Omega1: |tan theta| <= 1+delta, log-uniform radius
            const double n = std::exp(u_rad * std::log(cap));
            const double base = -theta1 + 2.0 * theta1 * u_ang;
            const double theta = (u_sec < 0.5) ? base : base + M_PI;
            return detail::state_from_polar(n, theta, q1, s);
        }
        case 2: {  // Omega2: transition sectors, four mirror copies
            const double n = std::exp(u_rad * std::log(cap));
            const double t = theta1 + (theta2 - theta1) * u_ang;
            const int sector = static_cast<int>(u_sec * 4.0) & 3;
            const double theta = (sector == 0) ? t : (sector == 1) ? M_PI - t : (sector == 2) ? -t : t - M_PI;
            return detail::state_from_polar(n, theta, q1, s);
        }
        default: {  // Omega3: around the p2 axis
            const double n = std::exp(u_rad * std::log(cap));
            const double t = theta2 + (M_PI - 2.0 * theta2) * u_ang;
            const double theta = (u_sec < 0.5) ? t : -t;
            return detail::state_from_polar(n, theta, q1, s);
        }
    }
}

// One Halton state of the cone stream (Omega2 u Omega3 with |p2| <= cap),
// parameterized by |p2| >= 1 so the region membership is exact.
inline State cone_state(std::uint64_t index, double delta, double cap) {
    const std::uint64_t i = index + 1;
    const double u_p2 = halton(i, 2);
    const double u_rat = halton(i, 3);
    const double u_sgn = halton(i, 5);
    const double q1 = kTwoPi * halton(i, 7);
    const double s = kTwoPi * halton(i, 11);

    const double p2 = std::exp(u_p2 * std::log(cap));
    double ratio;
    if (index % 2 == 0) {
        ratio = (1.0 + delta) + delta * u_rat;  // Omega2 band
    } else {
        // Omega3: uniform in 1/ratio over (0, 1/(1+2delta)], ratio = inf at 0
        const double inv = u_rat / (1.0 + 2.0 * delta);
        ratio = (inv < 1e-300) ? 1e300 : 1.0 / inv;
    }
    const int bits = static_cast<int>(u_sgn * 4.0) & 3;
    const double sign1 = (bits & 1) ? -1.0 : 1.0;
    const double sign2 = (bits & 2) ? -1.0 : 1.0;
    return detail::state_from_ratio(p2, ratio, sign1, sign2, q1, s);
}

// Fixed grids shared by the enrichment sets.
std::vector<State> certification_enrichment(double delta, double cap);
std::vector<State> cone_enrichment(double delta);

std::vector<State> build_certification_sample(const SamplePlan& plan, double delta);
std::vector<State> build_cone_sample(const SamplePlan& plan, double delta);

}  // namespace rotor
