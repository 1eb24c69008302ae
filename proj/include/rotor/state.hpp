// Phase point x = (q1, q2, p1, p2) on T^2 x R^2.

#pragma once

#include <cmath>

#include "rotor/potential.hpp"

namespace rotor {

struct State {
    double q1 = 0.0;  // angle in [0, 2*pi)
    double q2 = 0.0;  // angle in [0, 2*pi)
    double p1 = 0.0;
    double p2 = 0.0;

    // Relative angle s = q2 - q1, reduced to [0, 2*pi).
    double s() const { return reduce_angle(q2 - q1); }

    State reduced() const { return {reduce_angle(q1), reduce_angle(q2), p1, p2}; }

    bool finite() const {
        return std::isfinite(q1) && std::isfinite(q2) && std::isfinite(p1) && std::isfinite(p2);
    }
};

}  // namespace rotor
