// C^2 cutoff rho(p) = chi(|p2/p1|) * m(|p|) selecting the outer momentum cone.
//
// chi rises from 0 to 1 as the ratio |p2/p1| crosses [1+delta, 1+2delta], so
// rho vanishes on a neighbourhood of the cone |p2| <= (1+delta)|p1| where the
// averaged momentum loses its decay. m removes a ball around the origin so
// rho is globally smooth (the ratio is singular only at p1 = 0, which the
// plateau chi = 1 covers). Both factors use the quintic smoothstep, the
// lowest-degree polynomial step with two vanishing derivatives at the ends,
// optionally composed with itself to steepen the transition.

#pragma once

#include <cmath>

#include "rotor/params.hpp"

namespace rotor {

struct Smoothstep {
    double value;
    double d1;
    double d2;
};

// 6u^5 - 15u^4 + 10u^3 on [0,1], clamped with C^2 contact at both ends.
// sharpness > 1 composes the step with itself that many times, which keeps
// the plateaus and the C^2 contact while steepening the middle.
inline Smoothstep smoothstep_c2(double u, int sharpness = 1) {
    if (u <= 0.0) return {0.0, 0.0, 0.0};
    if (u >= 1.0) return {1.0, 0.0, 0.0};
    Smoothstep s{u, 1.0, 0.0};
    for (int k = 0; k < sharpness; ++k) {
        const double v = s.value;
        const double p = v * v * v * (10.0 + v * (-15.0 + 6.0 * v));
        const double vm1 = v - 1.0;
        const double p1 = 30.0 * v * v * vm1 * vm1;
        const double p2 = 60.0 * v * (2.0 * v - 1.0) * vm1;
        s = {p, p1 * s.d1, p2 * s.d1 * s.d1 + p1 * s.d2};
    }
    return s;
}

struct CutoffValue {
    double rho = 0.0;
    double d_p1 = 0.0;
    double d_p2 = 0.0;
    double d_p1p1 = 0.0;
};

// rho and the momentum derivatives entering L rho. The ratio branch is
// resolved before any division: on |p2| >= (1+2delta)|p1| the angular factor
// sits on its plateau (chi = 1, chi' = chi'' = 0), which covers p1 = 0, and
// on |p2| <= (1+delta)|p1| the result is identically zero.
inline CutoffValue cutoff_rho_derivs(double p1, double p2, double delta, int sharpness = 1) {
    CutoffValue out;

    const double n = std::hypot(p1, p2);
    if (n <= 0.5) return out;

    const double a1 = std::fabs(p1);
    const double a2 = std::fabs(p2);
    if (a2 <= (1.0 + delta) * a1) return out;

    // radial factor m(n) on [1/2, 1]
    const Smoothstep m = smoothstep_c2(2.0 * n - 1.0, sharpness);
    const double m1 = 2.0 * m.d1;
    const double m2 = 4.0 * m.d2;
    const double n_p1 = p1 / n;
    const double n_p1p1 = p2 * p2 / (n * n * n);

    if (a2 >= (1.0 + 2.0 * delta) * a1) {
        // chi plateau: rho = m(n)
        out.rho = m.value;
        out.d_p1 = m1 * n_p1;
        out.d_p2 = m1 * (p2 / n);
        out.d_p1p1 = m2 * n_p1 * n_p1 + m1 * n_p1p1;
        return out;
    }

    // transition band: (1+delta) a1 < a2 < (1+2delta) a1 forces a1 > 0
    const double r = a2 / a1;
    const Smoothstep c = smoothstep_c2((r - (1.0 + delta)) / delta, sharpness);
    const double c1 = c.d1 / delta;
    const double c2 = c.d2 / (delta * delta);
    const double sgn1 = (p1 > 0.0) ? 1.0 : -1.0;
    const double sgn2 = (p2 > 0.0) ? 1.0 : -1.0;
    const double r_p1 = -r * sgn1 / a1;
    const double r_p2 = sgn2 / a1;
    const double r_p1p1 = 2.0 * r / (p1 * p1);

    out.rho = c.value * m.value;
    out.d_p1 = c1 * r_p1 * m.value + c.value * m1 * n_p1;
    out.d_p2 = c1 * r_p2 * m.value + c.value * m1 * (p2 / n);
    out.d_p1p1 = (c2 * r_p1 * r_p1 + c1 * r_p1p1) * m.value + 2.0 * c1 * r_p1 * m1 * n_p1 +
                 c.value * (m2 * n_p1 * n_p1 + m1 * n_p1p1);
    return out;
}

inline double cutoff_rho(double p1, double p2, double delta, int sharpness = 1) {
    return cutoff_rho_derivs(p1, p2, delta, sharpness).rho;
}

}  // namespace rotor
