#include <doctest.h>

#include <cmath>

#include "rotor/cutoff.hpp"

using namespace rotor;

TEST_CASE("smoothstep clamps and interpolates") {
    CHECK(smoothstep_c2(-0.5).value == 0.0);
    CHECK(smoothstep_c2(0.0).value == 0.0);
    CHECK(smoothstep_c2(1.0).value == 1.0);
    CHECK(smoothstep_c2(2.0).value == 1.0);
    CHECK(smoothstep_c2(0.5).value == doctest::Approx(0.5));
    for (double u = 0.1; u < 1.0; u += 0.2)
        CHECK(smoothstep_c2(u).value + smoothstep_c2(1.0 - u).value == doctest::Approx(1.0));
}

TEST_CASE("smoothstep derivatives match finite differences") {
    const double h = 1e-6;
    for (const int sharp : {1, 2}) {
        for (double u = 0.05; u < 1.0; u += 0.1) {
            const Smoothstep mid = smoothstep_c2(u, sharp);
            const Smoothstep lo = smoothstep_c2(u - h, sharp);
            const Smoothstep hi = smoothstep_c2(u + h, sharp);
            CHECK(mid.d1 == doctest::Approx((hi.value - lo.value) / (2.0 * h)).epsilon(1e-6));
            CHECK(mid.d2 == doctest::Approx((hi.d1 - lo.d1) / (2.0 * h)).epsilon(1e-6));
        }
    }
}

TEST_CASE("smoothstep meets the edges with two flat derivatives") {
    for (const int sharp : {1, 2}) {
        const Smoothstep lo = smoothstep_c2(1e-9, sharp);
        const Smoothstep hi = smoothstep_c2(1.0 - 1e-9, sharp);
        CHECK(lo.value == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::fabs(lo.d1) < 1e-5);
        CHECK(hi.value == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::fabs(hi.d1) < 1e-5);
    }
}

TEST_CASE("cutoff vanishes inside the cone and saturates outside") {
    const double delta = 0.5;
    CHECK(cutoff_rho(3.0, 3.0, delta) == 0.0);
    CHECK(cutoff_rho(2.0, 2.9, delta) == 0.0);
    CHECK(cutoff_rho(0.2, 0.2, delta) == 0.0);
    CHECK(cutoff_rho(1.0, 5.0, delta) == 1.0);
    CHECK(cutoff_rho(0.0, 2.0, delta) == 1.0);
    CHECK(cutoff_rho(-1.0, -5.0, delta) == 1.0);
    CHECK(cutoff_rho(0.0, 0.3, delta) == 0.0);
}

TEST_CASE("cutoff ramps monotonically through the angular blend") {
    const double delta = 0.5;
    const double p1 = 2.0;
    double prev = -1.0;
    for (double r = 1.45; r <= 2.05; r += 0.05) {
        const double rho = cutoff_rho(p1, r * p1, delta);
        CHECK(rho >= prev - 1e-12);
        CHECK(rho >= 0.0);
        CHECK(rho <= 1.0);
        prev = rho;
    }
}

TEST_CASE("cutoff momentum derivatives match finite differences") {
    const double delta = 0.5;
    const double h = 1e-5;
    const double probes[][2] = {{1.0, 1.8},  {0.9, 1.6},   {1.2, 2.2},   {-1.0, 1.9},
                                {1.0, -1.7}, {-0.8, -1.5}, {0.31, 0.58}, {0.2, 0.75}};
    for (const auto& p : probes) {
        const CutoffValue c = cutoff_rho_derivs(p[0], p[1], delta);
        const double fd_p1 =
            (cutoff_rho(p[0] + h, p[1], delta) - cutoff_rho(p[0] - h, p[1], delta)) / (2.0 * h);
        const double fd_p2 =
            (cutoff_rho(p[0], p[1] + h, delta) - cutoff_rho(p[0], p[1] - h, delta)) / (2.0 * h);
        const double fd_p1p1 = (cutoff_rho(p[0] + h, p[1], delta) -
                                2.0 * cutoff_rho(p[0], p[1], delta) +
                                cutoff_rho(p[0] - h, p[1], delta)) /
                               (h * h);
        CHECK(c.d_p1 == doctest::Approx(fd_p1).epsilon(1e-5));
        CHECK(c.d_p2 == doctest::Approx(fd_p2).epsilon(1e-5));
        CHECK(c.d_p1p1 == doctest::Approx(fd_p1p1).epsilon(1e-4));
    }
}

TEST_CASE("cutoff is continuous across both blend boundaries") {
    const double delta = 0.5;
    const double eps = 1e-9;
    // Angular edge |p2| = (1 + delta) |p1| at radius comfortably above 1.
    CHECK(cutoff_rho(2.0, 3.0 + eps, delta) == doctest::Approx(0.0).epsilon(1e-6));
    // Angular edge |p2| = (1 + 2 delta) |p1|: the ramp tops out.
    CHECK(cutoff_rho(2.0, 4.0 - eps, delta) == doctest::Approx(1.0).epsilon(1e-6));
    // Radial edge |p| = 1/2 deep outside the cone.
    CHECK(cutoff_rho(0.0, 0.5 + 1e-7, delta) == doctest::Approx(0.0).epsilon(1e-5));
    // Radial blend done at |p| = 1.
    CHECK(cutoff_rho(0.0, 1.0 + eps, delta) == doctest::Approx(1.0).epsilon(1e-6));
}
