#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rotor/averaging.hpp"
#include "rotor/generator.hpp"
#include "rotor/logdomain.hpp"
#include "rotor/potential.hpp"
#include "rotor/quadrature.hpp"
#include "rotor/sampling.hpp"
#include "rotor/state.hpp"

using namespace rotor;

TEST_CASE("default potential is the single negative cosine") {
    const PeriodicPotential pot = default_potential();
    CHECK(pot.W(0.0) == doctest::Approx(-1.0));
    CHECK(pot.W(std::numbers::pi) == doctest::Approx(1.0));
    CHECK(pot.w(0.5) == doctest::Approx(std::sin(0.5)));
    CHECK(pot.W1(0.5) == doctest::Approx(-std::sin(0.5)));
    CHECK(pot.W2(0.5) == doctest::Approx(std::cos(0.5)));
}

TEST_CASE("the derivative ladder w -> W -> W1 -> W2 is consistent") {
    const PeriodicPotential pot({-1.0, 0.3}, {0.0, -0.2, 0.1});
    const double h = 1e-6;
    for (double s = 0.05; s <= 6.0; s += 0.37) {
        const double fd_W = (pot.W(s + h) - pot.W(s - h)) / (2.0 * h);
        const double fd_W1 = (pot.W1(s + h) - pot.W1(s - h)) / (2.0 * h);
        const double fd_W2 = (pot.W2(s + h) - pot.W2(s - h)) / (2.0 * h);
        CHECK(pot.w(s) == doctest::Approx(fd_W).epsilon(1e-7));
        CHECK(pot.W(s) == doctest::Approx(fd_W1).epsilon(1e-7));
        CHECK(pot.W1(s) == doctest::Approx(fd_W2).epsilon(1e-7));
    }
}

TEST_CASE("potential is 2 pi periodic") {
    const PeriodicPotential pot({-1.0, 0.3}, {0.0, -0.2});
    for (double s = -2.0; s <= 2.0; s += 0.61) {
        CHECK(pot.W(s) == doctest::Approx(pot.W(s + kTwoPi)).epsilon(1e-12));
        CHECK(pot.w(s) == doctest::Approx(pot.w(s - kTwoPi)).epsilon(1e-12));
    }
}

TEST_CASE("zero potential freezes the coupling") {
    const PeriodicPotential pot = PeriodicPotential::zero();
    CHECK(pot.is_zero());
    CHECK(pot.W(1.3) == 0.0);
    CHECK(pot.w(1.3) == 0.0);
}

TEST_CASE("reduce_angle lands in one period") {
    for (double s = -30.0; s <= 30.0; s += 0.957) {
        const double r = reduce_angle(s);
        CHECK(r >= 0.0);
        CHECK(r < kTwoPi);
        CHECK(std::cos(r) == doctest::Approx(std::cos(s)).epsilon(1e-9));
        CHECK(std::sin(r) == doctest::Approx(std::sin(s)).epsilon(1e-9));
    }
}

TEST_CASE("the gap accessor reduces q2 - q1") {
    const State x{0.5, 0.5 + kTwoPi + 1.0, 0.0, 0.0};
    CHECK(x.s() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log-domain arithmetic round-trips plain doubles") {
    const std::vector<double> values = {3.5, -2.25, 1e-12, -7e9, 0.0};
    for (const double a : values) {
        const LogScalar la = LogScalar::from_double(a);
        CHECK(la.to_double() == doctest::Approx(a).epsilon(1e-14));
        for (const double b : values) {
            const LogScalar lb = LogScalar::from_double(b);
            CHECK((la + lb).to_double() == doctest::Approx(a + b).epsilon(1e-12));
            CHECK((la - lb).to_double() == doctest::Approx(a - b).epsilon(1e-12));
            CHECK((la * lb).to_double() == doctest::Approx(a * b).epsilon(1e-12));
            CHECK((la < lb) == (a < b));
        }
    }
}

TEST_CASE("log-domain sums survive extreme magnitudes") {
    const LogScalar big = LogScalar::from_sign_log(1.0, 5000.0);
    const LogScalar small = LogScalar::from_sign_log(1.0, -5000.0);
    const LogScalar sum = big + small;
    CHECK(sum.sign == 1.0);
    CHECK(sum.log_abs == doctest::Approx(5000.0));
    const LogScalar diff = big - big;
    CHECK(diff.sign == 0.0);

    CHECK(log_add_exp(kNegInf, -3.0) == doctest::Approx(-3.0));
    CHECK(log_sub_exp(2.0, 2.0) == kNegInf);
    const std::vector<double> terms = {1000.0, 1000.0 + std::log(2.0)};
    CHECK(log_sum_exp(terms) == doctest::Approx(1000.0 + std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("gauss-legendre integrates polynomials to machine precision") {
    const QuadratureRule rule = gauss_legendre(8);
    const auto poly = [](double x) {
        return 3.0 * x * x * x * x * x - 2.0 * x * x + x - 4.0;
    };
    // Antiderivative evaluated on [-1, 2]: 0.5 x^6 - 2/3 x^3 + x^2/2 - 4x.
    const auto anti = [](double x) {
        return 0.5 * std::pow(x, 6) - 2.0 / 3.0 * std::pow(x, 3) + 0.5 * x * x - 4.0 * x;
    };
    CHECK(integrate(rule, poly, -1.0, 2.0) == doctest::Approx(anti(2.0) - anti(-1.0)).epsilon(1e-14));
}

TEST_CASE("composite quadrature reproduces the modified Bessel function") {
    const QuadratureRule rule = gauss_legendre(16);
    const double i0 = integrate_composite(rule, [](double s) { return std::exp(std::cos(s)); },
                                          -std::numbers::pi, std::numbers::pi, 8) /
                      kTwoPi;
    const double i1 = integrate_composite(
                          rule, [](double s) { return std::cos(s) * std::exp(std::cos(s)); },
                          -std::numbers::pi, std::numbers::pi, 8) /
                      kTwoPi;
    CHECK(i0 == doctest::Approx(std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-12));
    CHECK(i1 == doctest::Approx(std::cyl_bessel_i(1.0, 1.0)).epsilon(1e-12));
}

TEST_CASE("halton fills the unit interval with van der Corput digits") {
    CHECK(halton(1, 2) == doctest::Approx(0.5));
    CHECK(halton(2, 2) == doctest::Approx(0.25));
    CHECK(halton(3, 2) == doctest::Approx(0.75));
    CHECK(halton(4, 2) == doctest::Approx(0.125));
    CHECK(halton(1, 3) == doctest::Approx(1.0 / 3.0));
    CHECK(halton(2, 3) == doctest::Approx(2.0 / 3.0));
    double mean = 0.0;
    for (std::uint64_t i = 1; i <= 1000; ++i) mean += halton(i, 5);
    CHECK(mean / 1000.0 == doctest::Approx(0.5).epsilon(5e-3));
}

TEST_CASE("energy and averaged-momentum substitution oracles") {
    const ModelParams params;
    // At s = 0 (so W = -1) and v = 2: pbar2 = 2 + W/v = 1.5 at first order,
    // then -W^2/v^3 adds -1/8, and the v^-4, v^-5 terms vanish with p1 = 0.
    CHECK(correction1(params, State{0.0, 0.0, 0.0, 2.0}) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(correction2(params, State{0.0, 0.0, 0.0, 2.0}) ==
          doctest::Approx(1.375).epsilon(1e-14));
    // With p1 = 1, p2 = 4 (v = 3): 4 - 1/3 - 1/27 + cos(0) (1/81 + 3/243).
    CHECK(p2_bar(params, State{0.0, 0.0, 1.0, 4.0}) ==
          doctest::Approx(296.0 / 81.0).epsilon(1e-14));
    // H = (1 + 4)/2 + W(pi) = 2.5 + 1.
    CHECK(hamiltonian(params, State{0.0, std::numbers::pi, 1.0, 2.0}) ==
          doctest::Approx(3.5).epsilon(1e-14));
}

TEST_CASE("certification states honor the cap and the cone sections") {
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const State x = certification_state(i, 0.5, 1000.0);
        CHECK(std::hypot(x.p1, x.p2) <= 1000.0 * (1.0 + 1e-9));
        CHECK(std::isfinite(x.q1));
        CHECK(std::isfinite(x.q2));
    }
}
