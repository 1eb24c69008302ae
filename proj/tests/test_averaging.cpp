#include <doctest.h>

#include <cmath>
#include <vector>

#include "rotor/averaging.hpp"
#include "rotor/generator.hpp"
#include "rotor/params.hpp"

using namespace rotor;

namespace {

State on_ray(double lambda, double P, double q1, double q2) {
    return State{q1, q2, lambda * P, P};
}

}  // namespace

TEST_CASE("averaged momentum reduces to p2 when the correction gaps grow") {
    const ModelParams params;
    const State far{0.7, 2.9, 1.0, 1e6};
    CHECK(p2_bar(params, far) == doctest::Approx(far.p2).epsilon(1e-9));
}

TEST_CASE("correction levels nest: each adds one more inverse power") {
    const ModelParams params;
    const State x{0.4, 1.9, 0.6, 8.0};
    const double v = x.p2 - x.p1;
    const double W_here = params.potential.W(x.s());
    CHECK(correction1(params, x) == doctest::Approx(x.p2 + W_here / v).epsilon(1e-13));
    const double second = correction2(params, x) - correction1(params, x);
    CHECK(std::fabs(second) * std::pow(std::fabs(v), 3.0) ==
          doctest::Approx(std::fabs(params.gamma * x.p1 * params.potential.W1(x.s()) -
                                    W_here * W_here))
              .epsilon(1e-10));
}

TEST_CASE("derivatives of the averaged momentum match finite differences") {
    const ModelParams params;
    const double h = 1e-6;
    const std::vector<State> probes = {{0.3, 1.1, 0.5, 4.0},
                                       {1.2, 0.2, -0.8, -5.0},
                                       {2.5, 4.0, 1.5, 6.5},
                                       {0.0, 3.0, 0.0, 3.0}};
    for (const State& x : probes) {
        const PbarDerivs d = pbar_derivs(params, x);
        CHECK(d.pbar2 == doctest::Approx(p2_bar(params, x)).epsilon(1e-13));

        State xp = x, xm = x;
        xp.q2 += h;
        xm.q2 -= h;
        CHECK(d.d_s ==
              doctest::Approx((p2_bar(params, xp) - p2_bar(params, xm)) / (2.0 * h))
                  .epsilon(1e-5));
        xp = x;
        xm = x;
        xp.q1 += h;
        xm.q1 -= h;
        CHECK(-d.d_s ==
              doctest::Approx((p2_bar(params, xp) - p2_bar(params, xm)) / (2.0 * h))
                  .epsilon(1e-5));
        xp = x;
        xm = x;
        xp.p1 += h;
        xm.p1 -= h;
        CHECK(d.d_p1 ==
              doctest::Approx((p2_bar(params, xp) - p2_bar(params, xm)) / (2.0 * h))
                  .epsilon(1e-5));
        const double hh = 1e-4;
        xp.p1 = x.p1 + hh;
        xm.p1 = x.p1 - hh;
        CHECK(d.d_p1p1 ==
              doctest::Approx((p2_bar(params, xp) - 2.0 * p2_bar(params, x) +
                               p2_bar(params, xm)) /
                              (hh * hh))
                  .epsilon(1e-4));
        xp = x;
        xm = x;
        xp.p2 += h;
        xm.p2 -= h;
        CHECK(d.d_p2 ==
              doctest::Approx((p2_bar(params, xp) - p2_bar(params, xm)) / (2.0 * h))
                  .epsilon(1e-5));
    }
}

TEST_CASE("three routes to the residual drift of the averaged momentum agree") {
    // L pbar2 is a tiny residual of O(1) cancelling terms, so it is computed
    // symbolically. Cross-check against the uncancelled assembly and against
    // a finite-difference application of the raw generator.
    const ModelParams params;
    const Observable f = Observable::from_value(
        [&params](const State& x) { return p2_bar(params, x); }, 1e-3);
    for (const State& x : {State{0.5, 2.0, 0.7, 5.0}, State{1.0, 0.1, -0.5, -6.0}}) {
        const double closed = L_pbar2(params, x);
        const double assembled = L_correction_level(params, x, 3);
        const double via_generator = apply_generator(params, f, x);
        CHECK(assembled == doctest::Approx(closed).epsilon(1e-9));
        CHECK(via_generator == doctest::Approx(closed).epsilon(1e-3));
    }
}

TEST_CASE("drift decays one extra order per correction level") {
    const ModelParams params;
    const std::vector<double> P_values = {64.0, 128.0, 256.0, 512.0};
    const OrderEstimate bare = measure_order(
        params, [&params](const State& x) { return -params.potential.w(x.s()); }, 0.3,
        P_values, 64);
    const OrderEstimate level1 = measure_order(
        params, [&params](const State& x) { return L_correction_level(params, x, 1); }, 0.3,
        P_values, 64);
    const OrderEstimate full = measure_order(
        params, [&params](const State& x) { return L_pbar2(params, x); }, 0.3, P_values, 64);
    const OrderEstimate noise = measure_order(
        params, [&params](const State& x) { return noise_coeff_pbar2(params, x); }, 0.3,
        P_values, 64);
    CHECK(std::fabs(bare.exponent) < 0.2);
    CHECK(level1.exponent < -0.7);
    CHECK(full.exponent < -2.7);
    CHECK(noise.exponent < -1.7);
    CHECK(bare.residual < 0.1);
    CHECK(full.residual < 0.1);
}

TEST_CASE("order measurement rejects degenerate inputs") {
    const ModelParams params;
    CHECK_THROWS(measure_order(params, [](const State&) { return 1.0; }, 0.0, {64.0}, 8));
}

TEST_CASE("monomial ray bounds dominate on the outer cone") {
    const double delta = 0.5;
    // |p1^k p2^m / v^l| <= C |p2|^(k+m-l) with C = (1+delta)^(l-k)/delta^l.
    for (const int k : {0, 1, 2}) {
        for (const int l : {1, 3, 4, 5}) {
            const double bound = monomial_ray_bound(k, l, delta);
            for (double lane = 0.0; lane <= 1.0 / (1.0 + delta) + 1e-9; lane += 0.1) {
                for (const double P : {2.0, 10.0, 100.0}) {
                    const State x = on_ray(lane, P, 0.0, 0.0);
                    if (std::hypot(x.p1, x.p2) < 1.0) continue;
                    const double v = x.p2 - x.p1;
                    const double lhs = std::pow(std::fabs(x.p1), k) * std::fabs(x.p2) /
                                       std::pow(std::fabs(v), l);
                    const double rhs =
                        bound * std::pow(std::fabs(x.p2), 1.0 + k - l);
                    CHECK(lhs <= rhs * (1.0 + 1e-12));
                }
            }
        }
    }
}
