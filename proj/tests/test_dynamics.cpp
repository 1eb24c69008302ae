#include <doctest.h>

#include <cmath>
#include <vector>

#include "rotor/dynamics.hpp"
#include "rotor/generator.hpp"
#include "rotor/params.hpp"
#include "rotor/philox.hpp"
#include "rotor/potential.hpp"

using namespace rotor;

TEST_CASE("one step of the splitting is exact on the decoupled rotor") {
    // With W = 0 the update decouples: q2, p2 drift freely; p1 is an exact
    // Ornstein-Uhlenbeck solve; q1 picks up both half-drifts. At T -> 0 the
    // noise term is below double resolution, so the step is deterministic.
    const ModelParams params(1.0, 1e-30, PeriodicPotential::zero());
    const State x1 = step(params, State{0.0, 0.0, 1.0, 2.0}, 0.1, 0.77);
    const double decay = std::exp(-0.1);
    CHECK(x1.q2 == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(x1.p2 == 2.0);
    CHECK(x1.p1 == doctest::Approx(decay).epsilon(1e-14));
    CHECK(x1.q1 == doctest::Approx(0.05 * (1.0 + decay)).epsilon(1e-14));
}

TEST_CASE("the thermostat only touches the first momentum") {
    // With a coupling the final half-kick sees the noise through q1, so the
    // strict independence of the second rotor holds only for W = 0.
    const ModelParams params(1.0, 1.0, PeriodicPotential::zero());
    const State x0{0.3, 5.1, -1.2, 0.8};
    const State a = step(params, x0, 0.01, 1.3);
    const State b = step(params, x0, 0.01, -0.4);
    CHECK(a.p1 != b.p1);
    CHECK(a.p2 == b.p2);
    CHECK(a.q2 == b.q2);
}

TEST_CASE("total momentum is conserved without the thermostat") {
    const ModelParams params(0.0, 1.0, default_potential());
    State x{0.0, 2.0, 0.7, -0.4};
    for (int k = 0; k < 1000; ++k) x = step(params, x, 0.01, 0.0);
    CHECK(x.p1 + x.p2 == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("energy is conserved to second order without the thermostat") {
    const ModelParams params(0.0, 1.0, default_potential());
    const State x0{0.0, 2.0, 0.7, -0.4};
    const double h0 = hamiltonian(params, x0);
    for (const double dt : {0.02, 0.01, 0.005}) {
        State x = x0;
        const int n = static_cast<int>(std::llround(10.0 / dt));
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            x = step(params, x, dt, 0.0);
            worst = std::max(worst, std::fabs(hamiltonian(params, x) - h0));
        }
        CHECK(worst < 2.0 * dt * dt);
    }
}

TEST_CASE("the exact thermostat equilibrates the first momentum at T") {
    const ModelParams params(1.0, 0.7, PeriodicPotential::zero());
    const CounterRng rng(3, 0, StreamPurpose::dynamics);
    double p1 = 3.0;
    double sum = 0.0, sum_sq = 0.0;
    const int burn = 200, n = 200000;
    for (int k = 0; k < burn + n; ++k) {
        const State x = step(params, State{0.0, 0.0, p1, 0.0}, 0.05,
                             rng.normal(static_cast<std::uint64_t>(k)));
        p1 = x.p1;
        if (k >= burn) {
            sum += p1;
            sum_sq += p1 * p1;
        }
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.05);
    CHECK(var == doctest::Approx(0.7).epsilon(0.06));
}

TEST_CASE("euler-maruyama agrees with the splitting over one small step") {
    const ModelParams params;
    const State x0{0.4, 2.6, 0.9, -1.1};
    const double dt = 1e-4;
    const State a = step(params, x0, dt, 0.0);
    const State b = step_euler_maruyama(params, x0, dt, 0.0);
    CHECK(a.p1 == doctest::Approx(b.p1).epsilon(1e-7));
    CHECK(a.p2 == doctest::Approx(b.p2).epsilon(1e-7));
    CHECK(a.q1 == doctest::Approx(b.q1).epsilon(1e-7));
    CHECK(a.q2 == doctest::Approx(b.q2).epsilon(1e-7));
}

TEST_CASE("scheme names resolve and reject") {
    CHECK(scheme_from_name("baoab") == IntegratorScheme::baoab);
    CHECK(scheme_from_name("euler-maruyama") == IntegratorScheme::euler_maruyama);
    CHECK_THROWS_AS(scheme_from_name("verlet"), std::invalid_argument);
}

TEST_CASE("the trajectory driver fires observers on the stride") {
    const ModelParams params;
    std::vector<double> times;
    const TrajectorySummary sum = simulate(
        params, State{0.0, 0.0, 0.0, 1.0}, 0.01, 100, 9,
        {[&times](double t, const State&) { times.push_back(t); }}, 25);
    CHECK(sum.n_steps == 100);
    CHECK(sum.t_final == doctest::Approx(1.0));
    REQUIRE(times.size() == 5);
    CHECK(times.front() == 0.0);
    CHECK(times[1] == doctest::Approx(0.25));
    CHECK(times.back() == doctest::Approx(1.0));
}

TEST_CASE("the trajectory driver is deterministic in the seed") {
    const ModelParams params;
    const State x0{0.0, 0.0, 0.0, 3.0};
    const State a = simulate(params, x0, 0.01, 500, 11).final_state;
    const State b = simulate(params, x0, 0.01, 500, 11).final_state;
    const State c = simulate(params, x0, 0.01, 500, 12).final_state;
    CHECK(a.p1 == b.p1);
    CHECK(a.q1 == b.q1);
    CHECK(a.p1 != c.p1);
}

TEST_CASE("dt must be positive") {
    const ModelParams params;
    CHECK_THROWS_AS(simulate(params, State{}, 0.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(simulate(params, State{}, -0.1, 10, 1), std::invalid_argument);
}
