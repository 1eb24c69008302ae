// Time integration of the two-rotor Langevin system
//   dq1 = p1 dt,  dq2 = p2 dt,
//   dp1 = w(q2-q1) dt - gamma p1 dt + sqrt(2 gamma T) dB,
//   dp2 = -w(q2-q1) dt.
//
// The reference stepper is the BAOAB splitting: deterministic half-kicks and
// half-drifts around an exact Ornstein-Uhlenbeck update of p1. The exact OU
// solve keeps the scheme stable at any gamma dt and samples the p1 marginal
// exactly when the potential is flat. An Euler-Maruyama stepper with the
// same signature serves as the cross-validation scheme.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rotor/errors.hpp"
#include "rotor/params.hpp"
#include "rotor/philox.hpp"
#include "rotor/state.hpp"

namespace rotor {

enum class IntegratorScheme { baoab, euler_maruyama };

inline IntegratorScheme scheme_from_name(const std::string& name) {
    if (name == "baoab") return IntegratorScheme::baoab;
    if (name == "euler-maruyama" || name == "em") return IntegratorScheme::euler_maruyama;
    throw std::invalid_argument("integrator.scheme: unknown scheme '" + name + "'");
}

// One BAOAB step; noise is a standard normal draw, scaled internally.
inline State step(const ModelParams& params, const State& x, double dt, double noise) {
    const double half = 0.5 * dt;
    double w = params.potential.w(x.q2 - x.q1);
    double p1 = x.p1 + half * w;
    double p2 = x.p2 - half * w;
    double q1 = x.q1 + half * p1;
    double q2 = x.q2 + half * p2;
    const double decay = std::exp(-params.gamma * dt);
    const double sigma = std::sqrt(params.temperature * (1.0 - decay * decay));
    p1 = decay * p1 + sigma * noise;
    q1 += half * p1;
    q2 += half * p2;
    w = params.potential.w(q2 - q1);
    p1 += half * w;
    p2 -= half * w;
    return State{reduce_angle(q1), reduce_angle(q2), p1, p2};
}

// One Euler-Maruyama step with the same contract.
inline State step_euler_maruyama(const ModelParams& params, const State& x, double dt, double noise) {
    const double w = params.potential.w(x.q2 - x.q1);
    const double scale = std::sqrt(2.0 * params.gamma * params.temperature * dt);
    return State{reduce_angle(x.q1 + dt * x.p1), reduce_angle(x.q2 + dt * x.p2),
                 x.p1 + dt * (w - params.gamma * x.p1) + scale * noise, x.p2 - dt * w};
}

using TrajectoryObserver = std::function<void(double t, const State&)>;

struct TrajectorySummary {
    State final_state;
    std::uint64_t n_steps = 0;
    double t_final = 0.0;
};

// Deterministic given (params, x0, dt, n_steps, seed): the noise stream is
// a pure function of (seed, trajectory, step). Observers fire at t = 0 and
// then every `stride` steps. Non-finite states abort with the failing time.
inline TrajectorySummary simulate(const ModelParams& params, const State& x0, double dt,
                                  std::uint64_t n_steps, std::uint64_t seed,
                                  const std::vector<TrajectoryObserver>& observers = {},
                                  std::uint64_t stride = 1,
                                  IntegratorScheme scheme = IntegratorScheme::baoab,
                                  std::uint64_t trajectory = 0) {
    if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be > 0");
    CounterRng rng(seed, trajectory, StreamPurpose::dynamics);
    State x = x0;
    for (const auto& obs : observers) obs(0.0, x);
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        const double z = rng.normal(k);
        x = (scheme == IntegratorScheme::baoab) ? step(params, x, dt, z)
                                                : step_euler_maruyama(params, x, dt, z);
        if (!x.finite())
            throw NumericalError("simulate: non-finite state at t = " + std::to_string((k + 1) * dt));
        if ((k + 1) % stride == 0)
            for (const auto& obs : observers) obs((k + 1) * dt, x);
    }
    return TrajectorySummary{x, n_steps, n_steps * dt};
}

}  // namespace rotor
