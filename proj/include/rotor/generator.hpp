// The Hamiltonian, the generator
//   L = p1 d_q1 + p2 d_q2 + w(q2-q1)(d_p1 - d_p2) - gamma p1 d_p1 + gamma T d^2_p1
// applied to observables, and a small catalogue of analytic observables.

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "rotor/params.hpp"
#include "rotor/state.hpp"

namespace rotor {

inline double hamiltonian(const ModelParams& params, const State& x) {
    return 0.5 * (x.p1 * x.p1 + x.p2 * x.p2) + params.potential.W(x.q2 - x.q1);
}

// Carrier for functions fed to the generator: the value, the four-gradient
// (d_q1, d_q2, d_p1, d_p2), and the second p1-derivative.
struct Observable {
    std::function<double(const State&)> value;
    std::function<std::array<double, 4>(const State&)> gradient;
    std::function<double(const State&)> p1_second_derivative;

    // Finite-difference fallback for observables given only by value.
    static Observable from_value(std::function<double(const State&)> f, double h = 1e-5) {
        Observable obs;
        obs.value = f;
        obs.gradient = [f, h](const State& x) {
            std::array<double, 4> g{};
            State lo = x, hi = x;
            hi.q1 = x.q1 + h; lo.q1 = x.q1 - h;
            g[0] = (f(hi) - f(lo)) / (2.0 * h);
            hi = x; lo = x;
            hi.q2 = x.q2 + h; lo.q2 = x.q2 - h;
            g[1] = (f(hi) - f(lo)) / (2.0 * h);
            hi = x; lo = x;
            hi.p1 = x.p1 + h; lo.p1 = x.p1 - h;
            g[2] = (f(hi) - f(lo)) / (2.0 * h);
            hi = x; lo = x;
            hi.p2 = x.p2 + h; lo.p2 = x.p2 - h;
            g[3] = (f(hi) - f(lo)) / (2.0 * h);
            return g;
        };
        obs.p1_second_derivative = [f, h](const State& x) {
            State lo = x, hi = x;
            hi.p1 = x.p1 + h;
            lo.p1 = x.p1 - h;
            return (f(hi) - 2.0 * f(x) + f(lo)) / (h * h);
        };
        return obs;
    }
};

inline double apply_generator(const ModelParams& params, const Observable& f, const State& x) {
    const std::array<double, 4> g = f.gradient(x);
    const double fpp = f.p1_second_derivative(x);
    for (double v : g)
        if (!std::isfinite(v)) throw std::invalid_argument("apply_generator: non-finite gradient");
    if (!std::isfinite(fpp)) throw std::invalid_argument("apply_generator: non-finite second derivative");
    const double w = params.potential.w(x.q2 - x.q1);
    return x.p1 * g[0] + x.p2 * g[1] + w * (g[2] - g[3]) - params.gamma * x.p1 * g[2] +
           params.gamma * params.temperature * fpp;
}

// --- analytic observables -------------------------------------------------

inline Observable observable_hamiltonian(const ModelParams& params) {
    Observable obs;
    obs.value = [params](const State& x) { return hamiltonian(params, x); };
    obs.gradient = [params](const State& x) {
        const double w = params.potential.w(x.q2 - x.q1);
        return std::array<double, 4>{-w, w, x.p1, x.p2};
    };
    obs.p1_second_derivative = [](const State&) { return 1.0; };
    return obs;
}

// exp(beta * H) with analytic derivatives.
inline Observable observable_exp_beta_H(const ModelParams& params, double beta) {
    Observable obs;
    obs.value = [params, beta](const State& x) { return std::exp(beta * hamiltonian(params, x)); };
    obs.gradient = [params, beta](const State& x) {
        const double e = std::exp(beta * hamiltonian(params, x));
        const double w = params.potential.w(x.q2 - x.q1);
        return std::array<double, 4>{-beta * w * e, beta * w * e, beta * x.p1 * e, beta * x.p2 * e};
    };
    obs.p1_second_derivative = [params, beta](const State& x) {
        const double e = std::exp(beta * hamiltonian(params, x));
        return (beta + beta * beta * x.p1 * x.p1) * e;
    };
    return obs;
}

inline Observable observable_p1_squared() {
    Observable obs;
    obs.value = [](const State& x) { return x.p1 * x.p1; };
    obs.gradient = [](const State& x) { return std::array<double, 4>{0.0, 0.0, 2.0 * x.p1, 0.0}; };
    obs.p1_second_derivative = [](const State&) { return 2.0; };
    return obs;
}

inline Observable observable_p2_squared() {
    Observable obs;
    obs.value = [](const State& x) { return x.p2 * x.p2; };
    obs.gradient = [](const State& x) { return std::array<double, 4>{0.0, 0.0, 0.0, 2.0 * x.p2}; };
    obs.p1_second_derivative = [](const State&) { return 0.0; };
    return obs;
}

inline Observable observable_cos_s() {
    Observable obs;
    obs.value = [](const State& x) { return std::cos(x.q2 - x.q1); };
    obs.gradient = [](const State& x) {
        const double s = std::sin(x.q2 - x.q1);
        return std::array<double, 4>{s, -s, 0.0, 0.0};
    };
    obs.p1_second_derivative = [](const State&) { return 0.0; };
    return obs;
}

}  // namespace rotor
