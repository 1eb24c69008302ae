// Model and test-function parameters, plus the momentum-space partition
// Omega_0..Omega_3 used throughout the drift analysis.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "rotor/potential.hpp"

namespace rotor {

struct ModelParams {
    double gamma = 1.0;        // bath coupling rate
    double temperature = 1.0;  // bath temperature T
    PeriodicPotential potential = default_potential();

    ModelParams() = default;
    ModelParams(double gamma_, double temperature_, PeriodicPotential pot)
        : gamma(gamma_), temperature(temperature_), potential(std::move(pot)) {
        // gamma = 0 is admitted at this level so the decoupled (no bath)
        // diagnostics can be constructed; experiment configs require gamma > 0.
        if (!(gamma >= 0.0) || !std::isfinite(gamma))
            throw std::invalid_argument("model: gamma must be >= 0");
        if (!(temperature > 0.0) || !std::isfinite(temperature))
            throw std::invalid_argument("model: temperature must be > 0");
    }
};

// Parameters of the test function F. The admissibility chain
//   beta_minus < 1/T < beta_plus < (1 + 1/(1+2*delta)^2) * beta_minus
// couples them to the temperature, so full validation needs the model.
struct LyapunovParams {
    double beta_minus = 0.9;
    double beta_plus = 1.1;
    double delta = 0.5;
    double A = 1.0;              // drift constant in phi(s) = A s / (2 + log s)
    int cutoff_sharpness = 1;    // smoothstep self-compositions in the cutoff

    LyapunovParams() = default;
    LyapunovParams(double bm, double bp, double d, double a, int sharpness = 1)
        : beta_minus(bm), beta_plus(bp), delta(d), A(a), cutoff_sharpness(sharpness) {
        if (!(beta_minus > 0.0)) throw std::invalid_argument("lyapunov: beta_minus must be > 0");
        if (!(beta_plus > beta_minus))
            throw std::invalid_argument("lyapunov: beta_plus must exceed beta_minus");
        if (!(delta > 0.0)) throw std::invalid_argument("lyapunov: delta must be > 0");
        if (!(A > 0.0)) throw std::invalid_argument("lyapunov: drift constant A must be > 0");
        if (cutoff_sharpness < 1)
            throw std::invalid_argument("lyapunov: cutoff_sharpness must be >= 1");
    }

    // Throws unless beta_minus < 1/T < beta_plus < (1 + 1/(1+2 delta)^2) beta_minus.
    void validate_against(const ModelParams& model) const {
        const double inv_T = 1.0 / model.temperature;
        const double cone = 1.0 + 2.0 * delta;
        const double upper = (1.0 + 1.0 / (cone * cone)) * beta_minus;
        if (!(beta_minus < inv_T))
            throw std::invalid_argument("lyapunov: requires beta_minus < 1/T (got beta_minus=" +
                                        std::to_string(beta_minus) + ", 1/T=" + std::to_string(inv_T) + ")");
        if (!(inv_T < beta_plus))
            throw std::invalid_argument("lyapunov: requires 1/T < beta_plus (got 1/T=" +
                                        std::to_string(inv_T) + ", beta_plus=" + std::to_string(beta_plus) + ")");
        if (!(beta_plus < upper))
            throw std::invalid_argument(
                "lyapunov: requires beta_plus < (1 + 1/(1+2*delta)^2)*beta_minus (got beta_plus=" +
                std::to_string(beta_plus) + ", bound=" + std::to_string(upper) + ")");
    }
};

enum class RegionLabel { Omega0, Omega1, Omega2, Omega3 };

inline const char* region_name(RegionLabel r) {
    switch (r) {
        case RegionLabel::Omega0: return "Omega0";
        case RegionLabel::Omega1: return "Omega1";
        case RegionLabel::Omega2: return "Omega2";
        default: return "Omega3";
    }
}

// Momentum-space partition:
//   Omega0: p1^2 + p2^2 < 1
//   Omega1: |p2| <= (1+delta)|p1|, outside Omega0
//   Omega2: (1+delta)|p1| < |p2| <= (1+2*delta)|p1|, outside Omega0
//   Omega3: |p2| > (1+2*delta)|p1|, outside Omega0
inline RegionLabel classify(double p1, double p2, double delta) {
    if (p1 * p1 + p2 * p2 < 1.0) return RegionLabel::Omega0;
    const double a1 = std::fabs(p1);
    const double a2 = std::fabs(p2);
    if (a2 <= (1.0 + delta) * a1) return RegionLabel::Omega1;
    if (a2 <= (1.0 + 2.0 * delta) * a1) return RegionLabel::Omega2;
    return RegionLabel::Omega3;
}

}  // namespace rotor
