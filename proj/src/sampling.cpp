#include "rotor/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace rotor {

namespace {

// Eight relative angles, offset from the lattice {0, pi/4, ...} so that no
// probe sits exactly on a zero of W, w, W1 or W2.
const double kAngleGrid[8] = {0.35, 1.15, 1.95, 2.75, 3.55, 4.35, 5.15, 5.95};

// Positions inside a smoothstep transition, reaching far into the corner
// where the ratio value/derivative of the cutoff factor diverges. The grid
// is fixed, so the supremum contributed here does not move when the
// momentum cap or the stream length changes.
const double kEdgeGrid[12] = {1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4,
                              1e-3, 1e-2, 0.05, 0.15, 0.5,  0.85};

void push_momentum_states(std::vector<State>& out, double p1, double p2) {
    for (double s : kAngleGrid) out.push_back(State{0.0, s, p1, p2});
}

}  // namespace

std::vector<State> certification_enrichment(double delta, double cap) {
    if (!(delta > 0.0)) throw std::invalid_argument("sampling: delta must be > 0");
    if (!(cap > 1.0)) throw std::invalid_argument("sampling: momentum cap must exceed 1");
    std::vector<State> out;

    // Angular transition edge: ratio |p2/p1| just above 1+delta, where the
    // cutoff rises from zero, swept across radii covering the radial blend
    // and slightly beyond. Sign-aligned pairs minimize |p2 - p1| and
    // dominate the drift margin.
    const double radii[6] = {0.55, 0.7, 0.85, 1.0, 1.5, 3.0};
    for (double u : kEdgeGrid) {
        const double r = (1.0 + delta) + delta * u;
        const double den = std::sqrt(1.0 + r * r);
        for (double n : radii) {
            const double a1 = n / den;
            const double a2 = n * r / den;
            for (int sgn = 0; sgn < 4; ++sgn) {
                const double s1 = (sgn & 1) ? -1.0 : 1.0;
                const double s2 = (sgn & 2) ? -1.0 : 1.0;
                push_momentum_states(out, s1 * a1, s2 * a2);
            }
        }
    }

    // Radial blend edge: |p| just above 1/2, across the angular sector.
    const double ratios[5] = {1.0 + 1.25 * delta, 1.0 + 1.75 * delta, 1.0 + 2.0 * delta,
                              1.0 + 3.0 * delta, 1e9};
    for (double eps : kEdgeGrid) {
        const double n = 0.5 * (1.0 + eps);
        for (double r : ratios) {
            const double den = std::sqrt(1.0 + r * r);
            const double a1 = n / den;
            const double a2 = n * r / den;
            for (int sgn = 0; sgn < 4; ++sgn) {
                const double s1 = (sgn & 1) ? -1.0 : 1.0;
                const double s2 = (sgn & 2) ? -1.0 : 1.0;
                push_momentum_states(out, s1 * a1, s2 * a2);
            }
        }
    }

    // Band of small |p1| where the e^{beta_minus H} drift coefficient is
    // positive: p1 on a fixed grid, |p2| log-spaced out to the cap.
    const int n_p2 = 48;
    for (int i = 0; i <= 28; ++i) {
        const double p1 = 0.25 * (i - 14);
        for (int j = 0; j < n_p2; ++j) {
            const double p2 = std::exp(std::log(cap) * (j + 0.5) / n_p2);
            push_momentum_states(out, p1, p2);
            push_momentum_states(out, p1, -p2);
        }
    }
    return out;
}

std::vector<State> cone_enrichment(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("sampling: delta must be > 0");
    std::vector<State> out;

    // The lemma suprema live at the inner corner of Omega2 u Omega3: |p2|
    // near its floor and the ratio near 1+delta, sign-aligned so that
    // v = p2 - p1 is smallest.
    const double p2_grid[7] = {1.0, 1.05, 1.15, 1.3, 1.6, 2.0, 3.0};
    for (double u : kEdgeGrid) {
        const double r = (1.0 + delta) * (1.0 + u);
        for (double p2 : p2_grid) {
            const double p1 = p2 / r;
            for (int sgn = 0; sgn < 4; ++sgn) {
                const double s1 = (sgn & 1) ? -1.0 : 1.0;
                const double s2 = (sgn & 2) ? -1.0 : 1.0;
                push_momentum_states(out, s1 * p1, s2 * p2);
            }
        }
    }
    // Pure second-rotor states across the magnitude range.
    for (double p2 : {1.0, 2.0, 4.0, 16.0, 64.0, 256.0, 1000.0}) {
        push_momentum_states(out, 0.0, p2);
        push_momentum_states(out, 0.0, -p2);
    }
    return out;
}

std::vector<State> build_certification_sample(const SamplePlan& plan, double delta) {
    std::vector<State> out;
    out.reserve(plan.count + 20000);
    for (std::size_t i = 0; i < plan.count; ++i)
        out.push_back(certification_state(plan.index_offset + i, delta, plan.momentum_cap));
    if (plan.include_enrichment) {
        const std::vector<State> extra = certification_enrichment(delta, plan.momentum_cap);
        out.insert(out.end(), extra.begin(), extra.end());
    }
    return out;
}

std::vector<State> build_cone_sample(const SamplePlan& plan, double delta) {
    std::vector<State> out;
    out.reserve(plan.count + 6000);
    for (std::size_t i = 0; i < plan.count; ++i)
        out.push_back(cone_state(plan.index_offset + i, delta, plan.momentum_cap));
    if (plan.include_enrichment) {
        const std::vector<State> extra = cone_enrichment(delta);
        out.insert(out.end(), extra.begin(), extra.end());
    }
    return out;
}

}  // namespace rotor
