// Gauss-Legendre quadrature with Newton-refined nodes, plus the composite
// and trapezoid helpers used by the measure and tail integrals.

#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace rotor {

struct QuadratureRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;  // sum to 2
};

// Nodes are the roots of P_n, found by Newton from the Chebyshev-like
// initial guess; weights are 2 / ((1 - x^2) P_n'(x)^2).
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double wgt = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = wgt;
        rule.weights[n - 1 - i] = wgt;
    }
    return rule;
}

inline double integrate(const QuadratureRule& rule, const std::function<double(double)>& f, double a,
                        double b) {
    const double mid = 0.5 * (a + b);
    const double hw = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + hw * rule.nodes[i]);
    return hw * acc;
}

inline double integrate_composite(const QuadratureRule& rule, const std::function<double(double)>& f,
                                  double a, double b, int panels) {
    if (panels < 1) throw std::invalid_argument("integrate_composite: need at least one panel");
    const double h = (b - a) / panels;
    double acc = 0.0;
    for (int k = 0; k < panels; ++k) acc += integrate(rule, f, a + k * h, a + (k + 1) * h);
    return acc;
}

// Cumulative trapezoid over uniformly spaced samples; out[0] = 0.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& values, double dx) {
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t i = 1; i < values.size(); ++i)
        out[i] = out[i - 1] + 0.5 * dx * (values[i - 1] + values[i]);
    return out;
}

}  // namespace rotor
