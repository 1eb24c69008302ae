#include "rotor/averaging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "rotor/errors.hpp"
#include "rotor/sampling.hpp"

namespace rotor {

OrderEstimate measure_order(const ModelParams&, const std::function<double(const State&)>& f,
                            double lambda, const std::vector<double>& P_values, int n_angles,
                            std::vector<double>* max_abs_out) {
    if (P_values.size() < 4)
        throw std::invalid_argument("measure_order: need at least 4 magnitudes to fit a slope");
    if (n_angles < 1) throw std::invalid_argument("measure_order: need at least one angle pair");

    if (max_abs_out) max_abs_out->clear();
    std::vector<double> lx, ly;
    lx.reserve(P_values.size());
    ly.reserve(P_values.size());
    for (std::size_t k = 0; k < P_values.size(); ++k) {
        const double P = P_values[k];
        if (!(P > 0.0)) throw std::invalid_argument("measure_order: magnitudes must be > 0");
        double best = 0.0;
        for (int j = 0; j < n_angles; ++j) {
            const std::uint64_t i = static_cast<std::uint64_t>(k) * n_angles + j + 1;
            const double q1 = kTwoPi * halton(i, 2);
            const double s = kTwoPi * halton(i, 3);
            const State x{q1, q1 + s, lambda * P, P};
            best = std::max(best, std::fabs(f(x)));
        }
        if (max_abs_out) max_abs_out->push_back(best);
        if (best <= 0.0)
            throw NumericalError("measure_order: |f| vanished on the whole angle grid at P = " +
                                 std::to_string(P));
        lx.push_back(std::log(P));
        ly.push_back(std::log(best));
    }

    const double n = static_cast<double>(lx.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;

    double rss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + slope * lx[i]);
        rss += r * r;
    }

    OrderEstimate est;
    est.exponent = slope;
    est.residual = std::sqrt(rss / n);
    est.ray = lambda;
    return est;
}

}  // namespace rotor
