// Interaction potential W on the circle as a finite Fourier series, with its
// derivative w = W' and the zero-mean antiderivatives W1 ((W1)' = W) and
// W2 ((W2)' = W1). All four levels are closed-form, term by term.

#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace rotor {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reduce an angle to [0, 2*pi).
inline double reduce_angle(double s) {
    double r = s - kTwoPi * std::floor(s / kTwoPi);
    if (r >= kTwoPi) r -= kTwoPi;  // guard against rounding at the seam
    return r;
}

class PeriodicPotential {
  public:
    // W(s) = sum_k a_k cos(k s) + b_k sin(k s), k = 1..K. The constant mode
    // is absent by construction, so W has zero mean over the circle.
    PeriodicPotential(std::vector<double> cosine_coeffs, std::vector<double> sine_coeffs)
        : a_(std::move(cosine_coeffs)), b_(std::move(sine_coeffs)) {
        if (a_.size() < b_.size()) a_.resize(b_.size(), 0.0);
        if (b_.size() < a_.size()) b_.resize(a_.size(), 0.0);
        for (double c : a_)
            if (!std::isfinite(c)) throw std::invalid_argument("potential: non-finite cosine coefficient");
        for (double c : b_)
            if (!std::isfinite(c)) throw std::invalid_argument("potential: non-finite sine coefficient");
    }

    static PeriodicPotential zero() { return PeriodicPotential({}, {}); }

    std::size_t harmonics() const { return a_.size(); }
    const std::vector<double>& cosine_coeffs() const { return a_; }
    const std::vector<double>& sine_coeffs() const { return b_; }

    bool is_zero() const {
        for (double c : a_)
            if (c != 0.0) return false;
        for (double c : b_)
            if (c != 0.0) return false;
        return true;
    }

    double W(double s) const {
        s = reduce_angle(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) {
            const double k = static_cast<double>(i + 1);
            acc += a_[i] * std::cos(k * s) + b_[i] * std::sin(k * s);
        }
        return acc;
    }

    // w = W'
    double w(double s) const {
        s = reduce_angle(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) {
            const double k = static_cast<double>(i + 1);
            acc += k * (-a_[i] * std::sin(k * s) + b_[i] * std::cos(k * s));
        }
        return acc;
    }

    // Zero-mean antiderivative of W.
    double W1(double s) const {
        s = reduce_angle(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) {
            const double k = static_cast<double>(i + 1);
            acc += (a_[i] * std::sin(k * s) - b_[i] * std::cos(k * s)) / k;
        }
        return acc;
    }

    // Zero-mean antiderivative of W1.
    double W2(double s) const {
        s = reduce_angle(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) {
            const double k = static_cast<double>(i + 1);
            acc += -(a_[i] * std::cos(k * s) + b_[i] * std::sin(k * s)) / (k * k);
        }
        return acc;
    }

    // sum_k k (|a_k| + |b_k|), a uniform bound on |w|.
    double max_abs_w() const {
        double acc = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i)
            acc += static_cast<double>(i + 1) * (std::fabs(a_[i]) + std::fabs(b_[i]));
        return acc;
    }

    // sum_k |a_k| + |b_k|, a uniform bound on |W|.
    double max_abs_W() const {
        double acc = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) acc += std::fabs(a_[i]) + std::fabs(b_[i]);
        return acc;
    }

    // Mean of W^2 over the circle: sum_k (a_k^2 + b_k^2) / 2. Drives the
    // effective dissipation rate of the decoupled rotor.
    double mean_W_squared() const {
        double acc = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i) acc += a_[i] * a_[i] + b_[i] * b_[i];
        return 0.5 * acc;
    }

  private:
    std::vector<double> a_;
    std::vector<double> b_;
};

// The standard rotor coupling W(s) = -cos(s).
inline PeriodicPotential default_potential() { return PeriodicPotential({-1.0}, {}); }

}  // namespace rotor
