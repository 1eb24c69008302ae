// Signed log-domain scalars and log-sum-exp helpers.
// The test function F and its drift LF span many thousands of orders of
// magnitude near the cutoff corner, so every F-related quantity is carried
// as (sign, log|value|) and only converted to a plain double at the edges.

#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace rotor {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b), safe for -inf arguments.
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

// log(e^a - e^b) for a >= b; returns -inf when they cancel exactly.
inline double log_sub_exp(double a, double b) {
    if (b == kNegInf) return a;
    if (a == b) return kNegInf;
    return a + std::log1p(-std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> v) {
    double hi = kNegInf;
    for (double x : v) hi = x > hi ? x : hi;
    if (hi == kNegInf) return kNegInf;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - hi);
    return hi + std::log(acc);
}

// log of the arithmetic mean of e^{v_i}.
inline double log_mean_exp(std::span<const double> v) {
    return log_sum_exp(v) - std::log(static_cast<double>(v.size()));
}

// A real number stored as sign * exp(log_abs). sign is -1, 0 or +1;
// log_abs is -inf exactly when sign is 0.
struct LogScalar {
    double sign = 0.0;
    double log_abs = kNegInf;

    static LogScalar zero() { return {0.0, kNegInf}; }

    static LogScalar from_double(double x) {
        if (x == 0.0) return zero();
        return {x > 0.0 ? 1.0 : -1.0, std::log(std::fabs(x))};
    }

    // sign * exp(log_abs + extra_log), for values born as s * e^g.
    static LogScalar from_sign_log(double s, double lg) {
        if (s == 0.0) return zero();
        return {s > 0.0 ? 1.0 : -1.0, lg};
    }

    double to_double() const {
        if (sign == 0.0) return 0.0;
        return sign * std::exp(log_abs);  // may over/underflow by design
    }

    bool positive() const { return sign > 0.0; }

    LogScalar operator-() const { return {-sign, log_abs}; }

    friend LogScalar operator*(const LogScalar& a, const LogScalar& b) {
        if (a.sign == 0.0 || b.sign == 0.0) return zero();
        return {a.sign * b.sign, a.log_abs + b.log_abs};
    }

    friend LogScalar operator+(const LogScalar& a, const LogScalar& b) {
        if (a.sign == 0.0) return b;
        if (b.sign == 0.0) return a;
        if (a.sign == b.sign) return {a.sign, log_add_exp(a.log_abs, b.log_abs)};
        if (a.log_abs == b.log_abs) return zero();
        const LogScalar& big = a.log_abs > b.log_abs ? a : b;
        const LogScalar& small = a.log_abs > b.log_abs ? b : a;
        return {big.sign, log_sub_exp(big.log_abs, small.log_abs)};
    }

    friend LogScalar operator-(const LogScalar& a, const LogScalar& b) { return a + (-b); }

    // Compare the represented real values.
    friend bool operator<(const LogScalar& a, const LogScalar& b) {
        if (a.sign != b.sign) return a.sign < b.sign;
        if (a.sign > 0.0) return a.log_abs < b.log_abs;
        if (a.sign < 0.0) return a.log_abs > b.log_abs;
        return false;
    }
};

inline LogScalar log_scale(const LogScalar& a, double factor) {
    return a * LogScalar::from_double(factor);
}

// Streaming log-sum-exp accumulator for one-pass quadrature in log domain.
class LogAccumulator {
  public:
    void add(double log_term) {
        if (log_term == kNegInf) return;
        if (log_term > peak_) {
            acc_ = acc_ * std::exp(peak_ - log_term) + 1.0;
            peak_ = log_term;
        } else {
            acc_ += std::exp(log_term - peak_);
        }
    }
    double value() const { return acc_ == 0.0 ? kNegInf : peak_ + std::log(acc_); }

  private:
    double peak_ = kNegInf;
    double acc_ = 0.0;
};

}  // namespace rotor
