// Relaxation measurements along simulated ensembles: total-variation lower
// bounds from tail comparison against the invariant measure, descent-time
// statistics for the slow rotor, and stretched-exponential fits of the
// resulting decay curves.

#pragma once

#include <cstdint>
#include <vector>

#include "rotor/params.hpp"
#include "rotor/simd.hpp"
#include "rotor/state.hpp"

namespace rotor {

// Thresholds for the tail comparison, log-spaced in log F. The lower end is
// the median of log F under pi. The upper end is the 0.9999 quantile capped
// at the larger of log F(x0) and log F at the slow-rotor momentum reachable
// within t_max: the correction terms give F tail wings that decay only
// polylogarithmically in w, so the raw quantile can sit at levels no
// finite-time ensemble populates, and levels beyond the reachable horizon
// would pin the whole curve at the mass of those dead levels.
std::vector<double> tail_level_grid(const ModelParams& params, const LyapunovParams& lyap,
                                    const State& x0, double t_max, int n_levels,
                                    std::uint64_t seed);

struct TvPlan {
    State x0{};
    std::vector<double> times;  // positive, strictly increasing multiples of dt
    std::uint64_t n_traj = 100000;
    double dt = 0.01;
    int n_levels = 24;
    int n_bootstrap = 200;
    std::uint64_t seed = 1;
};

struct TvPoint {
    double t = 0.0;
    double lower_bound = 0.0;  // max over levels of |pi tail - empirical tail|
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double argmax_log_w = 0.0;
    bool at_grid_edge = false;
};

struct TvCurve {
    std::vector<double> log_w_grid;
    std::vector<double> log_pi_tail;  // quadrature reference per level
    std::vector<TvPoint> points;
};

// ||nu_t - pi||_TV >= |pi(F > w) - nu_t(F > w)| for every threshold w; the
// curve reports the best level per time. Reference tails come from
// quadrature, so the only noise is the ensemble's; uncertainties are from a
// multinomial bootstrap over the level buckets. A point mass at x0 gives
// LB(0) = 1 - pi(F > F(x0)) up to the level grid's resolution.
TvCurve tv_lower_bound(const ModelParams& params, const LyapunovParams& lyap,
                       const TvPlan& plan, SimdBackend backend);

struct EscapeStats {
    double p2_start = 0.0;
    double floor = 0.0;
    std::uint64_t n_traj = 0;
    double mean_time = 0.0;
    double std_error = 0.0;
    double q10 = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
    double censored_fraction = 0.0;
    double budget_time = 0.0;
};

// Statistics of tau(P) = first t with |p2| <= floor. Censored trajectories
// enter the mean and the quantiles at the budget time, biasing both low;
// the censored fraction is reported alongside so that bias is visible.
EscapeStats escape_time_stats(const ModelParams& params, const EscapePlan& plan,
                              SimdBackend backend);

struct RateFitPoint {
    double t = 0.0;
    double lower_bound = 0.0;
    double std_error = 0.0;
};

struct RateFit {
    double alpha = 0.0;  // log LB = log_h - c t^alpha on the usable points
    double c = 0.0;
    double log_h = 0.0;
    double alpha_std_error = 0.0;
    double c_std_error = 0.0;
    double c_at_half = 0.0;                 // c with alpha pinned to 1/2
    double rms_residual = 0.0;              // weighted, log space, fitted alpha
    double rms_residual_exponential = 0.0;  // alpha pinned to 1
    std::size_t n_usable = 0;
    double time_decades = 0.0;
};

// Weighted least squares of log LB against log_h - c t^alpha, with alpha
// scanned and then refined. Usable points have LB above three standard
// errors; fewer than six of them, or a usable window under one decade of t,
// is a NumericalError. Standard errors of alpha and c come from refitting
// under the points' own noise model.
RateFit fit_stretched_rate(const std::vector<RateFitPoint>& points, int n_bootstrap,
                           std::uint64_t seed);

// exp(-c t^alpha) with multiplicative Gaussian noise, for fit self-checks.
std::vector<RateFitPoint> synthetic_decay_curve(double c, double alpha,
                                                const std::vector<double>& times,
                                                double noise_fraction, std::uint64_t seed);

}  // namespace rotor
