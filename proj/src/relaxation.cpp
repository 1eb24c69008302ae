#include "rotor/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotor/errors.hpp"
#include "rotor/gibbs.hpp"
#include "rotor/lyapunov.hpp"
#include "rotor/philox.hpp"

namespace rotor {

namespace {

// One random word per bucket: the normal branch reads stream word 4k, the
// inverse-CDF branch word 4k + 1, so the two layouts never share a Philox
// block across buckets.
std::uint64_t binomial_draw(CounterRng& rng, std::uint64_t word, std::uint64_t n, double p) {
    if (n == 0 || !(p > 0.0)) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial_draw(rng, word, n, 1.0 - p);
    const double nd = static_cast<double>(n);
    const double mean = nd * p;
    const double var = mean * (1.0 - p);
    if (var > 25.0) {
        const double x = std::round(mean + rng.normal(word) * std::sqrt(var));
        if (x <= 0.0) return 0;
        if (x >= nd) return n;
        return static_cast<std::uint64_t>(x);
    }
    const double u = rng.uniform(word + 1);
    const double odds = p / (1.0 - p);
    double pk = std::exp(nd * std::log1p(-p));
    double cum = pk;
    std::uint64_t k = 0;
    while (u > cum && k < n) {
        pk *= (nd - static_cast<double>(k)) / static_cast<double>(k + 1) * odds;
        ++k;
        cum += pk;
    }
    return k;
}

void resample_buckets(CounterRng& rng, const std::vector<std::uint64_t>& buckets,
                      std::vector<std::uint64_t>& out) {
    out.assign(buckets.size(), 0);
    std::uint64_t rem_n = std::accumulate(buckets.begin(), buckets.end(), std::uint64_t{0});
    std::uint64_t rem_mass = rem_n;
    for (std::size_t k = 0; k + 1 < buckets.size() && rem_n > 0; ++k) {
        const double p = static_cast<double>(buckets[k]) / static_cast<double>(rem_mass);
        const std::uint64_t x = binomial_draw(rng, 4 * k, rem_n, p);
        out[k] = x;
        rem_n -= x;
        rem_mass -= buckets[k];
    }
    out.back() = rem_n;
}

// buckets[b] counts members with grid[b-1] <= logF < grid[b]; the empirical
// tail at level k is the mass of buckets above k.
double best_level_gap(const std::vector<double>& pi_tail,
                      const std::vector<std::uint64_t>& buckets, double n,
                      std::size_t* argmax) {
    const std::size_t levels = pi_tail.size();
    double best = -1.0;
    std::size_t arg = 0;
    std::uint64_t above = 0;
    for (std::size_t k = levels; k-- > 0;) {
        above += buckets[k + 1];
        const double gap = std::fabs(pi_tail[k] - static_cast<double>(above) / n);
        if (gap > best) {
            best = gap;
            arg = k;
        }
    }
    if (argmax != nullptr) *argmax = arg;
    return best;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    const auto idx = static_cast<std::size_t>(
        std::llround(q * static_cast<double>(sorted.size() - 1)));
    return sorted[idx];
}

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double rss = 0.0;
};

LineFit fit_weighted_line(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w) {
    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    LineFit out;
    const double denom = sw * swxx - swx * swx;
    if (std::fabs(denom) < 1e-300 * std::max(1.0, sw * swxx)) {
        out.slope = 0.0;
        out.intercept = sw > 0.0 ? swy / sw : 0.0;
    } else {
        out.slope = (sw * swxy - swx * swy) / denom;
        out.intercept = (swy - out.slope * swx) / sw;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - out.intercept - out.slope * x[i];
        out.rss += w[i] * r * r;
    }
    return out;
}

struct StretchedFit {
    double alpha = 0.0;
    LineFit line;
};

LineFit fit_at_alpha(const std::vector<double>& t, const std::vector<double>& y,
                     const std::vector<double>& w, double alpha) {
    std::vector<double> x(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::pow(t[i], alpha);
    return fit_weighted_line(x, y, w);
}

StretchedFit fit_best_alpha(const std::vector<double>& t, const std::vector<double>& y,
                            const std::vector<double>& w) {
    StretchedFit best;
    best.line.rss = std::numeric_limits<double>::infinity();
    for (double alpha = 0.05; alpha <= 1.5 + 1e-12; alpha += 0.025) {
        const LineFit f = fit_at_alpha(t, y, w, alpha);
        if (f.rss < best.line.rss) best = {alpha, f};
    }
    double lo = std::max(0.02, best.alpha - 0.025);
    double hi = std::min(2.0, best.alpha + 0.025);
    for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (fit_at_alpha(t, y, w, m1).rss <= fit_at_alpha(t, y, w, m2).rss)
            hi = m2;
        else
            lo = m1;
    }
    const double alpha = 0.5 * (lo + hi);
    const LineFit f = fit_at_alpha(t, y, w, alpha);
    if (f.rss < best.line.rss) best = {alpha, f};
    return best;
}

}  // namespace

std::vector<double> tail_level_grid(const ModelParams& params, const LyapunovParams& lyap,
                                    const State& x0, double t_max, int n_levels,
                                    std::uint64_t seed) {
    lyap.validate_against(params);
    if (n_levels < 4) throw std::invalid_argument("tail grid: need at least 4 levels");
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw std::invalid_argument("tail grid: t_max must be positive");

    const GibbsMeasure mu(params);
    constexpr std::uint64_t kProbe = 50000;
    std::vector<double> logs(kProbe);
    for (std::uint64_t i = 0; i < kProbe; ++i)
        logs[i] = eval_logF(params, lyap, mu.sample(seed, i));
    std::sort(logs.begin(), logs.end());

    const double lo = quantile_sorted(logs, 0.5);
    const double deep_quantile = quantile_sorted(logs, 0.9999);
    const double p_reach = 3.0 + 1.4 * std::pow(t_max, 0.25);
    const double horizon = eval_logF(params, lyap, State{0.0, 0.0, 0.0, p_reach});
    const double start = 1.05 * eval_logF(params, lyap, x0);
    double hi = std::min(deep_quantile, std::max(horizon, start));
    if (!(hi > lo)) hi = 4.0 * lo;

    std::vector<double> grid(static_cast<std::size_t>(n_levels));
    const double step = (std::log(hi) - std::log(lo)) / (n_levels - 1);
    for (int k = 0; k < n_levels; ++k) grid[static_cast<std::size_t>(k)] = std::exp(std::log(lo) + k * step);
    return grid;
}

TvCurve tv_lower_bound(const ModelParams& params, const LyapunovParams& lyap,
                       const TvPlan& plan, SimdBackend backend) {
    lyap.validate_against(params);
    if (plan.times.empty()) throw std::invalid_argument("tv: time grid is empty");
    if (plan.n_traj < 1000) throw std::invalid_argument("tv: n_traj must be at least 1000");
    if (!(plan.dt > 0.0) || !std::isfinite(plan.dt))
        throw std::invalid_argument("tv: dt must be positive");
    if (plan.n_levels < 4) throw std::invalid_argument("tv: need at least 4 levels");
    if (plan.n_bootstrap < 0) throw std::invalid_argument("tv: n_bootstrap must be >= 0");

    std::vector<std::uint64_t> step_grid(plan.times.size());
    for (std::size_t i = 0; i < plan.times.size(); ++i) {
        const double t = plan.times[i];
        if (!(t > 0.0) || !std::isfinite(t))
            throw std::invalid_argument("tv: times must be positive");
        const auto steps = static_cast<std::uint64_t>(std::llround(t / plan.dt));
        if (steps == 0 || std::fabs(static_cast<double>(steps) * plan.dt - t) >
                              1e-6 * std::max(1.0, t))
            throw std::invalid_argument("tv: times must be whole multiples of dt");
        if (i > 0 && steps <= step_grid[i - 1])
            throw std::invalid_argument("tv: times must be strictly increasing");
        step_grid[i] = steps;
    }

    TvCurve curve;
    curve.log_w_grid =
        tail_level_grid(params, lyap, plan.x0, plan.times.back(), plan.n_levels, plan.seed);
    const std::size_t levels = curve.log_w_grid.size();
    std::vector<double> pi_tail(levels);
    curve.log_pi_tail.resize(levels);
    for (std::size_t k = 0; k < levels; ++k) {
        curve.log_pi_tail[k] = log_tail_F(params, lyap, curve.log_w_grid[k]);
        pi_tail[k] = std::exp(curve.log_pi_tail[k]);
    }

    const std::size_t n = plan.n_traj;
    std::vector<double> q1(n, plan.x0.q1), q2(n, plan.x0.q2), p1(n, plan.x0.p1),
        p2(n, plan.x0.p2);
    const EnsembleView view{q1.data(), q2.data(), p1.data(), p2.data(), n};
    const EnsembleOps& ops = ensemble_ops(backend);

    const auto n_boot = static_cast<std::size_t>(plan.n_bootstrap);
    std::vector<std::uint64_t> buckets(levels + 1), resampled;
    std::vector<double> replicates(n_boot);
    std::uint64_t steps_done = 0;
    curve.points.reserve(plan.times.size());
    for (std::size_t ti = 0; ti < plan.times.size(); ++ti) {
        ops.advance(params, view,
                    StepPlan{plan.dt, step_grid[ti] - steps_done, plan.seed, 0, steps_done});
        steps_done = step_grid[ti];

        std::fill(buckets.begin(), buckets.end(), std::uint64_t{0});
        for (std::size_t i = 0; i < n; ++i) {
            const double lf = eval_logF(params, lyap, State{q1[i], q2[i], p1[i], p2[i]});
            const auto b = static_cast<std::size_t>(
                std::upper_bound(curve.log_w_grid.begin(), curve.log_w_grid.end(), lf) -
                curve.log_w_grid.begin());
            ++buckets[b];
        }

        TvPoint pt;
        pt.t = plan.times[ti];
        std::size_t arg = 0;
        pt.lower_bound = best_level_gap(pi_tail, buckets, static_cast<double>(n), &arg);
        pt.argmax_log_w = curve.log_w_grid[arg];
        pt.at_grid_edge = (arg == 0 || arg + 1 == levels);

        for (std::size_t r = 0; r < n_boot; ++r) {
            CounterRng rng(plan.seed, ti * n_boot + r, StreamPurpose::bootstrap);
            resample_buckets(rng, buckets, resampled);
            replicates[r] = best_level_gap(pi_tail, resampled, static_cast<double>(n), nullptr);
        }
        if (n_boot >= 2) {
            const double mean =
                std::accumulate(replicates.begin(), replicates.end(), 0.0) / n_boot;
            double ss = 0.0;
            for (const double v : replicates) ss += (v - mean) * (v - mean);
            pt.std_error = std::sqrt(ss / (n_boot - 1));
            std::vector<double> sorted(replicates);
            std::sort(sorted.begin(), sorted.end());
            pt.ci_lo = quantile_sorted(sorted, 0.025);
            pt.ci_hi = quantile_sorted(sorted, 0.975);
        } else {
            pt.ci_lo = pt.ci_hi = pt.lower_bound;
        }
        curve.points.push_back(pt);
    }
    return curve;
}

EscapeStats escape_time_stats(const ModelParams& params, const EscapePlan& plan,
                              SimdBackend backend) {
    if (plan.n_traj == 0) throw std::invalid_argument("escape: n_traj must be positive");
    if (!(plan.dt > 0.0) || !std::isfinite(plan.dt))
        throw std::invalid_argument("escape: dt must be positive");
    if (!(plan.threshold >= 0.0)) throw std::invalid_argument("escape: floor must be >= 0");
    if (plan.step_budget == 0 || plan.step_budget >= (std::uint64_t{1} << 63))
        throw std::invalid_argument("escape: step budget must be in [1, 2^63)");

    std::vector<std::uint64_t> hits(plan.n_traj);
    ensemble_ops(backend).escape(params, plan, hits.data());

    EscapeStats out;
    out.p2_start = plan.p2_0;
    out.floor = plan.threshold;
    out.n_traj = plan.n_traj;
    out.budget_time = static_cast<double>(plan.step_budget) * plan.dt;

    std::vector<double> times(plan.n_traj);
    std::uint64_t censored = 0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        if (hits[i] == kCensored) {
            ++censored;
            times[i] = out.budget_time;
        } else {
            times[i] = static_cast<double>(hits[i]) * plan.dt;
        }
    }
    out.censored_fraction = static_cast<double>(censored) / static_cast<double>(plan.n_traj);

    const double n = static_cast<double>(plan.n_traj);
    out.mean_time = std::accumulate(times.begin(), times.end(), 0.0) / n;
    double ss = 0.0;
    for (const double t : times) ss += (t - out.mean_time) * (t - out.mean_time);
    out.std_error = plan.n_traj > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;

    std::sort(times.begin(), times.end());
    out.q10 = quantile_sorted(times, 0.10);
    out.q50 = quantile_sorted(times, 0.50);
    out.q90 = quantile_sorted(times, 0.90);
    return out;
}

RateFit fit_stretched_rate(const std::vector<RateFitPoint>& points, int n_bootstrap,
                           std::uint64_t seed) {
    if (n_bootstrap < 0) throw std::invalid_argument("rate fit: n_bootstrap must be >= 0");
    std::vector<double> t, y, w, rel;
    double t_min = std::numeric_limits<double>::infinity();
    double t_max = 0.0;
    for (const RateFitPoint& p : points) {
        if (!std::isfinite(p.t) || !std::isfinite(p.lower_bound) || !(p.t > 0.0)) continue;
        if (!(p.lower_bound > 0.0) || !(p.lower_bound > 3.0 * p.std_error)) continue;
        const double r = p.std_error > 0.0 ? p.std_error / p.lower_bound : 0.0;
        t.push_back(p.t);
        y.push_back(std::log(p.lower_bound));
        rel.push_back(r);
        w.push_back(1.0 / (r * r + 1e-12));
        t_min = std::min(t_min, p.t);
        t_max = std::max(t_max, p.t);
    }

    RateFit out;
    out.n_usable = t.size();
    if (out.n_usable < 6)
        throw NumericalError("rate fit: only " + std::to_string(out.n_usable) +
                             " points with lower bound above 3 standard errors; need 6");
    out.time_decades = std::log10(t_max / t_min);
    if (out.time_decades < 1.0)
        throw NumericalError("rate fit: usable window spans " +
                             std::to_string(out.time_decades) + " decades of t; need 1");

    const StretchedFit best = fit_best_alpha(t, y, w);
    const double sw = std::accumulate(w.begin(), w.end(), 0.0);
    out.alpha = best.alpha;
    out.c = -best.line.slope;
    out.log_h = best.line.intercept;
    out.rms_residual = std::sqrt(best.line.rss / sw);
    out.rms_residual_exponential = std::sqrt(fit_at_alpha(t, y, w, 1.0).rss / sw);
    out.c_at_half = -fit_at_alpha(t, y, w, 0.5).slope;
    if (!(out.c > 0.0)) throw NumericalError("rate fit: fitted curve does not decay");

    if (n_bootstrap >= 2) {
        std::vector<double> alphas, cs, yb(y.size());
        alphas.reserve(static_cast<std::size_t>(n_bootstrap));
        cs.reserve(static_cast<std::size_t>(n_bootstrap));
        for (int r = 0; r < n_bootstrap; ++r) {
            CounterRng rng(seed, static_cast<std::uint64_t>(r), StreamPurpose::bootstrap);
            for (std::size_t i = 0; i < y.size(); ++i)
                yb[i] = y[i] + rel[i] * rng.normal(i);
            const StretchedFit f = fit_best_alpha(t, yb, w);
            alphas.push_back(f.alpha);
            cs.push_back(-f.line.slope);
        }
        const auto sdev = [](const std::vector<double>& v) {
            const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
            double ss = 0.0;
            for (const double x : v) ss += (x - m) * (x - m);
            return std::sqrt(ss / (v.size() - 1));
        };
        out.alpha_std_error = sdev(alphas);
        out.c_std_error = sdev(cs);
    }
    return out;
}

std::vector<RateFitPoint> synthetic_decay_curve(double c, double alpha,
                                                const std::vector<double>& times,
                                                double noise_fraction, std::uint64_t seed) {
    if (!(c > 0.0) || !(alpha > 0.0))
        throw std::invalid_argument("synthetic curve: c and alpha must be positive");
    if (!(noise_fraction >= 0.0))
        throw std::invalid_argument("synthetic curve: noise fraction must be >= 0");
    if (times.empty()) throw std::invalid_argument("synthetic curve: times are empty");
    std::vector<RateFitPoint> out;
    out.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        if (!(t > 0.0) || !std::isfinite(t))
            throw std::invalid_argument("synthetic curve: times must be positive");
        const double clean = std::exp(-c * std::pow(t, alpha));
        CounterRng rng(seed, i, StreamPurpose::synthetic);
        const double noisy = clean * (1.0 + noise_fraction * rng.normal(0));
        out.push_back({t, std::max(noisy, 1e-300), noise_fraction * clean});
    }
    return out;
}

}  // namespace rotor
