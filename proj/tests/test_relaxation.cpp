#include <doctest.h>

#include <cmath>
#include <vector>

#include "rotor/errors.hpp"
#include "rotor/lyapunov.hpp"
#include "rotor/params.hpp"
#include "rotor/relaxation.hpp"
#include "rotor/simd.hpp"

using namespace rotor;

TEST_CASE("synthetic curves carry the stretched decay and its noise scale") {
    const std::vector<double> times = {1.0, 4.0, 16.0, 64.0};
    const std::vector<RateFitPoint> clean = synthetic_decay_curve(2.0, 0.5, times, 0.0, 1);
    REQUIRE(clean.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(clean[i].t == times[i]);
        CHECK(clean[i].lower_bound ==
              doctest::Approx(std::exp(-2.0 * std::sqrt(times[i]))).epsilon(1e-12));
        CHECK(clean[i].std_error == 0.0);
    }
    const std::vector<RateFitPoint> noisy = synthetic_decay_curve(2.0, 0.5, times, 0.02, 1);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(noisy[i].std_error == doctest::Approx(0.02 * clean[i].lower_bound));
        CHECK(std::fabs(noisy[i].lower_bound - clean[i].lower_bound) <
              6.0 * noisy[i].std_error + 1e-12);
    }
    CHECK_THROWS_AS(synthetic_decay_curve(2.0, 0.5, {}, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(synthetic_decay_curve(-1.0, 0.5, times, 0.0, 1), std::invalid_argument);
}

TEST_CASE("the stretched fit recovers alpha and c from a known curve") {
    std::vector<double> times;
    for (double t = 1.0; t <= 1024.0; t *= 2.0) times.push_back(t);
    const RateFit fit =
        fit_stretched_rate(synthetic_decay_curve(2.0, 0.5, times, 0.01, 7), 100, 7);
    CHECK(fit.alpha == doctest::Approx(0.5).epsilon(0.1));
    CHECK(fit.c == doctest::Approx(2.0).epsilon(0.05));
    CHECK(fit.alpha_std_error > 0.0);
    CHECK(fit.alpha_std_error < 0.05);
    CHECK(fit.c_std_error > 0.0);
    CHECK(fit.n_usable == times.size());
    CHECK(fit.time_decades > 3.0);
    CHECK(fit.rms_residual < 0.1);
    // The exponential alternative must fit far worse on three decades.
    CHECK(fit.rms_residual_exponential > 2.0 * fit.rms_residual);
    // Pinning alpha = 1/2 reproduces c.
    CHECK(fit.c_at_half == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("a pure exponential comes back with alpha near one") {
    std::vector<double> times;
    for (double t = 0.25; t <= 16.0; t *= 2.0) times.push_back(t);
    const RateFit fit =
        fit_stretched_rate(synthetic_decay_curve(0.4, 1.0, times, 0.005, 3), 50, 3);
    CHECK(fit.alpha == doctest::Approx(1.0).epsilon(0.08));
    CHECK(fit.c == doctest::Approx(0.4).epsilon(0.08));
}

TEST_CASE("the fit refuses starved or degenerate inputs") {
    const std::vector<double> few = {1.0, 2.0, 4.0};
    CHECK_THROWS_AS(fit_stretched_rate(synthetic_decay_curve(2.0, 0.5, few, 0.01, 1), 10, 1),
                    NumericalError);

    // Points drowned in noise do not count as usable.
    std::vector<RateFitPoint> drowned;
    for (double t = 1.0; t <= 256.0; t *= 2.0) drowned.push_back({t, 1e-6, 1.0});
    CHECK_THROWS_AS(fit_stretched_rate(drowned, 10, 1), NumericalError);

    // A rising curve has no positive decay rate.
    std::vector<RateFitPoint> rising;
    for (double t = 1.0; t <= 512.0; t *= 2.0)
        rising.push_back({t, 0.01 * std::sqrt(t), 1e-5});
    CHECK_THROWS_AS(fit_stretched_rate(rising, 10, 1), NumericalError);

    CHECK_THROWS_AS(fit_stretched_rate({}, 10, 1), NumericalError);
}

TEST_CASE("bound times below one step or non-finite inputs are rejected") {
    const ModelParams params;
    const LyapunovParams lyap;
    TvPlan plan;
    plan.times = {0.0, 1.0};
    plan.n_traj = 1000;
    CHECK_THROWS_AS(tv_lower_bound(params, lyap, plan, SimdBackend::scalar),
                    std::invalid_argument);
    plan.times = {1.0};
    plan.n_traj = 10;
    CHECK_THROWS_AS(tv_lower_bound(params, lyap, plan, SimdBackend::scalar),
                    std::invalid_argument);
}

TEST_CASE("a point mass far above the bulk yields a near-unit lower bound") {
    const ModelParams params;
    const LyapunovParams lyap;
    TvPlan plan;
    plan.x0 = State{0.0, 0.0, 0.0, 30.0};
    plan.times = {1.0};
    plan.n_traj = 2000;
    plan.n_levels = 12;
    plan.n_bootstrap = 50;
    plan.seed = 5;
    const TvCurve curve = tv_lower_bound(params, lyap, plan, detect_backend());
    REQUIRE(curve.points.size() == 1);
    // Essentially all of pi sits below F(x0): the empirical tail at the
    // argmax level is 1, the reference tail is pi(F > w) ~ 0.02.
    CHECK(curve.points[0].lower_bound > 0.9);
    CHECK(curve.points[0].lower_bound <= 1.0);
    CHECK(curve.points[0].ci_hi >= curve.points[0].ci_lo);
    REQUIRE(curve.log_w_grid.size() == 12);
    for (std::size_t k = 1; k < curve.log_w_grid.size(); ++k) {
        CHECK(curve.log_w_grid[k] > curve.log_w_grid[k - 1]);
        CHECK(curve.log_pi_tail[k] <= curve.log_pi_tail[k - 1] + 1e-12);
    }
}

TEST_CASE("an equilibrium start gives a bound consistent with zero") {
    const ModelParams params;
    const LyapunovParams lyap;
    TvPlan plan;
    plan.x0 = State{0.0, 0.0, 0.0, 0.0};
    plan.times = {4.0};
    plan.n_traj = 4000;
    plan.n_levels = 8;
    plan.n_bootstrap = 80;
    plan.seed = 11;
    const TvCurve curve = tv_lower_bound(params, lyap, plan, detect_backend());
    const TvPoint& p = curve.points[0];
    // The bulk mode decays on an O(1) clock; by t = 4 the residual bound is
    // small but its uncertainty is genuine (all levels are populated).
    CHECK(p.lower_bound < 0.2);
    CHECK(p.std_error > 0.0);
    CHECK(p.ci_hi <= 1.0);
    CHECK(p.ci_lo >= 0.0);
}

TEST_CASE("escape statistics: the trivial start is already out") {
    const ModelParams params;
    EscapePlan plan{0.01, 2.0, 1000, 1, 64, 0.0, 0.0, 1.0};
    const EscapeStats st = escape_time_stats(params, plan, SimdBackend::scalar);
    CHECK(st.mean_time == 0.0);
    CHECK(st.q50 == 0.0);
    CHECK(st.censored_fraction == 0.0);
    CHECK(st.n_traj == 64);
}

TEST_CASE("escape statistics order their quantiles and respect the budget") {
    const ModelParams params;
    EscapePlan plan{0.01, 2.0, 60000, 9, 256, 0.0, 0.0, 8.0};
    const EscapeStats st = escape_time_stats(params, plan, detect_backend());
    CHECK(st.q10 <= st.q50);
    CHECK(st.q50 <= st.q90);
    CHECK(st.mean_time > 0.0);
    CHECK(st.std_error > 0.0);
    CHECK(st.budget_time == doctest::Approx(600.0));
    CHECK(st.q90 <= st.budget_time);
    // tau(8) concentrates near 8^4 / 2.15 ~ 1900; the budget censors most,
    // pinning the upper quantiles at the budget while finishers pull the
    // mean below it.
    CHECK(st.censored_fraction > 0.5);
    CHECK(st.censored_fraction < 1.0);
    CHECK(st.mean_time <= st.budget_time);
}

TEST_CASE("escape statistics are reproducible across backends") {
    const ModelParams params;
    EscapePlan plan{0.01, 2.0, 30000, 13, 128, 0.3, 0.2, 6.0};
    const EscapeStats a = escape_time_stats(params, plan, SimdBackend::scalar);
    const EscapeStats b = escape_time_stats(params, plan, detect_backend());
    CHECK(a.mean_time == b.mean_time);
    CHECK(a.q50 == b.q50);
    CHECK(a.censored_fraction == b.censored_fraction);
}

TEST_CASE("tail level grids respect the requested shape") {
    const ModelParams params;
    const LyapunovParams lyap;
    const std::vector<double> grid =
        tail_level_grid(params, lyap, State{0.0, 0.0, 0.0, 10.0}, 64.0, 16, 3);
    REQUIRE(grid.size() == 16);
    for (std::size_t k = 1; k < grid.size(); ++k) CHECK(grid[k] > grid[k - 1]);
    // The start sits inside the covered range so its atom is always resolved.
    const double logF0 = eval_logF(params, lyap, State{0.0, 0.0, 0.0, 10.0});
    CHECK(grid.back() >= logF0);
}
