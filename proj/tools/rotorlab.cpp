// Command-line laboratory for the thermostatted rotor pair: simulation,
// Gibbs sampling, drift certification, tail scans, and relaxation curves.
// Every subcommand shares the config/override harness and leaves a manifest
// next to its outputs, whatever the outcome.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rotor/averaging.hpp"
#include "rotor/config.hpp"
#include "rotor/csv.hpp"
#include "rotor/errors.hpp"
#include "rotor/generator.hpp"
#include "rotor/gibbs.hpp"
#include "rotor/lyapunov.hpp"
#include "rotor/manifest.hpp"
#include "rotor/philox.hpp"
#include "rotor/potential.hpp"
#include "rotor/relaxation.hpp"
#include "rotor/sampling.hpp"
#include "rotor/simd.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rotor;

namespace {

struct CommonOpts {
    std::string config;
    std::vector<std::string> sets;
    std::string out = ".";
    std::string seed_text;
    std::string simd_text;
    std::string workers_text;
    bool deterministic_order = false;
};

void add_common(CLI::App* sub, CommonOpts& c) {
    sub->add_option("--config", c.config, "JSON configuration file");
    sub->add_option("--set", c.sets, "override one field, section.key=value (repeatable)");
    sub->add_option("--out", c.out, "output directory")->capture_default_str();
    sub->add_option("--seed", c.seed_text, "master seed (overrides the config)");
    sub->add_option("--simd", c.simd_text, "backend: auto, scalar, avx2, avx512")
        ->check(CLI::IsMember({"auto", "scalar", "avx2", "avx512"}));
    sub->add_option("--workers", c.workers_text, "worker count (recorded; lanes run on one thread)");
    sub->add_flag("--deterministic-order", c.deterministic_order,
                  "fix the reduction order (it is fixed regardless; recorded in the manifest)");
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open " + path.string());
    out << j.dump(2) << '\n';
}

struct MeanAcc {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::uint64_t n = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double std_error() const {
        const double m = mean();
        const double var = sum_sq / static_cast<double>(n) - m * m;
        return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    }
};

// --- subcommand bodies -------------------------------------------------------

std::vector<std::string> cmd_simulate(const ExperimentConfig& cfg, SimdBackend backend,
                                      const fs::path& out) {
    const SimulateConfig& sc = cfg.simulate;
    const auto steps_total = static_cast<std::uint64_t>(std::llround(sc.t_end / cfg.dt));
    if (steps_total == 0)
        throw std::invalid_argument("simulate: t_end is shorter than one step");

    const std::size_t n = sc.n_traj;
    std::vector<double> q1(n, sc.x0.q1), q2(n, sc.x0.q2), p1(n, sc.x0.p1), p2(n, sc.x0.p2);
    if (sc.gibbs_init) {
        const GibbsMeasure mu(cfg.model);
        const std::vector<State> starts = mu.sample_block(cfg.seed, n);
        for (std::size_t i = 0; i < n; ++i) {
            q1[i] = starts[i].q1;
            q2[i] = starts[i].q2;
            p1[i] = starts[i].p1;
            p2[i] = starts[i].p2;
        }
    }
    const EnsembleView view{q1.data(), q2.data(), p1.data(), p2.data(), n};
    const EnsembleOps& ops = ensemble_ops(backend);

    std::vector<std::string> columns = {"t", "q1", "q2", "p1", "p2"};
    if (n > 1) columns.insert(columns.begin(), "trajectory");
    CsvWriter csv(out / "trajectory.csv", columns);
    const auto dump = [&](double t) {
        for (std::size_t i = 0; i < n; ++i) {
            if (n > 1)
                csv.row({static_cast<double>(i), t, q1[i], q2[i], p1[i], p2[i]});
            else
                csv.row({t, q1[i], q2[i], p1[i], p2[i]});
        }
    };

    dump(0.0);
    std::uint64_t done = 0;
    while (done < steps_total) {
        const std::uint64_t chunk = std::min<std::uint64_t>(sc.stride, steps_total - done);
        ops.advance(cfg.model, view, StepPlan{cfg.dt, chunk, cfg.seed, 0, done});
        done += chunk;
        dump(static_cast<double>(done) * cfg.dt);
    }
    std::printf("simulate: %llu trajectories, %llu steps of dt=%g, backend %s\n",
                static_cast<unsigned long long>(n),
                static_cast<unsigned long long>(steps_total), cfg.dt, backend_name(backend));
    return {"trajectory.csv"};
}

std::vector<std::string> cmd_gibbs_sample(const ExperimentConfig& cfg, SimdBackend,
                                          const fs::path& out) {
    const GibbsMeasure mu(cfg.model);
    const std::uint64_t n = cfg.gibbs.n_samples;

    MeanAcc cos_s, m_p1, m_p2, p1_sq, p2_sq;
    std::vector<Observable> obs = {observable_hamiltonian(cfg.model), observable_p1_squared(),
                                   observable_p2_squared(), observable_cos_s()};
    const std::vector<std::string> obs_names = {"hamiltonian", "p1_squared", "p2_squared",
                                                "cos_s"};
    std::vector<MeanAcc> lf(obs.size());
    for (std::uint64_t i = 0; i < n; ++i) {
        const State x = mu.sample(cfg.seed, i);
        cos_s.add(std::cos(x.s()));
        m_p1.add(x.p1);
        m_p2.add(x.p2);
        p1_sq.add(x.p1 * x.p1);
        p2_sq.add(x.p2 * x.p2);
        for (std::size_t k = 0; k < obs.size(); ++k)
            lf[k].add(apply_generator(cfg.model, obs[k], x));
    }
    const double quadrature_cos = mu.expect_gap([](double s) { return std::cos(s); });

    json stationarity = json::array();
    for (std::size_t k = 0; k < obs.size(); ++k) {
        const double se = lf[k].std_error();
        stationarity.push_back({{"observable", obs_names[k]},
                                {"mean", lf[k].mean()},
                                {"std_error", se},
                                {"z", se > 0.0 ? lf[k].mean() / se : 0.0}});
    }
    write_json_file(out / "gibbs_summary.json",
                    json{{"n_samples", n},
                         {"mean_cos_s", cos_s.mean()},
                         {"se_cos_s", cos_s.std_error()},
                         {"quadrature_cos_s", quadrature_cos},
                         {"mean_p1", m_p1.mean()},
                         {"se_p1", m_p1.std_error()},
                         {"mean_p2", m_p2.mean()},
                         {"se_p2", m_p2.std_error()},
                         {"mean_p1_sq", p1_sq.mean()},
                         {"se_p1_sq", p1_sq.std_error()},
                         {"mean_p2_sq", p2_sq.mean()},
                         {"se_p2_sq", p2_sq.std_error()},
                         {"temperature", cfg.model.temperature},
                         {"log_partition", mu.log_partition()},
                         {"stationarity", stationarity}});

    CsvWriter tail_csv(out / "tail_curve.csv",
                       {"log_w", "tail", "std_error", "log_tail_quadrature"});
    for (const double lw : cfg.gibbs.tail_log_w) {
        const TailEstimate est =
            tail_F_mc(cfg.model, cfg.lyapunov, lw, cfg.gibbs.tail_mc_samples, cfg.seed);
        tail_csv.row({lw, est.probability, est.std_error,
                      log_tail_F(cfg.model, cfg.lyapunov, lw)});
    }

    std::printf("gibbs-sample: E[cos s] = %.6f +/- %.6f (quadrature %.6f), E[p1^2] = %.6f\n",
                cos_s.mean(), cos_s.std_error(), quadrature_cos, p1_sq.mean());
    return {"gibbs_summary.json", "tail_curve.csv"};
}

std::vector<std::string> cmd_order_check(const ExperimentConfig& cfg, SimdBackend,
                                         const fs::path& out) {
    const ModelParams& model = cfg.model;
    struct Probe {
        const char* name;
        double expected;  // order bound for the log-log slope
        std::function<double(const State&)> f;
    };
    const std::vector<Probe> probes = {
        {"drift_p2", 0.0, [&model](const State& x) { return -model.potential.w(x.s()); }},
        {"drift_p2_level1", -1.0,
         [&model](const State& x) { return L_correction_level(model, x, 1); }},
        {"drift_p2_averaged", -3.0, [&model](const State& x) { return L_pbar2(model, x); }},
        {"noise_pbar2", -2.0,
         [&model](const State& x) { return noise_coeff_pbar2(model, x); }},
    };

    CsvWriter csv(out / "order_check.csv", {"observable", "ray", "P", "max_abs_f", "fitted"});
    json summary = json::array();
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        for (const double ray : cfg.order_check.rays) {
            std::vector<double> max_abs;
            const OrderEstimate est = measure_order(model, probes[pi].f, ray,
                                                    cfg.order_check.p_values,
                                                    cfg.order_check.n_angles, &max_abs);
            double intercept = 0.0;
            for (std::size_t k = 0; k < max_abs.size(); ++k)
                intercept += std::log(max_abs[k]) -
                             est.exponent * std::log(cfg.order_check.p_values[k]);
            intercept /= static_cast<double>(max_abs.size());
            for (std::size_t k = 0; k < max_abs.size(); ++k)
                csv.row({static_cast<double>(pi), ray, cfg.order_check.p_values[k], max_abs[k],
                         std::exp(intercept + est.exponent *
                                                  std::log(cfg.order_check.p_values[k]))});
            summary.push_back({{"observable", probes[pi].name},
                               {"ray", ray},
                               {"exponent", est.exponent},
                               {"residual", est.residual},
                               {"expected_order", probes[pi].expected}});
            std::printf("order-check: %-18s ray % .3f  slope %+.3f (target %+g, residual %.3f)\n",
                        probes[pi].name, ray, est.exponent, probes[pi].expected, est.residual);
        }
    }
    write_json_file(out / "order_summary.json", summary);
    return {"order_check.csv", "order_summary.json"};
}

std::vector<std::string> cmd_drift_certify(const ExperimentConfig& cfg, SimdBackend,
                                           const fs::path& out) {
    const SamplePlan plan{cfg.drift_certify.n_samples, cfg.drift_certify.momentum_cap, true, 0};
    std::vector<CertRow> rows;
    const CertifyReport rep =
        certify_drift(cfg.model, cfg.lyapunov, plan,
                      cfg.drift_certify.write_sample ? &rows : nullptr);

    std::vector<std::string> outputs = {"certify_summary.json"};
    if (cfg.drift_certify.write_sample) {
        CsvWriter csv(out / "certify_sample.csv",
                      {"q1", "q2", "p1", "p2", "region", "logF", "lf_over_phi"});
        for (const CertRow& r : rows)
            csv.row({r.x.q1, r.x.q2, r.x.p1, r.x.p2,
                     static_cast<double>(static_cast<int>(r.region)), r.logF, r.lf_over_phi});
        outputs.push_back("certify_sample.csv");
    }

    write_json_file(
        out / "certify_summary.json",
        json{{"sample_count", rep.sample_count},
             {"log10_A_min", rep.log10_A_min},
             {"worst_margin_sign", rep.worst_margin.sign},
             {"worst_margin_log_abs", rep.worst_margin.log_abs},
             {"worst_state",
              {rep.worst_state.q1, rep.worst_state.q2, rep.worst_state.p1, rep.worst_state.p2}},
             {"margin_bounded_at_cap", rep.margin_bounded_at_cap},
             {"fd_audit_count", rep.fd_audit_count},
             {"fd_audit_max_rel_err", rep.fd_audit_max_rel_err},
             {"momentum_cap", cfg.drift_certify.momentum_cap}});

    std::printf("drift-certify: log10 A_min = %.6f over %llu states (bounded at cap: %s, "
                "FD audit %llu states, max rel err %.2e)\n",
                rep.log10_A_min, static_cast<unsigned long long>(rep.sample_count),
                rep.margin_bounded_at_cap ? "yes" : "no",
                static_cast<unsigned long long>(rep.fd_audit_count), rep.fd_audit_max_rel_err);
    return outputs;
}

std::vector<std::string> cmd_nonintegrability(const ExperimentConfig& cfg, SimdBackend,
                                              const fs::path& out) {
    const MomentScan scan = check_nonintegrability(cfg.model, cfg.lyapunov,
                                                   cfg.nonintegrability.epsilons,
                                                   cfg.nonintegrability.max_octaves);
    CsvWriter csv(out / "moment_scan.csv", {"epsilon", "radius", "log_partial_sum"});
    json probes = json::array();
    for (const MomentProbe& p : scan.probes) {
        for (std::size_t k = 0; k < p.log_partial_sums.size(); ++k)
            csv.row({p.epsilon, std::ldexp(2.0, static_cast<int>(k) + 1),
                     p.log_partial_sums[k]});
        probes.push_back({{"epsilon", p.epsilon},
                          {"divergent", p.divergent},
                          {"last_log_increment", p.last_log_increment},
                          {"octaves", p.log_partial_sums.size()}});
        std::printf("nonintegrability: epsilon %.4f -> %s (last increment %.4g nats)\n",
                    p.epsilon, p.divergent ? "divergent" : "plateau", p.last_log_increment);
    }
    write_json_file(out / "nonintegrability_summary.json",
                    json{{"threshold", scan.threshold}, {"probes", probes}});
    std::printf("nonintegrability: divergence threshold epsilon = %.6f\n", scan.threshold);
    return {"moment_scan.csv", "nonintegrability_summary.json"};
}

std::vector<std::string> cmd_tv_curve(const ExperimentConfig& cfg, SimdBackend backend,
                                      const fs::path& out) {
    TvPlan plan;
    plan.x0 = cfg.tv_curve.x0;
    plan.times = cfg.tv_curve.times;
    plan.n_traj = cfg.tv_curve.n_traj;
    plan.dt = cfg.dt;
    plan.n_levels = cfg.tv_curve.n_levels;
    plan.n_bootstrap = cfg.tv_curve.n_bootstrap;
    plan.seed = cfg.seed;
    const TvCurve curve = tv_lower_bound(cfg.model, cfg.lyapunov, plan, backend);

    CsvWriter lb_csv(out / "lb_curve.csv", {"t", "lower_bound", "std_error", "ci_lo", "ci_hi",
                                            "argmax_log_w", "at_grid_edge"});
    int edge_hits = 0;
    for (const TvPoint& p : curve.points) {
        lb_csv.row({p.t, p.lower_bound, p.std_error, p.ci_lo, p.ci_hi, p.argmax_log_w,
                    p.at_grid_edge ? 1.0 : 0.0});
        if (p.at_grid_edge) {
            ++edge_hits;
            std::fprintf(stderr,
                         "warning: t = %g: maximizing level sits at the grid edge "
                         "(log w = %.3f)\n",
                         p.t, p.argmax_log_w);
        }
    }
    CsvWriter level_csv(out / "tail_levels.csv", {"log_w", "log_pi_tail"});
    for (std::size_t k = 0; k < curve.log_w_grid.size(); ++k)
        level_csv.row({curve.log_w_grid[k], curve.log_pi_tail[k]});

    write_json_file(out / "tv_summary.json",
                    json{{"n_traj", plan.n_traj},
                         {"n_levels", plan.n_levels},
                         {"n_bootstrap", plan.n_bootstrap},
                         {"x0", {plan.x0.q1, plan.x0.q2, plan.x0.p1, plan.x0.p2}},
                         {"log_w_min", curve.log_w_grid.front()},
                         {"log_w_max", curve.log_w_grid.back()},
                         {"edge_warnings", edge_hits}});

    std::printf("tv-curve: %llu trajectories over %zu times, LB(t) from %.4g to %.4g\n",
                static_cast<unsigned long long>(plan.n_traj), curve.points.size(),
                curve.points.front().lower_bound, curve.points.back().lower_bound);
    return {"lb_curve.csv", "tail_levels.csv", "tv_summary.json"};
}

std::vector<std::string> cmd_escape_times(const ExperimentConfig& cfg, SimdBackend backend,
                                          const fs::path& out) {
    CsvWriter csv(out / "escape.csv", {"P", "mean_tau", "std_error", "q10", "q50", "q90",
                                       "censored_frac", "n_traj", "budget_t"});
    std::vector<double> log_p, log_tau;
    json rows = json::array();
    for (const double P : cfg.escape.p_values) {
        EscapePlan plan{cfg.dt,  cfg.escape.floor, cfg.escape.step_budget, cfg.seed,
                        cfg.escape.n_traj, 0.0,    0.0,                    P};
        const EscapeStats st = escape_time_stats(cfg.model, plan, backend);
        csv.row({P, st.mean_time, st.std_error, st.q10, st.q50, st.q90, st.censored_fraction,
                 static_cast<double>(st.n_traj), st.budget_time});
        rows.push_back({{"P", P},
                        {"mean_tau", st.mean_time},
                        {"std_error", st.std_error},
                        {"censored_fraction", st.censored_fraction}});
        if (P > 0.0 && st.mean_time > 0.0) {
            log_p.push_back(std::log(P));
            log_tau.push_back(std::log(st.mean_time));
        }
        std::printf("escape-times: P = %-6g mean tau = %-12.4g (q50 %.4g, censored %.3f)\n", P,
                    st.mean_time, st.q50, st.censored_fraction);
    }

    double slope = 0.0;
    if (log_p.size() >= 2) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        const double n = static_cast<double>(log_p.size());
        for (std::size_t i = 0; i < log_p.size(); ++i) {
            sx += log_p[i];
            sy += log_tau[i];
            sxx += log_p[i] * log_p[i];
            sxy += log_p[i] * log_tau[i];
        }
        slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        std::printf("escape-times: log-log slope of mean tau vs P = %.3f\n", slope);
    }
    write_json_file(out / "escape_summary.json",
                    json{{"rows", rows}, {"log_log_slope", slope}});
    return {"escape.csv", "escape_summary.json"};
}

std::vector<std::string> cmd_rate_fit(const ExperimentConfig& cfg, SimdBackend,
                                      const fs::path& out) {
    const CsvTable table = read_csv(cfg.rate_fit.input);
    const std::size_t ct = table.column("t");
    const std::size_t cl = table.column("lower_bound");
    const std::size_t cs = table.column("std_error");
    std::vector<RateFitPoint> points;
    points.reserve(table.rows.size());
    for (const std::vector<double>& r : table.rows)
        points.push_back({r[ct], r[cl], r[cs]});

    const RateFit fit = fit_stretched_rate(points, cfg.rate_fit.n_bootstrap, cfg.seed);
    const double ratio =
        fit.rms_residual > 0.0 ? fit.rms_residual_exponential / fit.rms_residual : 0.0;
    write_json_file(out / "ratefit.json",
                    json{{"alpha", fit.alpha},
                         {"alpha_std_error", fit.alpha_std_error},
                         {"c", fit.c},
                         {"c_std_error", fit.c_std_error},
                         {"log_h", fit.log_h},
                         {"c_at_half", fit.c_at_half},
                         {"rms_residual", fit.rms_residual},
                         {"rms_residual_exponential", fit.rms_residual_exponential},
                         {"residual_ratio", ratio},
                         {"n_usable", fit.n_usable},
                         {"time_decades", fit.time_decades},
                         {"input", cfg.rate_fit.input}});
    std::printf("rate-fit: alpha = %.4f +/- %.4f, c = %.4f +/- %.4f over %zu points "
                "(%.2f decades); residual ratio vs exponential %.2f\n",
                fit.alpha, fit.alpha_std_error, fit.c, fit.c_std_error, fit.n_usable,
                fit.time_decades, ratio);
    return {"ratefit.json"};
}

// --- selftest ----------------------------------------------------------------

struct SelfTest {
    int run = 0;
    int failed = 0;

    void check(bool ok, const std::string& name, const std::string& detail = "") {
        ++run;
        if (!ok) ++failed;
        std::printf("[%s] %s%s%s\n", ok ? "ok" : "FAIL", name.c_str(),
                    detail.empty() ? "" : ": ", detail.c_str());
    }
};

std::vector<std::string> cmd_selftest(const ExperimentConfig& cfg, SimdBackend backend,
                                      const fs::path& out) {
    SelfTest t;
    const ModelParams& model = cfg.model;
    const LyapunovParams& lyap = cfg.lyapunov;

    {
        CounterRng a(7, 3, StreamPurpose::dynamics);
        CounterRng b(7, 3, StreamPurpose::dynamics);
        CounterRng c(7, 3, StreamPurpose::gibbs);
        bool det = true, range = true;
        for (std::uint64_t k = 0; k < 64; ++k) {
            const double u = a.uniform(k);
            det = det && (u == b.uniform(k));
            range = range && u > 0.0 && u < 1.0;
        }
        t.check(det && range && a.uniform(0) != c.uniform(0), "stream determinism and range");

        MeanAcc m;
        CounterRng g(11, 0, StreamPurpose::synthetic);
        for (std::uint64_t k = 0; k < 20000; ++k) m.add(g.normal(k));
        const double var = m.sum_sq / 20000.0 - m.mean() * m.mean();
        t.check(std::fabs(m.mean()) < 0.03 && std::fabs(var - 1.0) < 0.05,
                "gaussian stream moments");
    }
    {
        const bool ok =
            std::fabs(correction1(model, State{0, 0, 0, 2}) - 1.5) < 1e-12 &&
            std::fabs(correction2(model, State{0, 0, 0, 2}) - 1.375) < 1e-12 &&
            std::fabs(p2_bar(model, State{0, 0, 1, 4}) - 296.0 / 81.0) < 1e-12 &&
            std::fabs(hamiltonian(model, State{0, std::numbers::pi, 1, 2}) - 3.5) < 1e-12;
        t.check(ok, "substitution oracles for the averaged momentum");
    }
    {
        const Observable H = observable_hamiltonian(model);
        const Observable E = observable_exp_beta_H(model, lyap.beta_minus);
        CounterRng rng(5, 0, StreamPurpose::synthetic);
        double worst_h = 0.0, worst_e = 0.0;
        for (std::uint64_t i = 0; i < 1000; ++i) {
            const State x{kTwoPi * rng.uniform(4 * i), kTwoPi * rng.uniform(4 * i + 1),
                          6.0 * (rng.uniform(4 * i + 2) - 0.5),
                          6.0 * (rng.uniform(4 * i + 3) - 0.5)};
            const double lh = apply_generator(model, H, x);
            const double ref_h = model.gamma * (model.temperature - x.p1 * x.p1);
            worst_h = std::max(worst_h, std::fabs(lh - ref_h) / std::max(1.0, std::fabs(ref_h)));
            const double b = lyap.beta_minus;
            const double h = hamiltonian(model, x);
            const double ref_e = model.gamma * b *
                                 ((b * model.temperature - 1.0) * x.p1 * x.p1 +
                                  model.temperature) *
                                 std::exp(b * h);
            const double le = apply_generator(model, E, x);
            worst_e = std::max(worst_e, std::fabs(le - ref_e) / std::max(1.0, std::fabs(ref_e)));
        }
        t.check(worst_h < 1e-10, "generator identity on the energy",
                "max rel err " + std::to_string(worst_h));
        t.check(worst_e < 1e-8, "generator identity on exp(beta_minus H)",
                "max rel err " + std::to_string(worst_e));
    }
    {
        const ModelParams free_rotor(1.0, 1e-30, PeriodicPotential::zero());
        std::vector<double> q1{0.0}, q2{0.0}, p1{1.0}, p2{2.0};
        const EnsembleView view{q1.data(), q2.data(), p1.data(), p2.data(), 1};
        ensemble_ops(SimdBackend::scalar).advance(free_rotor, view, StepPlan{0.1, 1, 1, 0, 0});
        const double decay = std::exp(-0.1);
        const bool ok = std::fabs(q2[0] - 0.2) < 1e-12 &&
                        std::fabs(p1[0] - decay) < 1e-12 && p2[0] == 2.0 &&
                        std::fabs(q1[0] - 0.05 * (1.0 + decay)) < 1e-12;
        t.check(ok, "splitting integrator exact on the decoupled rotor");
    }
    {
        const GibbsMeasure mu(model);
        MeanAcc cs, p1s;
        for (std::uint64_t i = 0; i < 20000; ++i) {
            const State x = mu.sample(cfg.seed, i);
            cs.add(std::cos(x.s()));
            p1s.add(x.p1 * x.p1);
        }
        const double ref = mu.expect_gap([](double s) { return std::cos(s); });
        const double z1 = (cs.mean() - ref) / cs.std_error();
        const double z2 = (p1s.mean() - model.temperature) / p1s.std_error();
        t.check(std::fabs(z1) < 4.0 && std::fabs(z2) < 4.0, "direct sampler moments",
                "z = " + std::to_string(z1) + ", " + std::to_string(z2));
    }
    {
        const double lf0 = eval_logF(model, lyap, State{0, 0, 0, 0});
        const double ref = std::log1p(std::exp(lyap.beta_minus * hamiltonian(model, State{0, 0, 0, 0})));
        t.check(std::fabs(lf0 - ref) < 1e-14, "log F at the origin");

        const std::vector<State> probes = {State{0.3, 1.2, 0.4, 3.0}, State{1.0, 5.0, -2.0, 6.0},
                                           State{2.0, 0.5, 1.5, -4.0}, State{0.0, 3.0, 0.0, 1.4}};
        double worst = 0.0;
        for (const State& x : probes) {
            const DriftEval ev = eval_drift(model, lyap, x);
            const LogScalar fd = margin_by_fd(model, lyap, x);
            const LogScalar diff = ev.margin - fd;
            const double rel = std::exp(diff.log_abs - std::max(ev.margin.log_abs, 0.0));
            worst = std::max(worst, diff.sign == 0 ? 0.0 : rel);
        }
        t.check(worst < 1e-3, "drift assembly against finite differences",
                "max rel err " + std::to_string(worst));
    }
    {
        const CertifyReport rep = certify_drift(model, lyap, SamplePlan{5000, 1000.0, true, 0});
        t.check(rep.margin_bounded_at_cap && std::isfinite(rep.log10_A_min) &&
                    rep.log10_A_min > 0.0 && rep.fd_audit_max_rel_err < 1e-3,
                "drift certification on a reduced sample",
                "log10 A_min = " + std::to_string(rep.log10_A_min));
    }
    {
        const MomentScan scan = check_nonintegrability(model, lyap, {0.05, 0.5}, 12);
        t.check(scan.probes[0].divergent && !scan.probes[1].divergent,
                "moment divergence flips across the threshold");
    }
    {
        std::vector<double> max_abs;
        const OrderEstimate est = measure_order(
            model, [&model](const State& x) { return -model.potential.w(x.s()); }, 0.0,
            {64.0, 128.0, 256.0, 512.0}, 32, &max_abs);
        t.check(std::fabs(est.exponent) < 0.25, "order exponent of the bare drift",
                "slope " + std::to_string(est.exponent));
    }
    {
        std::vector<SimdBackend> backends = {SimdBackend::scalar};
        const SimdBackend best = detect_backend();
        if (best != SimdBackend::scalar) backends.push_back(best);
        if (best == SimdBackend::avx512) backends.push_back(SimdBackend::avx2);

        const GibbsMeasure mu(model);
        const std::vector<State> starts = mu.sample_block(17, 64);
        std::vector<std::vector<double>> results;
        for (const SimdBackend b : backends) {
            std::vector<double> q1(64), q2(64), p1(64), p2(64);
            for (std::size_t i = 0; i < 64; ++i) {
                q1[i] = starts[i].q1;
                q2[i] = starts[i].q2;
                p1[i] = starts[i].p1;
                p2[i] = starts[i].p2;
            }
            ensemble_ops(b).advance(model, EnsembleView{q1.data(), q2.data(), p1.data(),
                                                        p2.data(), 64},
                                    StepPlan{cfg.dt, 500, 23, 0, 0});
            std::vector<double> flat;
            flat.insert(flat.end(), q1.begin(), q1.end());
            flat.insert(flat.end(), q2.begin(), q2.end());
            flat.insert(flat.end(), p1.begin(), p1.end());
            flat.insert(flat.end(), p2.begin(), p2.end());
            results.push_back(std::move(flat));
        }
        bool same = true;
        for (std::size_t b = 1; b < results.size(); ++b) same = same && results[b] == results[0];
        t.check(same, "advance kernels agree bit for bit across backends");

        std::vector<std::vector<std::uint64_t>> hits;
        for (const SimdBackend b : backends) {
            EscapePlan plan{cfg.dt, 2.0, 20000, 29, 128, 0.3, 0.5, 5.0};
            std::vector<std::uint64_t> h(plan.n_traj);
            ensemble_ops(b).escape(model, plan, h.data());
            hits.push_back(std::move(h));
        }
        bool esc_same = true;
        bool censored_seen = false;
        for (std::size_t b = 1; b < hits.size(); ++b) esc_same = esc_same && hits[b] == hits[0];
        for (const std::uint64_t h : hits[0]) censored_seen = censored_seen || h == kCensored;
        t.check(esc_same && censored_seen,
                "descent kernels agree across backends and censor at the budget");
    }
    {
        std::vector<double> times;
        for (double tt = 1.0; tt <= 1024.0; tt *= 2.0) times.push_back(tt);
        const RateFit fit =
            fit_stretched_rate(synthetic_decay_curve(2.0, 0.5, times, 0.01, 7), 50, 7);
        t.check(std::fabs(fit.alpha - 0.5) < 0.05 && std::fabs(fit.c - 2.0) < 0.1,
                "stretched fit recovers the synthetic rate",
                "alpha = " + std::to_string(fit.alpha) + ", c = " + std::to_string(fit.c));
    }
    {
        const fs::path tmp = out / "selftest_roundtrip.csv";
        {
            CsvWriter w(tmp, {"a", "b", "c"});
            w.row({1.0, -1.0 / 3.0, 1e300});
        }
        const CsvTable back = read_csv(tmp);
        const bool ok = back.rows.size() == 1 && back.rows[0][0] == 1.0 &&
                        back.rows[0][1] == -1.0 / 3.0 && back.rows[0][2] == 1e300;
        fs::remove(tmp);
        t.check(ok, "csv round trip preserves doubles");
    }

    std::printf("selftest: %d checks, %d failed (backend %s)\n", t.run, t.failed,
                backend_name(backend));
    write_json_file(out / "selftest_summary.json",
                    json{{"checks", t.run}, {"failed", t.failed}});
    if (t.failed > 0)
        throw NumericalError("selftest: " + std::to_string(t.failed) + " of " +
                             std::to_string(t.run) + " checks failed");
    return {"selftest_summary.json"};
}

// --- harness -----------------------------------------------------------------

int run_command(const std::string& name, const CommonOpts& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path out_dir(opts.out);
    fs::path manifest_path;
    Manifest manifest;
    bool manifest_ready = false;

    const auto finalize = [&](const char* status, const std::string& message) {
        if (!manifest_ready) return;
        manifest.status = status;
        manifest.message = message;
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        try {
            write_manifest(manifest_path, manifest);
        } catch (...) {
        }
    };

    try {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec && !fs::is_directory(out_dir))
            throw std::invalid_argument("cannot create output directory " + out_dir.string());
        manifest_path = out_dir / "manifest.json";
        manifest = start_manifest(name, config_to_json(ExperimentConfig{}), 0, "");
        manifest_ready = true;

        std::vector<std::string> sets = opts.sets;
        if (!opts.seed_text.empty()) sets.push_back("seed=" + opts.seed_text);
        if (!opts.simd_text.empty()) sets.push_back("simd=" + opts.simd_text);
        if (!opts.workers_text.empty()) sets.push_back("workers=" + opts.workers_text);
        const fs::path config_path(opts.config);
        const ExperimentConfig cfg =
            load_config(opts.config.empty() ? nullptr : &config_path, sets);
        const SimdBackend backend = backend_from_name(cfg.simd);

        manifest = start_manifest(name, config_to_json(cfg), cfg.seed, backend_name(backend));
        write_manifest(manifest_path, manifest);

        if (name == "simulate") manifest.outputs = cmd_simulate(cfg, backend, out_dir);
        else if (name == "gibbs-sample") manifest.outputs = cmd_gibbs_sample(cfg, backend, out_dir);
        else if (name == "order-check") manifest.outputs = cmd_order_check(cfg, backend, out_dir);
        else if (name == "drift-certify") manifest.outputs = cmd_drift_certify(cfg, backend, out_dir);
        else if (name == "nonintegrability") manifest.outputs = cmd_nonintegrability(cfg, backend, out_dir);
        else if (name == "tv-curve") manifest.outputs = cmd_tv_curve(cfg, backend, out_dir);
        else if (name == "escape-times") manifest.outputs = cmd_escape_times(cfg, backend, out_dir);
        else if (name == "rate-fit") manifest.outputs = cmd_rate_fit(cfg, backend, out_dir);
        else if (name == "selftest") manifest.outputs = cmd_selftest(cfg, backend, out_dir);
        else throw std::invalid_argument("unknown subcommand " + name);

        finalize("ok", "");
        return 0;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        finalize("numerical_error", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        finalize("validation_error", e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermostatted rotor-pair laboratory: drift certification, Gibbs sampling, "
                 "and relaxation measurements"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "integrate trajectories and dump them at the observer stride"},
        {"gibbs-sample", "sample the invariant measure; moments and tail table"},
        {"order-check", "log-log decay exponents of the averaged-momentum calculus"},
        {"drift-certify", "sampled certification of the drift inequality; reports A_min"},
        {"nonintegrability", "truncated moment scan of the test function across epsilon"},
        {"tv-curve", "tail-comparison lower bound on distance to equilibrium over time"},
        {"escape-times", "descent-time statistics of the slow rotor from high momentum"},
        {"rate-fit", "stretched-exponential fit of a lower-bound curve"},
        {"selftest", "fast invariant battery; nonzero exit on any failure"},
    };

    std::vector<CommonOpts> opts(commands.size());
    for (std::size_t i = 0; i < commands.size(); ++i)
        add_common(app.add_subcommand(commands[i].first, commands[i].second), opts[i]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    for (std::size_t i = 0; i < commands.size(); ++i)
        if (app.get_subcommand(commands[i].first)->parsed())
            return run_command(commands[i].first, opts[i]);
    return 1;
}
