#include <doctest.h>

#include <cmath>
#include <vector>

#include "rotor/averaging.hpp"
#include "rotor/generator.hpp"
#include "rotor/lyapunov.hpp"
#include "rotor/params.hpp"
#include "rotor/sampling.hpp"

using namespace rotor;

TEST_CASE("parameter chain is enforced at construction and validation") {
    CHECK_NOTHROW(LyapunovParams(0.9, 1.1, 0.5, 1.0));
    CHECK_THROWS_AS(LyapunovParams(1.1, 0.9, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(LyapunovParams(0.9, 1.1, 0.5, -3.0), std::invalid_argument);
    const LyapunovParams boundary(0.9, 1.08, 0.5, 1.0);
    CHECK_NOTHROW(boundary.validate_against(ModelParams{}));
    // The cone-coupled ceiling: beta_plus < (1 + 1/(1+2 delta)^2) beta_minus.
    CHECK_THROWS_AS(LyapunovParams(0.9, 1.2, 0.5, 1.0).validate_against(ModelParams{}),
                    std::invalid_argument);
    // beta_minus must stay below 1/T.
    CHECK_THROWS_AS(boundary.validate_against(ModelParams(1.0, 1.2, default_potential())),
                    std::invalid_argument);
}

TEST_CASE("log F at the origin reduces to the energy branch") {
    const ModelParams params;
    const LyapunovParams lyap;
    // At p = 0 the cutoff removes the wing term and H = W(0) = -1, so
    // F = 1 + e^{beta_minus H} = 1 + e^{-0.9}.
    const double got = eval_logF(params, lyap, State{0.0, 0.0, 0.0, 0.0});
    CHECK(got == doctest::Approx(std::log1p(std::exp(-0.9))).epsilon(1e-14));
}

TEST_CASE("the wing term takes over deep inside the outer cone") {
    const ModelParams params;
    const LyapunovParams lyap;
    // G = (beta_plus / 2) pbar2^2 dominates: logF ~ G for large |p2| at p1 = 0.
    for (const double p2 : {20.0, 50.0, 200.0}) {
        const double lf = eval_logF(params, lyap, State{0.0, 0.0, 0.0, p2});
        const double g = 0.5 * lyap.beta_plus * p2_bar(params, State{0.0, 0.0, 0.0, p2}) *
                         p2_bar(params, State{0.0, 0.0, 0.0, p2});
        CHECK(lf == doctest::Approx(g).epsilon(1e-6));
    }
}

TEST_CASE("log F is even in the momenta for the cosine potential") {
    const ModelParams params;
    const LyapunovParams lyap;
    for (const State& x : {State{0.0, 0.0, 0.8, 4.0}, State{0.0, 0.0, 0.0, 9.0},
                           State{0.0, 0.0, 1.5, 2.0}}) {
        const State flipped{x.q1, x.q2, -x.p1, -x.p2};
        CHECK(eval_logF(params, lyap, x) ==
              doctest::Approx(eval_logF(params, lyap, flipped)).epsilon(1e-12));
    }
}

TEST_CASE("regions classify by cone angle and radius") {
    CHECK(classify(0.1, 0.2, 0.5) == RegionLabel::Omega0);
    CHECK(classify(2.0, 2.1, 0.5) == RegionLabel::Omega1);
    CHECK(classify(1.0, 1.8, 0.5) == RegionLabel::Omega2);
    CHECK(classify(1.0, 5.0, 0.5) == RegionLabel::Omega3);
    CHECK(classify(-1.0, -5.0, 0.5) == RegionLabel::Omega3);
    CHECK(classify(1.0, 1.4999, 0.5) == RegionLabel::Omega1);
}

TEST_CASE("drift margins match finite differences away from the edges") {
    const ModelParams params;
    const LyapunovParams lyap;
    const std::vector<State> probes = {{0.3, 1.2, 0.4, 3.0},
                                       {1.0, 5.0, -2.0, 6.0},
                                       {2.0, 0.5, 1.5, -4.0},
                                       {0.0, 3.0, 0.0, 1.4},
                                       {0.5, 0.5, 0.9, 0.2}};
    for (const State& x : probes) {
        const DriftEval ev = eval_drift(params, lyap, x);
        const LogScalar fd = margin_by_fd(params, lyap, x);
        const LogScalar diff = ev.margin - fd;
        if (diff.sign == 0.0) continue;
        const double rel = std::exp(diff.log_abs - std::max(ev.margin.log_abs, 0.0));
        CHECK(rel < 1e-3);
    }
}

TEST_CASE("the certified constant is stable when the sample doubles") {
    const ModelParams params;
    const LyapunovParams lyap;
    const CertifyReport a = certify_drift(params, lyap, SamplePlan{4000, 1000.0, true, 0});
    const CertifyReport b = certify_drift(params, lyap, SamplePlan{8000, 1000.0, true, 0});
    CHECK(a.margin_bounded_at_cap);
    CHECK(b.margin_bounded_at_cap);
    CHECK(std::isfinite(a.log10_A_min));
    CHECK(a.log10_A_min > 0.0);
    CHECK(std::fabs(a.log10_A_min - b.log10_A_min) < std::log10(1.2));
    CHECK(a.fd_audit_count > 0);
    CHECK(a.fd_audit_max_rel_err < 1e-3);
    CHECK(b.sample_count > a.sample_count);
}

TEST_CASE("certification rows carry the sampled states when requested") {
    const ModelParams params;
    const LyapunovParams lyap;
    std::vector<CertRow> rows;
    const CertifyReport rep = certify_drift(params, lyap, SamplePlan{500, 100.0, false, 0}, &rows);
    CHECK(rows.size() == rep.sample_count);
    for (const CertRow& r : rows) {
        CHECK(std::isfinite(r.logF));
        CHECK(std::isfinite(r.lf_over_phi));
    }
}

TEST_CASE("lemma constants are positive and locate a small argmax") {
    const ModelParams params;
    const LyapunovParams lyap;
    const LemmaConstants lc = estimate_lemma_constants(params, lyap, SamplePlan{20000, 1000.0, true, 0});
    CHECK(lc.C1_hat > 0.0);
    CHECK(lc.C2_hat > 0.0);
    CHECK(std::isfinite(lc.C1_hat));
    CHECK(std::isfinite(lc.C2_hat));
    CHECK(std::fabs(lc.C1_argmax_p2) < 10.0);
    CHECK(std::fabs(lc.C2_argmax_p2) < 10.0);
}

TEST_CASE("the comparison ODE bound never exceeds its simplification") {
    const LyapunovParams lyap(0.9, 1.1, 0.5, 100.0);
    for (const double f0 : {1.5, 10.0, 1e6}) {
        for (const double t : {0.1, 1.0, 10.0}) {
            const OdeBound b = ode_comparison_bound(lyap, f0, t);
            CHECK(b.exact <= b.simplified * (1.0 + 1e-12));
            CHECK(b.log_exact <= b.log_simplified + 1e-12);
            CHECK(b.exact >= f0);
        }
    }
    // In the log domain the same inequality holds at astronomic magnitudes.
    const OdeBound big = ode_comparison_bound_log(lyap, 5000.0, 3.0);
    CHECK(big.log_exact <= big.log_simplified + 1e-9);
    CHECK(big.log_exact >= 5000.0);
}

TEST_CASE("drift evaluation stays finite across a momentum sweep") {
    const ModelParams params;
    const LyapunovParams lyap;
    for (double p2 = 0.0; p2 <= 40.0; p2 += 0.7) {
        const DriftEval ev = eval_drift(params, lyap, State{0.7, 2.1, 0.3, p2});
        CHECK(std::isfinite(ev.logF));
        CHECK((ev.LF.sign == 0.0 || std::isfinite(ev.LF.log_abs)));
        CHECK((ev.margin.sign == 0.0 || std::isfinite(ev.margin.log_abs)));
    }
}
