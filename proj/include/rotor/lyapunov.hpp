// Test function F = 1 + e^{beta_minus H} + rho(p) e^{(beta_plus/2) pbar2^2},
// the bound function phi, and the sampled certification of L F <= phi(F).
//
// F reaches e^{10^7} at reachable states, so every F-valued quantity is kept
// in log or signed-log form end to end. The scale-free margin
//   LF (2 + log F) / F
// compares drift against phi directly: the smallest admissible drift
// constant is the supremum of the positive part of that margin.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rotor/logdomain.hpp"
#include "rotor/params.hpp"
#include "rotor/sampling.hpp"
#include "rotor/state.hpp"

namespace rotor {

// log F by log-sum-exp of the three summands (log 1, beta_minus H,
// log rho + G). Requires only that rho > 0 implies p2 != p1, which the cone
// support guarantees.
double eval_logF(const ModelParams& params, const LyapunovParams& lyap, const State& x);

// phi(s) = A s / (2 + log s) on [1, inf); concave and increasing there.
double phi(const LyapunovParams& lyap, double s);

// log phi(F) from log F, staying in the log domain.
double log_phi(const LyapunovParams& lyap, double logF);

struct DriftEval {
    RegionLabel region;
    double logF = 0.0;
    LogScalar LF;            // L applied to F
    LogScalar margin;        // LF (2 + log F) / F
    LogScalar lf_minus_phi;  // LF - phi(F) at the configured A
};

// Assembles LF from the analytic chain rule through H, rho and pbar2.
DriftEval eval_drift(const ModelParams& params, const LyapunovParams& lyap, const State& x);

// Same margin recomputed from central differences of log F alone, using
//   LF/F = p1 dq1 logF + p2 dq2 logF + w (dp1 - dp2) logF - gamma p1 dp1 logF
//        + gamma T (dp1p1 logF + (dp1 logF)^2).
// Serves as the derivative audit; h is the relative step.
LogScalar margin_by_fd(const ModelParams& params, const LyapunovParams& lyap, const State& x,
                       double h = 1e-5);

struct CertifyReport {
    std::size_t sample_count = 0;
    double log10_A_min = 0.0;          // log10 of the smallest admissible A
    LogScalar worst_margin;            // sup of LF (2+logF)/F over the sample
    LogScalar worst_lf_minus_phi;      // sup of LF - phi(F) at the configured A
    State worst_state{};               // argmax of the margin
    bool margin_bounded_at_cap = true; // sup over outer octave below global sup
    double fd_audit_max_rel_err = 0.0;
    std::size_t fd_audit_count = 0;
};

struct CertRow {
    State x;
    RegionLabel region;
    double logF;
    double lf_over_phi;  // clamped to +-1e12 for the CSV
};

CertifyReport certify_drift(const ModelParams& params, const LyapunovParams& lyap,
                            const SamplePlan& plan, std::vector<CertRow>* rows = nullptr);

struct LemmaConstants {
    double C1_hat = 0.0;  // sup |pbar2^2 - p2^2| over the cone sample
    double C2_hat = 0.0;  // sup p2^2 |L e^G| / e^G over the cone sample
    double C1_argmax_p2 = 0.0;
    double C2_argmax_p2 = 0.0;
};

LemmaConstants estimate_lemma_constants(const ModelParams& params, const LyapunovParams& lyap,
                                        const SamplePlan& plan);

struct OdeBound {
    double exact;       // exp(sqrt((log F0 + 2)^2 + 2At) - 2)
    double simplified;  // F0 exp(sqrt(2At))
    double log_exact;
    double log_simplified;
};

// Closed-form solution of y' = phi(y), y(0) = F0, and the subadditive
// simplification; exact <= simplified always.
OdeBound ode_comparison_bound(const LyapunovParams& lyap, double F0, double t);
OdeBound ode_comparison_bound_log(const LyapunovParams& lyap, double logF0, double t);

}  // namespace rotor
