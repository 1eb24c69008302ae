#include "rotor/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "rotor/averaging.hpp"
#include "rotor/cutoff.hpp"
#include "rotor/errors.hpp"
#include "rotor/generator.hpp"

namespace rotor {

namespace {

// L e^G / e^G for G = (beta_plus/2) pbar2^2, assembled from the cancelled
// residual drift of pbar2:
//   L e^G = e^G (beta_plus pbar2 L pbar2
//               + gamma T beta_plus (d_p1 pbar2)^2 (1 + beta_plus pbar2^2)).
double le_g_over_eg(const ModelParams& params, const LyapunovParams& lyap, const PbarDerivs& pd,
                    double l_pbar2) {
    const double gT = params.gamma * params.temperature;
    const double bp = lyap.beta_plus;
    return bp * pd.pbar2 * l_pbar2 + gT * bp * pd.d_p1 * pd.d_p1 * (1.0 + bp * pd.pbar2 * pd.pbar2);
}

}  // namespace

double eval_logF(const ModelParams& params, const LyapunovParams& lyap, const State& x) {
    const double log_e_term = lyap.beta_minus * hamiltonian(params, x);
    const CutoffValue cv = cutoff_rho_derivs(x.p1, x.p2, lyap.delta, lyap.cutoff_sharpness);
    double log_g_term = kNegInf;
    if (cv.rho > 0.0) {
        const double pb = p2_bar(params, x);
        log_g_term = std::log(cv.rho) + 0.5 * lyap.beta_plus * pb * pb;
    }
    const double terms[3] = {0.0, log_e_term, log_g_term};
    return log_sum_exp(terms);
}

double phi(const LyapunovParams& lyap, double s) {
    if (!(s >= 1.0)) throw std::invalid_argument("phi: argument must be >= 1");
    return lyap.A * s / (2.0 + std::log(s));
}

double log_phi(const LyapunovParams& lyap, double logF) {
    if (!(logF >= 0.0)) throw std::invalid_argument("log_phi: log F must be >= 0");
    return std::log(lyap.A) + logF - std::log(2.0 + logF);
}

DriftEval eval_drift(const ModelParams& params, const LyapunovParams& lyap, const State& x) {
    const double T = params.temperature;
    const double g = params.gamma;
    const double bm = lyap.beta_minus;
    const double bp = lyap.beta_plus;

    DriftEval out;
    out.region = classify(x.p1, x.p2, lyap.delta);

    const double log_e_term = bm * hamiltonian(params, x);
    const CutoffValue cv = cutoff_rho_derivs(x.p1, x.p2, lyap.delta, lyap.cutoff_sharpness);
    const bool in_support =
        cv.rho != 0.0 || cv.d_p1 != 0.0 || cv.d_p2 != 0.0 || cv.d_p1p1 != 0.0;

    double log_g_term = kNegInf;
    double G = 0.0;
    PbarDerivs pd{};
    double l_pbar2 = 0.0;
    if (in_support) {
        pd = pbar_derivs(params, x);
        l_pbar2 = L_pbar2(params, x);
        G = 0.5 * bp * pd.pbar2 * pd.pbar2;
        if (cv.rho > 0.0) log_g_term = std::log(cv.rho) + G;
    }
    const double terms[3] = {0.0, log_e_term, log_g_term};
    out.logF = log_sum_exp(terms);

    // L e^{bm H} = gamma bm ((bm T - 1) p1^2 + T) e^{bm H}
    const double coef_e = g * bm * ((bm * T - 1.0) * x.p1 * x.p1 + T);
    LogScalar le = LogScalar::from_double(coef_e);
    if (le.sign != 0.0) le.log_abs += log_e_term;

    // L (rho e^G) = e^G (L rho + rho L e^G / e^G + 2 gamma T d_p1 rho d_p1 G)
    LogScalar lr = LogScalar::zero();
    if (in_support) {
        const double w = params.potential.w(x.q2 - x.q1);
        const double l_rho = w * (cv.d_p1 - cv.d_p2) - g * x.p1 * cv.d_p1 + g * T * cv.d_p1p1;
        const double bracket = l_rho + cv.rho * le_g_over_eg(params, lyap, pd, l_pbar2) +
                               2.0 * g * T * cv.d_p1 * bp * pd.pbar2 * pd.d_p1;
        lr = LogScalar::from_double(bracket);
        if (lr.sign != 0.0) lr.log_abs += G;
    }

    out.LF = le + lr;

    out.margin = out.LF;
    if (out.margin.sign != 0.0) out.margin.log_abs += std::log(2.0 + out.logF) - out.logF;

    const LogScalar phi_f{1.0, log_phi(lyap, out.logF)};
    out.lf_minus_phi = out.LF - phi_f;
    return out;
}

LogScalar margin_by_fd(const ModelParams& params, const LyapunovParams& lyap, const State& x,
                       double h) {
    const auto u = [&](double q1, double q2, double p1, double p2) {
        return eval_logF(params, lyap, State{q1, q2, p1, p2});
    };
    const double hq = h;
    const double h1 = h * std::max(1.0, std::fabs(x.p1));
    const double h2 = h * std::max(1.0, std::fabs(x.p2));

    const double u0 = u(x.q1, x.q2, x.p1, x.p2);
    // The second difference loses half the significant digits of log F, so it
    // gets a wider step balancing rounding noise against truncation.
    const double eps = std::numeric_limits<double>::epsilon();
    const double hs =
        std::pow(eps * std::max(2.0, std::fabs(u0)), 0.25) * std::max(1.0, std::fabs(x.p1));
    const double u_q1 = (u(x.q1 + hq, x.q2, x.p1, x.p2) - u(x.q1 - hq, x.q2, x.p1, x.p2)) / (2.0 * hq);
    const double u_q2 = (u(x.q1, x.q2 + hq, x.p1, x.p2) - u(x.q1, x.q2 - hq, x.p1, x.p2)) / (2.0 * hq);
    const double u_p1 = (u(x.q1, x.q2, x.p1 + h1, x.p2) - u(x.q1, x.q2, x.p1 - h1, x.p2)) / (2.0 * h1);
    const double u_p1p1 = (u(x.q1, x.q2, x.p1 + hs, x.p2) - 2.0 * u0 + u(x.q1, x.q2, x.p1 - hs, x.p2)) /
                          (hs * hs);
    const double u_p2 = (u(x.q1, x.q2, x.p1, x.p2 + h2) - u(x.q1, x.q2, x.p1, x.p2 - h2)) / (2.0 * h2);

    const double w = params.potential.w(x.q2 - x.q1);
    const double lf_over_f = x.p1 * u_q1 + x.p2 * u_q2 + w * (u_p1 - u_p2) -
                             params.gamma * x.p1 * u_p1 +
                             params.gamma * params.temperature * (u_p1p1 + u_p1 * u_p1);
    return LogScalar::from_double(lf_over_f * (2.0 + u0));
}

namespace {

// The finite-difference stencil must stay inside one smooth branch of the
// cutoff and away from the correction pole at p1 = p2, so skip states whose
// transition coordinates sit close to a smoothstep endpoint and cutoff-support
// states with a small momentum gap.
bool fd_stencil_is_clean(const State& x, double delta) {
    const double n = std::hypot(x.p1, x.p2);
    const double um = 2.0 * n - 1.0;
    if (std::min(std::fabs(um), std::fabs(um - 1.0)) < 0.05) return false;
    const double a1 = std::fabs(x.p1);
    if (a1 < 1e-3) return true;  // ratio deep on the plateau side
    const double uc = (std::fabs(x.p2) / a1 - (1.0 + delta)) / delta;
    if (std::min(std::fabs(uc), std::fabs(uc - 1.0)) < 0.05) return false;
    return uc <= 0.0 || std::fabs(x.p2 - x.p1) >= 0.5;
}

double octave_of(const State& x) {
    return std::floor(std::log2(std::max(1.0, std::hypot(x.p1, x.p2))));
}

}  // namespace

CertifyReport certify_drift(const ModelParams& params, const LyapunovParams& lyap,
                            const SamplePlan& plan, std::vector<CertRow>* rows) {
    lyap.validate_against(params);
    const std::vector<State> sample = build_certification_sample(plan, lyap.delta);

    CertifyReport rep;
    rep.sample_count = sample.size();
    constexpr LogScalar kBelowAll{-1.0, std::numeric_limits<double>::infinity()};
    LogScalar worst = kBelowAll;
    LogScalar worst_diff = kBelowAll;
    LogScalar outer_worst = kBelowAll;
    const double outer_octave = std::floor(std::log2(plan.momentum_cap)) - 1.0;

    std::size_t idx = 0;
    for (const State& x : sample) {
        const DriftEval ev = eval_drift(params, lyap, x);
        if (worst < ev.margin) {
            worst = ev.margin;
            rep.worst_state = x;
        }
        if (worst_diff < ev.lf_minus_phi) worst_diff = ev.lf_minus_phi;
        if (octave_of(x) >= outer_octave && outer_worst < ev.margin) outer_worst = ev.margin;

        // Above log F ~ 50 the finite-difference identity drowns in rounding
        // noise of the second difference, so the audit stays below it.
        if (idx % 97 == 0 && ev.logF <= 50.0 && fd_stencil_is_clean(x, lyap.delta)) {
            const LogScalar fd = margin_by_fd(params, lyap, x);
            const LogScalar diff = fd - ev.margin;
            const double scale = std::max(ev.margin.log_abs, 0.0);
            if (diff.sign != 0.0) {
                const double rel = std::exp(diff.log_abs - scale);
                rep.fd_audit_max_rel_err = std::max(rep.fd_audit_max_rel_err, rel);
            }
            ++rep.fd_audit_count;
        }

        if (rows) {
            CertRow row;
            row.x = x;
            row.region = ev.region;
            row.logF = ev.logF;
            const double log_ratio =
                ev.LF.sign == 0.0 ? kNegInf : ev.LF.log_abs - log_phi(lyap, ev.logF);
            double ratio;
            if (log_ratio > std::log(1e12))
                ratio = 1e12;
            else
                ratio = std::exp(log_ratio);
            row.lf_over_phi = (ev.LF.sign < 0.0 ? -ratio : ratio);
            rows->push_back(row);
        }
        ++idx;
    }

    rep.worst_margin = worst;
    rep.worst_lf_minus_phi = worst_diff;
    rep.margin_bounded_at_cap = outer_worst < worst;
    rep.log10_A_min = worst.positive() ? worst.log_abs / std::log(10.0) : kNegInf;
    return rep;
}

LemmaConstants estimate_lemma_constants(const ModelParams& params, const LyapunovParams& lyap,
                                        const SamplePlan& plan) {
    const std::vector<State> sample = build_cone_sample(plan, lyap.delta);
    LemmaConstants out;
    for (const State& x : sample) {
        const PbarDerivs pd = pbar_derivs(params, x);
        const double l_pbar2 = L_pbar2(params, x);
        const double c1 = std::fabs(pd.pbar2 * pd.pbar2 - x.p2 * x.p2);
        const double c2 = x.p2 * x.p2 * std::fabs(le_g_over_eg(params, lyap, pd, l_pbar2));
        if (c1 > out.C1_hat) {
            out.C1_hat = c1;
            out.C1_argmax_p2 = x.p2;
        }
        if (c2 > out.C2_hat) {
            out.C2_hat = c2;
            out.C2_argmax_p2 = x.p2;
        }
    }
    return out;
}

OdeBound ode_comparison_bound_log(const LyapunovParams& lyap, double logF0, double t) {
    if (!(logF0 >= 0.0)) throw std::invalid_argument("ode_comparison_bound: needs F0 >= 1");
    if (!(t >= 0.0)) throw std::invalid_argument("ode_comparison_bound: needs t >= 0");
    OdeBound out;
    const double a = 2.0 + logF0;
    out.log_exact = std::sqrt(a * a + 2.0 * lyap.A * t) - 2.0;
    out.log_simplified = logF0 + std::sqrt(2.0 * lyap.A * t);
    out.exact = std::exp(out.log_exact);
    out.simplified = std::exp(out.log_simplified);
    return out;
}

OdeBound ode_comparison_bound(const LyapunovParams& lyap, double F0, double t) {
    if (!(F0 >= 1.0)) throw std::invalid_argument("ode_comparison_bound: needs F0 >= 1");
    return ode_comparison_bound_log(lyap, std::log(F0), t);
}

}  // namespace rotor
