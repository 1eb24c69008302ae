#include "rotor/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "rotor/averaging.hpp"
#include "rotor/logdomain.hpp"
#include "rotor/philox.hpp"
#include "rotor/potential.hpp"
#include "rotor/quadrature.hpp"

namespace rotor {

namespace {

// log erfc(z), switching to the asymptotic series once erfc underflows the
// comfortable range of the library function.
double log_erfc(double z) {
    if (z < 25.0) return std::log(std::erfc(z));
    const double inv = 1.0 / (2.0 * z * z);
    return -z * z - std::log(z * std::sqrt(M_PI)) + std::log1p(-inv * (1.0 - 3.0 * inv));
}

// log P(X > a) for X ~ N(0, sigma^2).
double log_gauss_upper(double a, double sigma) {
    return std::log(0.5) + log_erfc(a / (sigma * std::sqrt(2.0)));
}

}  // namespace

GibbsMeasure::GibbsMeasure(const ModelParams& params, int table_size) : params_(params) {
    if (table_size < 8) throw std::invalid_argument("GibbsMeasure: table_size must be at least 8");
    const int n = table_size;
    const double h = kTwoPi / n;
    const double invT = 1.0 / params_.temperature;

    density_.resize(n + 1);
    for (int i = 0; i < n; ++i) density_[i] = std::exp(-params_.potential.W(i * h) * invT);
    density_[n] = density_[0];

    // Periodic rectangle sum: spectrally accurate for the analytic density.
    double zs = 0.0;
    for (int i = 0; i < n; ++i) zs += density_[i];
    log_Zs_ = std::log(zs * h);

    cdf_.assign(n + 1, 0.0);
    for (int i = 0; i < n; ++i) cdf_[i + 1] = cdf_[i] + 0.5 * h * (density_[i] + density_[i + 1]);
    const double total = cdf_[n];
    for (double& c : cdf_) c /= total;
    cdf_[n] = 1.0;
}

double GibbsMeasure::log_partition() const {
    return std::log(kTwoPi) + log_Zs_ + std::log(kTwoPi * params_.temperature);
}

double GibbsMeasure::gap_density(double s) const {
    return std::exp(-params_.potential.W(s) / params_.temperature - log_Zs_);
}

double GibbsMeasure::expect_gap(const std::function<double(double)>& g) const {
    const int n = static_cast<int>(density_.size()) - 1;
    const double h = kTwoPi / n;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        num += g(i * h) * density_[i];
        den += density_[i];
    }
    return num / den;
}

double GibbsMeasure::invert_gap_cdf(double u) const {
    const int n = static_cast<int>(density_.size()) - 1;
    const double h = kTwoPi / n;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    int i = static_cast<int>(it - cdf_.begin()) - 1;
    i = std::clamp(i, 0, n - 1);

    // Exact inversion of the quadratic cell mass of the linear density.
    const double frac = (u - cdf_[i]) / (cdf_[i + 1] - cdf_[i]);
    const double d0 = density_[i];
    const double slope = density_[i + 1] - d0;
    const double m = frac * (d0 + 0.5 * slope);
    double t;
    if (std::fabs(slope) < 1e-12 * d0) {
        t = m / d0;
    } else {
        t = (-d0 + std::sqrt(d0 * d0 + 2.0 * slope * m)) / slope;
    }
    return reduce_angle((i + std::clamp(t, 0.0, 1.0)) * h);
}

State GibbsMeasure::sample(std::uint64_t seed, std::uint64_t index) const {
    CounterRng rng(seed, index, StreamPurpose::gibbs);
    const auto u = rng.uniform_pair(0);
    const double sqrt_T = std::sqrt(params_.temperature);
    State x;
    x.q1 = kTwoPi * u[1];
    if (x.q1 >= kTwoPi) x.q1 = 0.0;
    x.q2 = reduce_angle(x.q1 + invert_gap_cdf(u[0]));
    x.p1 = sqrt_T * rng.normal(2);
    x.p2 = sqrt_T * rng.normal(3);
    return x;
}

std::vector<State> GibbsMeasure::sample_block(std::uint64_t seed, std::uint64_t count,
                                              std::uint64_t index_offset) const {
    std::vector<State> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(sample(seed, index_offset + i));
    return out;
}

namespace {

// Gaussian mass of {p2 : log F(s, p1, p2) >= log_w} on one momentum line.
// The level set is a union of intervals: two unbounded tails guaranteed by
// the energy term, plus possible islands where the corrections inflate the
// averaged momentum near the cone corner. A coarse scan brackets the wide
// crossings; a fine scan across the corner window catches the islands.
double line_log_mass(const ModelParams& params, const LyapunovParams& lyap, double s, double p1,
                     double log_w) {
    const double T = params.temperature;
    const double sigma = std::sqrt(T);
    const double bm = lyap.beta_minus;
    const double Ws = params.potential.W(s);

    const double disc = 2.0 * log_w / bm - p1 * p1 - 2.0 * Ws;
    if (disc <= 0.0) return 0.0;  // the energy term alone covers the line
    const double R = std::sqrt(disc);

    const double a1 = std::fabs(p1);
    const double band_hi = std::max((1.0 + 2.0 * lyap.delta) * a1, 1.0) + 3.0;
    const double scan_hi = std::min(R + 2.0, band_hi);

    const auto g = [&](double p2) {
        return eval_logF(params, lyap, State{0.0, s, p1, p2}) - log_w;
    };

    std::vector<double> pts;
    for (double x = -scan_hi; x < scan_hi; x += 0.25) pts.push_back(x);
    pts.push_back(scan_hi);
    if (a1 >= 0.15) {
        // Corner window: the correction ladder varies on the scale of the
        // momentum gap, so the grid must resolve it.
        const double sgn = p1 >= 0.0 ? 1.0 : -1.0;
        const double v_reach = a1 + std::max(4.0, std::pow(15.0 * a1 * a1, 1.0 / 6.0) + 1.0);
        const double zlo = (1.0 + lyap.delta) * a1 - 0.02;
        const double zhi = std::min(v_reach, scan_hi);
        for (double v = zlo; v < zhi; v += 0.02) pts.push_back(sgn * v);
        if (a1 <= 1.2) {
            const double olo = 0.3;
            const double ohi = std::min(a1 + 4.0, scan_hi);
            for (double v = olo; v < ohi; v += 0.02) pts.push_back(-sgn * v);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double x, double y) { return std::fabs(x - y) < 1e-9; }),
              pts.end());

    const auto bisect = [&](double lo, double hi, double g_lo) {
        for (int it = 0; it < 80 && hi - lo > 1e-10 * (1.0 + std::fabs(lo)); ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = g(mid);
            if ((gm >= 0.0) == (g_lo >= 0.0)) {
                lo = mid;
                g_lo = gm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    // Level-set boundaries in ascending order. The set always contains both
    // unbounded tails, so the walk below starts inside.
    std::vector<double> bounds;
    double prev_g = g(pts.front());
    if (prev_g < 0.0) {
        const double far = -R - 2.0;
        bounds.push_back(bisect(far, pts.front(), g(far)));
    }
    for (std::size_t k = 1; k < pts.size(); ++k) {
        const double cur_g = g(pts[k]);
        if ((cur_g >= 0.0) != (prev_g >= 0.0)) bounds.push_back(bisect(pts[k - 1], pts[k], prev_g));
        prev_g = cur_g;
    }
    if (prev_g < 0.0) {
        const double far = R + 2.0;
        bounds.push_back(bisect(pts.back(), far, prev_g));
    }

    LogAccumulator acc;
    bool inside = true;
    double lo_edge = kNegInf;  // marker for the left-unbounded segment
    for (double b : bounds) {
        if (inside) {
            if (lo_edge == kNegInf)
                acc.add(log_gauss_upper(-b, sigma));
            else
                acc.add(log_sub_exp(log_gauss_upper(lo_edge, sigma), log_gauss_upper(b, sigma)));
        }
        lo_edge = b;
        inside = !inside;
    }
    if (inside) acc.add(lo_edge == kNegInf ? 0.0 : log_gauss_upper(lo_edge, sigma));
    return std::min(acc.value(), 0.0);
}

}  // namespace

double log_tail_F(const ModelParams& params, const LyapunovParams& lyap, double log_w) {
    if (!std::isfinite(log_w)) throw std::invalid_argument("log_tail_F: log_w must be finite");
    if (log_w <= 0.0) return 0.0;  // F > 1 everywhere
    const double T = params.temperature;
    const double bm = lyap.beta_minus;

    // Relative-angle grid with normalized log-weights.
    const int ns = 128;
    const double hs = kTwoPi / ns;
    std::vector<double> log_ws(ns);
    {
        const int nz = 2048;
        double zs = 0.0;
        for (int i = 0; i < nz; ++i) zs += std::exp(-params.potential.W(i * kTwoPi / nz) / T);
        const double log_Zs = std::log(zs * kTwoPi / nz);
        for (int i = 0; i < ns; ++i)
            log_ws[i] = -params.potential.W(i * hs) / T - log_Zs + std::log(hs);
    }
    const double max_log_ws = *std::max_element(log_ws.begin(), log_ws.end());

    // p1 panels from the origin outward; each panel carries 12-point rules on
    // both signs. Panels are cut once they can no longer move the total.
    std::vector<double> edges = {0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0};
    const double p1_cut = std::sqrt(2.0 * log_w / bm + 80.0 * T);
    while (edges.back() < p1_cut) edges.push_back(edges.back() + 2.0);
    const QuadratureRule rule = gauss_legendre(12);
    const double log_norm = -0.5 * std::log(kTwoPi * T);

    LogAccumulator acc;
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double lo = edges[e], hi = edges[e + 1];
        const double log_panel_bound =
            std::log(2.0 * (hi - lo)) - lo * lo / (2.0 * T) + log_norm + max_log_ws + std::log(2.0 * ns);
        if (acc.value() != kNegInf && log_panel_bound < acc.value() - 40.0) break;
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const double mag = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule.nodes[j];
            const double log_wj =
                std::log(rule.weights[j] * 0.5 * (hi - lo)) - mag * mag / (2.0 * T) + log_norm;
            for (double p1 : {mag, -mag}) {
                for (int i = 0; i < ns; ++i) {
                    const double lm = line_log_mass(params, lyap, i * hs, p1, log_w);
                    acc.add(log_ws[i] + log_wj + lm);
                }
                if (mag == 0.0) break;
            }
        }
    }
    return std::min(acc.value(), 0.0);
}

TailEstimate tail_F_mc(const ModelParams& params, const LyapunovParams& lyap, double log_w,
                       std::uint64_t n, std::uint64_t seed) {
    if (n == 0) throw std::invalid_argument("tail_F_mc: need at least one sample");
    const GibbsMeasure mu(params);
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        if (eval_logF(params, lyap, mu.sample(seed, i)) > log_w) ++hits;
    }
    TailEstimate est;
    est.hits = hits;
    est.samples = n;
    est.probability = static_cast<double>(hits) / static_cast<double>(n);
    est.std_error =
        std::sqrt(est.probability * (1.0 - est.probability) / static_cast<double>(n));
    return est;
}

MomentScan check_nonintegrability(const ModelParams& params, const LyapunovParams& lyap,
                                  const std::vector<double>& epsilons, int max_octaves) {
    if (epsilons.empty())
        throw std::invalid_argument("check_nonintegrability: need at least one epsilon");
    for (double eps : epsilons)
        if (!(eps > 0.0 && eps < 1.0))
            throw std::invalid_argument("check_nonintegrability: epsilon must lie in (0, 1)");
    if (max_octaves < 2)
        throw std::invalid_argument("check_nonintegrability: need at least two octaves");

    const double T = params.temperature;
    MomentScan scan;
    scan.threshold = 1.0 - 1.0 / (T * lyap.beta_plus);

    const int ns = 64;
    const double hs = kTwoPi / ns;
    std::vector<double> log_ws(ns);
    {
        const int nz = 2048;
        double zs = 0.0;
        for (int i = 0; i < nz; ++i) zs += std::exp(-params.potential.W(i * kTwoPi / nz) / T);
        const double log_Zs = std::log(zs * kTwoPi / nz);
        for (int i = 0; i < ns; ++i)
            log_ws[i] = -params.potential.W(i * hs) / T - log_Zs + std::log(hs);
    }

    const QuadratureRule rule_p1 = gauss_legendre(16);
    const QuadratureRule rule_p2 = gauss_legendre(12);
    const double log_norm = -0.5 * std::log(kTwoPi * T);

    struct P1Node {
        double p1, log_w;
    };
    std::vector<P1Node> p1_nodes;
    for (std::size_t j = 0; j < rule_p1.nodes.size(); ++j) {
        const double p1 = rule_p1.nodes[j];  // already on (-1, 1)
        p1_nodes.push_back(
            {p1, std::log(rule_p1.weights[j]) - p1 * p1 / (2.0 * T) + log_norm});
    }

    for (double eps : epsilons) {
        MomentProbe probe;
        probe.epsilon = eps;
        const double growth = 0.5 * (1.0 - eps) * lyap.beta_plus;

        double log_total = kNegInf;
        double first_octave = 0.0;
        for (int k = 0; k < max_octaves; ++k) {
            const double oct_lo = 2.0 * std::pow(2.0, k);
            LogAccumulator oct;
            for (int panel = 0; panel < 4; ++panel) {
                const double lo = oct_lo * (1.0 + 0.25 * panel);
                const double hi = oct_lo * (1.0 + 0.25 * (panel + 1));
                for (std::size_t m = 0; m < rule_p2.nodes.size(); ++m) {
                    const double mag = 0.5 * (lo + hi) + 0.5 * (hi - lo) * rule_p2.nodes[m];
                    const double log_wm =
                        std::log(rule_p2.weights[m] * 0.5 * (hi - lo)) - mag * mag / (2.0 * T) +
                        log_norm;
                    for (double p2 : {mag, -mag}) {
                        for (const P1Node& nd : p1_nodes) {
                            for (int i = 0; i < ns; ++i) {
                                const double pb =
                                    p2_bar(params, State{0.0, i * hs, nd.p1, p2});
                                oct.add(log_ws[i] + nd.log_w + log_wm + growth * pb * pb);
                            }
                        }
                    }
                }
            }
            const double log_I = oct.value();
            if (k == 0) first_octave = log_I;
            log_total = log_add_exp(log_total, log_I);
            probe.log_partial_sums.push_back(log_total);
            if (log_I > first_octave + 60.0) {
                probe.divergent = true;
                break;
            }
        }
        const std::size_t m = probe.log_partial_sums.size();
        probe.last_log_increment =
            m >= 2 ? probe.log_partial_sums[m - 1] - probe.log_partial_sums[m - 2] : 0.0;
        if (probe.last_log_increment > 0.01) probe.divergent = true;
        scan.probes.push_back(probe);
    }
    return scan;
}

}  // namespace rotor
