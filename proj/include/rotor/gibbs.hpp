// The invariant measure pi ~ e^{-H/T} and integrals against it. The measure
// factors into a uniform base angle, a relative angle weighted by e^{-W/T},
// and two independent Gaussian momenta; that product structure drives both
// the direct sampler and the tail quadratures.

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rotor/lyapunov.hpp"
#include "rotor/params.hpp"
#include "rotor/state.hpp"

namespace rotor {

class GibbsMeasure {
  public:
    explicit GibbsMeasure(const ModelParams& params, int table_size = 4096);

    const ModelParams& params() const { return params_; }

    // log of the normalizer of e^{-W(s)/T} over the circle.
    double log_gap_partition() const { return log_Zs_; }

    // log of the full normalizer over T^2 x R^2.
    double log_partition() const;

    // Normalized density of the relative angle.
    double gap_density(double s) const;

    // E[g(s)] under the relative-angle marginal, by quadrature.
    double expect_gap(const std::function<double(double)>& g) const;

    // Deterministic sample addressed by (seed, index): inverse-CDF relative
    // angle, uniform base angle, Gaussian momenta.
    State sample(std::uint64_t seed, std::uint64_t index) const;

    std::vector<State> sample_block(std::uint64_t seed, std::uint64_t count,
                                    std::uint64_t index_offset = 0) const;

  private:
    double invert_gap_cdf(double u) const;

    ModelParams params_;
    double log_Zs_ = 0.0;
    // Piecewise-linear density table on a uniform angle grid with its exact
    // piecewise-quadratic cumulative; the sampler inverts cell by cell.
    std::vector<double> density_;
    std::vector<double> cdf_;
};

// log pi(F > w) for the averaged test function, by quadrature: the relative
// angle and p1 run over product rules, and on each (s, p1) line the set
// {p2 : F >= w} is resolved into intervals whose Gaussian mass is accumulated
// in log domain. Deterministic, accurate to the quadrature mesh.
double log_tail_F(const ModelParams& params, const LyapunovParams& lyap, double log_w);

struct TailEstimate {
    double probability = 0.0;
    double std_error = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
};

// Monte Carlo cross-check of the tail quadrature.
TailEstimate tail_F_mc(const ModelParams& params, const LyapunovParams& lyap, double log_w,
                       std::uint64_t n, std::uint64_t seed);

// One exponential moment probe: the integral of e^{(1-eps) G} over the
// outer-cone block {|p1| <= 1, |p2| >= 2}, accumulated octave by octave in
// |p2| until it either visibly diverges or its increments die out.
struct MomentProbe {
    double epsilon = 0.0;
    bool divergent = false;
    double last_log_increment = 0.0;        // nats added by the final octave
    std::vector<double> log_partial_sums;   // running log-integral per octave
};

struct MomentScan {
    double threshold = 0.0;  // epsilon below which the moment must diverge
    std::vector<MomentProbe> probes;
};

MomentScan check_nonintegrability(const ModelParams& params, const LyapunovParams& lyap,
                                  const std::vector<double>& epsilons, int max_octaves = 14);

}  // namespace rotor
