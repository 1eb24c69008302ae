#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "rotor/dynamics.hpp"
#include "rotor/gibbs.hpp"
#include "rotor/params.hpp"
#include "rotor/simd.hpp"

using namespace rotor;

namespace {

std::vector<SimdBackend> available_backends() {
    std::vector<SimdBackend> v = {SimdBackend::scalar};
    const SimdBackend best = detect_backend();
    if (best == SimdBackend::avx512) {
        v.push_back(SimdBackend::avx2);
        v.push_back(SimdBackend::avx512);
    } else if (best == SimdBackend::avx2) {
        v.push_back(SimdBackend::avx2);
    }
    return v;
}

struct Ensemble {
    std::vector<double> q1, q2, p1, p2;

    explicit Ensemble(const std::vector<State>& starts)
        : q1(starts.size()), q2(starts.size()), p1(starts.size()), p2(starts.size()) {
        for (std::size_t i = 0; i < starts.size(); ++i) {
            q1[i] = starts[i].q1;
            q2[i] = starts[i].q2;
            p1[i] = starts[i].p1;
            p2[i] = starts[i].p2;
        }
    }
    EnsembleView view() { return {q1.data(), q2.data(), p1.data(), p2.data(), q1.size()}; }
    bool operator==(const Ensemble& o) const {
        return q1 == o.q1 && q2 == o.q2 && p1 == o.p1 && p2 == o.p2;
    }
};

}  // namespace

TEST_CASE("backend names round-trip and auto resolves") {
    CHECK(backend_from_name("scalar") == SimdBackend::scalar);
    CHECK(backend_from_name("auto") == detect_backend());
    CHECK_THROWS_AS(backend_from_name("sse9"), std::invalid_argument);
    for (const SimdBackend b : available_backends())
        CHECK(backend_from_name(backend_name(b)) == b);
}

TEST_CASE("advance is bit-identical across widths, including ragged tails") {
    const ModelParams params;
    const GibbsMeasure mu(params);
    for (const std::size_t n : {1u, 7u, 64u, 93u}) {
        const std::vector<State> starts = mu.sample_block(101, n);
        std::vector<Ensemble> results;
        for (const SimdBackend b : available_backends()) {
            Ensemble e(starts);
            ensemble_ops(b).advance(params, e.view(), StepPlan{0.01, 400, 57, 0, 0});
            results.push_back(std::move(e));
        }
        for (std::size_t k = 1; k < results.size(); ++k) CHECK(results[k] == results[0]);
    }
}

TEST_CASE("advance depends on the trajectory base, not the lane position") {
    // Trajectory j of a block starting at base 0 must equal trajectory 0 of a
    // block starting at base j: streams are keyed by absolute index.
    const ModelParams params;
    const State x0{0.2, 1.0, 0.0, 1.5};
    const std::vector<State> starts(9, x0);
    Ensemble block(starts);
    ensemble_ops(SimdBackend::scalar)
        .advance(params, block.view(), StepPlan{0.01, 200, 77, 0, 0});
    for (const std::size_t j : {0u, 3u, 8u}) {
        Ensemble single(std::vector<State>(1, x0));
        ensemble_ops(SimdBackend::scalar)
            .advance(params, single.view(), StepPlan{0.01, 200, 77, j, 0});
        CHECK(single.p1[0] == block.p1[j]);
        CHECK(single.q2[0] == block.q2[j]);
    }
}

TEST_CASE("a split run continues the noise stream exactly") {
    const ModelParams params;
    const GibbsMeasure mu(params);
    const std::vector<State> starts = mu.sample_block(5, 16);
    Ensemble whole(starts);
    Ensemble split(starts);
    const EnsembleOps& ops = ensemble_ops(detect_backend());
    ops.advance(params, whole.view(), StepPlan{0.01, 300, 19, 0, 0});
    ops.advance(params, split.view(), StepPlan{0.01, 120, 19, 0, 0});
    ops.advance(params, split.view(), StepPlan{0.01, 180, 19, 0, 120});
    CHECK(split == whole);
}

TEST_CASE("the ensemble kernel tracks the scalar reference over a short horizon") {
    const ModelParams params;
    const State x0{0.3, 2.1, 0.4, 1.1};
    const TrajectorySummary ref = simulate(params, x0, 0.01, 10, 33, {}, 1,
                                           IntegratorScheme::baoab, 4);
    Ensemble e(std::vector<State>(5, x0));
    ensemble_ops(SimdBackend::scalar).advance(params, e.view(), StepPlan{0.01, 10, 33, 0, 0});
    CHECK(e.p1[4] == doctest::Approx(ref.final_state.p1).epsilon(1e-9));
    CHECK(e.p2[4] == doctest::Approx(ref.final_state.p2).epsilon(1e-9));
    CHECK(std::cos(e.q1[4]) == doctest::Approx(std::cos(ref.final_state.q1)).epsilon(1e-9));
    CHECK(std::cos(e.q2[4]) == doctest::Approx(std::cos(ref.final_state.q2)).epsilon(1e-9));
}

TEST_CASE("escape hit counts are bit-identical across widths and censor") {
    const ModelParams params;
    const EscapePlan plan{0.01, 2.0, 20000, 29, 128, 0.3, 0.5, 5.0};
    std::vector<std::vector<std::uint64_t>> all;
    for (const SimdBackend b : available_backends()) {
        std::vector<std::uint64_t> hits(plan.n_traj);
        ensemble_ops(b).escape(params, plan, hits.data());
        all.push_back(std::move(hits));
    }
    for (std::size_t k = 1; k < all.size(); ++k) CHECK(all[k] == all[0]);

    int finished = 0, censored = 0;
    for (const std::uint64_t h : all[0]) {
        if (h == kCensored) {
            ++censored;
        } else {
            ++finished;
            CHECK(h <= plan.step_budget);
            CHECK(h > 0);
        }
    }
    CHECK(finished > 0);
    CHECK(censored > 0);
}

TEST_CASE("starting at or below the floor escapes immediately") {
    const ModelParams params;
    for (const SimdBackend b : available_backends()) {
        const EscapePlan plan{0.01, 2.0, 1000, 1, 8, 0.0, 0.0, 1.5};
        std::vector<std::uint64_t> hits(plan.n_traj, 999);
        ensemble_ops(b).escape(params, plan, hits.data());
        for (const std::uint64_t h : hits) CHECK(h == 0);
    }
}

TEST_CASE("escaped lanes keep their first hit while the block runs on") {
    // Two trajectories with the same stream but different budgets must agree
    // on the recorded hit step.
    const ModelParams params;
    const EscapePlan tight{0.01, 2.0, 4000, 29, 64, 0.3, 0.5, 4.0};
    const EscapePlan loose{0.01, 2.0, 60000, 29, 64, 0.3, 0.5, 4.0};
    std::vector<std::uint64_t> a(64), b(64);
    ensemble_ops(detect_backend()).escape(params, tight, a.data());
    ensemble_ops(detect_backend()).escape(params, loose, b.data());
    for (std::size_t i = 0; i < 64; ++i)
        if (a[i] != kCensored) CHECK(a[i] == b[i]);
}
