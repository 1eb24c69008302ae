// Width-generic BAOAB ensemble kernels. Included by one translation unit per
// backend; the only difference between backends is which pack<W> the
// templates are instantiated at. Lane j always consumes the noise stream of
// trajectory base+j, so results are independent of W.

#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "rotor/pack.hpp"
#include "rotor/params.hpp"
#include "rotor/simd.hpp"
#include "rotor/vmath.hpp"
#include "rotor/vrng.hpp"

namespace rotor::simd {

// Host-precomputed per-run constants.
struct StepConstants {
    double half_dt;
    double ou_decay;   // exp(-gamma dt)
    double ou_sigma;   // sqrt(T (1 - decay^2))
    std::vector<double> a, b;  // potential coefficients

    StepConstants(const ModelParams& params, double dt)
        : half_dt(0.5 * dt),
          ou_decay(std::exp(-params.gamma * dt)),
          ou_sigma(std::sqrt(params.temperature * (1.0 - ou_decay * ou_decay))),
          a(params.potential.cosine_coeffs()),
          b(params.potential.sine_coeffs()) {}
};

template <int W>
inline pack<W> reduce_angle_p(pack<W> x) {
    using P = pack<W>;
    const P two_pi = P::broadcast(kTwoPi);
    const P inv_two_pi = P::broadcast(1.0 / kTwoPi);
    P r = fnmadd(floor(x * inv_two_pi), two_pi, x);
    r = blend(cmp_ge(r, two_pi), r - two_pi, r);
    r = blend(cmp_lt(r, P::broadcast(0.0)), r + two_pi, r);
    return r;
}

// w(s) = sum_k k (-a_k sin ks + b_k cos ks) via the harmonic recurrence.
template <int W>
inline pack<W> force(const StepConstants& c, pack<W> s) {
    using P = pack<W>;
    const SinCos<W> base = sincos(s);
    P ck = base.cos;
    P sk = base.sin;
    P acc = P::broadcast(0.0);
    for (std::size_t i = 0; i < c.a.size(); ++i) {
        const P term = fmadd(P::broadcast(-c.a[i]), sk, P::broadcast(c.b[i]) * ck);
        acc = fmadd(P::broadcast(static_cast<double>(i + 1)), term, acc);
        if (i + 1 < c.a.size()) {
            const P next_c = fnmadd(sk, base.sin, ck * base.cos);
            sk = fmadd(sk, base.cos, ck * base.sin);
            ck = next_c;
        }
    }
    return acc;
}

template <int W>
struct BlockState {
    pack<W> q1, q2, p1, p2;
    pack<W> w;  // cached force at the current position
};

template <int W>
inline void baoab_step(const StepConstants& c, const GaussianStream<W>& gs, std::uint64_t step,
                       pack<W>& stashed_sin, bool& stash_valid, BlockState<W>& x) {
    using P = pack<W>;
    const P half = P::broadcast(c.half_dt);
    x.p1 = fmadd(half, x.w, x.p1);
    x.p2 = fnmadd(half, x.w, x.p2);
    x.q1 = fmadd(half, x.p1, x.q1);
    x.q2 = fmadd(half, x.p2, x.q2);

    P z;
    if ((step & 1) == 0) {
        const SinCos<W> pair = gs.pair(step >> 1);
        z = pair.cos;
        stashed_sin = pair.sin;
        stash_valid = true;
    } else if (stash_valid) {
        z = stashed_sin;
    } else {
        z = gs.pair(step >> 1).sin;
    }
    x.p1 = fmadd(P::broadcast(c.ou_sigma), z, P::broadcast(c.ou_decay) * x.p1);

    x.q1 = fmadd(half, x.p1, x.q1);
    x.q2 = fmadd(half, x.p2, x.q2);
    x.q1 = reduce_angle_p(x.q1);
    x.q2 = reduce_angle_p(x.q2);
    x.w = force<W>(c, x.q2 - x.q1);
    x.p1 = fmadd(half, x.w, x.p1);
    x.p2 = fnmadd(half, x.w, x.p2);
}

template <int W>
inline void advance_block(const StepConstants& c, double* q1, double* q2, double* p1, double* p2,
                          const StepPlan& plan, std::uint64_t base_traj) {
    BlockState<W> x{pack<W>::load(q1), pack<W>::load(q2), pack<W>::load(p1), pack<W>::load(p2),
                    pack<W>::broadcast(0.0)};
    x.w = force<W>(c, x.q2 - x.q1);
    GaussianStream<W> gs(plan.seed, base_traj, StreamPurpose::dynamics);
    pack<W> stash = pack<W>::broadcast(0.0);
    bool stash_valid = false;
    for (std::uint64_t k = 0; k < plan.n_steps; ++k)
        baoab_step<W>(c, gs, plan.step_offset + k, stash, stash_valid, x);
    x.q1.store(q1);
    x.q2.store(q2);
    x.p1.store(p1);
    x.p2.store(p2);
}

// Per-lane pool state for the hitting-time kernel.
template <int W>
struct EscapeLanes {
    pack<W> s, p1, p2;
    pack<W> w;       // cached force at s
    upack<W> step;   // steps taken by the lane's current trajectory
    dmask<W> alive;  // false once the trajectory has been recorded
};

// Blocks kept in flight per loop; the step body is one serial dependency
// chain, so independent blocks are interleaved to cover its latency.
inline constexpr std::size_t kGroup = 4;

template <int W>
inline void advance_group(const StepConstants& c, const EnsembleView& v, const StepPlan& plan,
                          std::size_t j) {
    using P = pack<W>;
    std::array<BlockState<W>, kGroup> x;
    std::array<P, kGroup> stash;
    std::array<GaussianStream<W>, kGroup> gs = [&]<std::size_t... I>(std::index_sequence<I...>) {
        return std::array<GaussianStream<W>, kGroup>{
            GaussianStream<W>(plan.seed, plan.base_trajectory + j + I * W, StreamPurpose::dynamics)...};
    }(std::make_index_sequence<kGroup>{});
    for (std::size_t g = 0; g < kGroup; ++g) {
        const std::size_t o = j + g * W;
        x[g] = BlockState<W>{P::load(v.q1 + o), P::load(v.q2 + o), P::load(v.p1 + o),
                             P::load(v.p2 + o), P::broadcast(0.0)};
        x[g].w = force<W>(c, x[g].q2 - x[g].q1);
        stash[g] = P::broadcast(0.0);
    }
    bool stash_valid = false;
    for (std::uint64_t k = 0; k < plan.n_steps; ++k)
        for (std::size_t g = 0; g < kGroup; ++g)
            baoab_step<W>(c, gs[g], plan.step_offset + k, stash[g], stash_valid, x[g]);
    for (std::size_t g = 0; g < kGroup; ++g) {
        const std::size_t o = j + g * W;
        x[g].q1.store(v.q1 + o);
        x[g].q2.store(v.q2 + o);
        x[g].p1.store(v.p1 + o);
        x[g].p2.store(v.p2 + o);
    }
}

template <int W>
inline void advance_impl(const ModelParams& params, const EnsembleView& v, const StepPlan& plan) {
    const StepConstants c(params, plan.dt);
    std::size_t j = 0;
    for (; j + kGroup * W <= v.n; j += kGroup * W) advance_group<W>(c, v, plan, j);
    for (; j + W <= v.n; j += W)
        advance_block<W>(c, v.q1 + j, v.q2 + j, v.p1 + j, v.p2 + j, plan, plan.base_trajectory + j);
    for (; j < v.n; ++j)
        advance_block<1>(c, v.q1 + j, v.q2 + j, v.p1 + j, v.p2 + j, plan, plan.base_trajectory + j);
}

// Pool bookkeeping shared by all groups: next trajectory to hand out and the
// number of lanes still holding unrecorded trajectories.
struct EscapePool {
    std::uint64_t next_traj = 0;
    std::uint64_t n_traj = 0;
    std::size_t n_alive = 0;
    std::uint64_t* hit_steps = nullptr;
};

// Records finished lanes of one group and, when the next phase lets a fresh
// trajectory start at local step 0, refills them from the pool. Runs off the
// hot path (once per hit), entirely through stack spills.
template <int W>
inline void escape_refill(const StepConstants& c, const EscapePlan& plan, EscapePool& pool,
                          EscapeLanes<W>& x, GaussianStream<W>& gs, unsigned done_bits,
                          std::uint64_t* traj_ids, bool may_insert) {
    using P = pack<W>;
    alignas(64) double s[W], p1[W], p2[W], alive_sign[W];
    alignas(64) std::uint64_t step[W], key[W];
    x.s.store(s);
    x.p1.store(p1);
    x.p2.store(p2);
    store_u64(x.step, step);
    store_u64(gs.key0, key);
    unsigned alive_bits = to_bits(x.alive);
    for (int lane = 0; lane < W; ++lane) {
        if ((done_bits >> lane) & 1u) {
            pool.hit_steps[traj_ids[lane]] =
                (std::abs(p2[lane]) <= plan.threshold) ? step[lane] : kCensored;
            alive_bits &= ~(1u << lane);
            --pool.n_alive;
        }
        const bool idle = ((alive_bits >> lane) & 1u) == 0;
        if (idle && may_insert && pool.next_traj < pool.n_traj) {
            traj_ids[lane] = pool.next_traj;
            key[lane] = pool.next_traj & 0xFFFFFFFFull;
            ++pool.next_traj;
            s[lane] = plan.s0;
            p1[lane] = plan.p1_0;
            p2[lane] = plan.p2_0;
            step[lane] = 0;
            alive_bits |= 1u << lane;
            ++pool.n_alive;
        }
        alive_sign[lane] = ((alive_bits >> lane) & 1u) ? 1.0 : -1.0;
    }
    x.s = P::load(s);
    x.p1 = P::load(p1);
    x.p2 = P::load(p2);
    x.step = load_u64<W>(step);
    gs.key0 = load_u64<W>(key);
    x.w = force<W>(c, x.s);
    x.alive = cmp_ge(P::load(alive_sign), P::broadcast(0.0));
}

// One reduced-coordinate BAOAB step for a pool lane group. Refill keeps every
// lane's local step parity equal to the pool phase, so the Box-Muller pair
// fetch stays shared while the philox counters differ per lane.
template <int W>
inline void escape_pool_step(const StepConstants& c, const GaussianStream<W>& gs, bool even_phase,
                             pack<W>& stash, EscapeLanes<W>& x) {
    using P = pack<W>;
    const P half = P::broadcast(c.half_dt);
    x.p1 = fmadd(half, x.w, x.p1);
    x.p2 = fnmadd(half, x.w, x.p2);
    x.s = fmadd(half, x.p2 - x.p1, x.s);
    P z;
    if (even_phase) {
        const SinCos<W> pair = gs.pair_at(srl(x.step, 1));
        z = pair.cos;
        stash = pair.sin;
    } else {
        z = stash;
    }
    x.p1 = fmadd(P::broadcast(c.ou_sigma), z, P::broadcast(c.ou_decay) * x.p1);
    x.s = fmadd(half, x.p2 - x.p1, x.s);
    x.s = reduce_angle_p(x.s);
    x.w = force<W>(c, x.s);
    x.p1 = fmadd(half, x.w, x.p1);
    x.p2 = fnmadd(half, x.w, x.p2);
    x.step = add_u64(x.step, upack<W>::broadcast(1));
}

template <int W>
inline void escape_impl(const ModelParams& params, const EscapePlan& plan,
                        std::uint64_t* hit_steps) {
    using P = pack<W>;
    using U = upack<W>;
    const StepConstants c(params, plan.dt);

    // Trajectories already at or below the floor never enter the pool.
    if (std::abs(plan.p2_0) <= plan.threshold) {
        for (std::uint64_t i = 0; i < plan.n_traj; ++i) hit_steps[i] = 0;
        return;
    }

    EscapePool pool{0, plan.n_traj, 0, hit_steps};
    std::array<EscapeLanes<W>, kGroup> x;
    std::array<P, kGroup> stash;
    std::array<GaussianStream<W>, kGroup> gs = [&]<std::size_t... I>(std::index_sequence<I...>) {
        return std::array<GaussianStream<W>, kGroup>{
            ((void)I, GaussianStream<W>(plan.seed, 0, StreamPurpose::dynamics))...};
    }(std::make_index_sequence<kGroup>{});
    std::array<std::array<std::uint64_t, W>, kGroup> traj_ids{};
    for (std::size_t g = 0; g < kGroup; ++g) {
        x[g] = EscapeLanes<W>{P::broadcast(plan.s0), P::broadcast(plan.p1_0),
                              P::broadcast(plan.p2_0), P::broadcast(0.0), U::broadcast(0),
                              cmp_lt(P::broadcast(1.0), P::broadcast(0.0))};
        stash[g] = P::broadcast(0.0);
        escape_refill<W>(c, plan, pool, x[g], gs[g], 0u, traj_ids[g].data(), true);
    }

    const P threshold = P::broadcast(plan.threshold);
    // lanes stop once steps taken reach the budget; hits beyond it are censored
    const U last_ok = U::broadcast(plan.step_budget - 1);
    bool even_phase = true;
    while (pool.n_alive > 0) {
        for (std::size_t g = 0; g < kGroup; ++g)
            escape_pool_step<W>(c, gs[g], even_phase, stash[g], x[g]);
        for (std::size_t g = 0; g < kGroup; ++g) {
            const dmask<W> stopped =
                mask_or(cmp_le(abs(x[g].p2), threshold), cmp_gt_u64(x[g].step, last_ok));
            const dmask<W> done = mask_and(stopped, x[g].alive);
            if (any(done))
                escape_refill<W>(c, plan, pool, x[g], gs[g], to_bits(done), traj_ids[g].data(),
                                 !even_phase);
        }
        even_phase = !even_phase;
        if (even_phase && pool.next_traj < pool.n_traj)
            for (std::size_t g = 0; g < kGroup; ++g)
                if (to_bits(x[g].alive) != (1u << W) - 1u)
                    escape_refill<W>(c, plan, pool, x[g], gs[g], 0u, traj_ids[g].data(), true);
    }
}

}  // namespace rotor::simd
