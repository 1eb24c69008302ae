// Runtime-dispatched ensemble operations. The hot loops are compiled three
// times (scalar, AVX2+FMA, AVX-512F) from one width-generic template; this
// header exposes the function-pointer table and the backend selection, with
// no intrinsics in sight of the callers.

#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "rotor/params.hpp"

namespace rotor {

struct EnsembleView {
    double* q1;
    double* q2;
    double* p1;
    double* p2;
    std::size_t n;
};

struct StepPlan {
    double dt;
    std::uint64_t n_steps;
    std::uint64_t seed;
    std::uint64_t base_trajectory = 0;
    std::uint64_t step_offset = 0;
};

// Hitting-time run: n_traj trajectories from one start, each stopped at the
// first step with |p2| <= threshold or at the step budget. Since the second
// rotor's position never enters the stopping rule, trajectories evolve in
// reduced coordinates (s, p1, p2). Lanes are refilled from the trajectory
// pool as they finish; noise streams are keyed by trajectory index, so
// hit_steps is identical for every backend and pool schedule.
struct EscapePlan {
    double dt;
    double threshold;
    std::uint64_t step_budget;  // must stay below 2^63
    std::uint64_t seed;
    std::uint64_t n_traj;
    double s0;
    double p1_0;
    double p2_0;
};

inline constexpr std::uint64_t kCensored = std::numeric_limits<std::uint64_t>::max();

struct EnsembleOps {
    void (*advance)(const ModelParams&, const EnsembleView&, const StepPlan&);
    // hit_steps[i] = first step k with |p2| <= threshold, or kCensored
    void (*escape)(const ModelParams&, const EscapePlan&, std::uint64_t* hit_steps);
    const char* name;
};

enum class SimdBackend { scalar, avx2, avx512 };

// Highest backend this CPU supports.
SimdBackend detect_backend();

// "auto" | "scalar" | "avx2" | "avx512"; throws std::invalid_argument on
// unknown names or on backends the CPU cannot run.
SimdBackend backend_from_name(const std::string& name);

const EnsembleOps& ensemble_ops(SimdBackend backend);

inline const char* backend_name(SimdBackend b) {
    switch (b) {
        case SimdBackend::scalar: return "scalar";
        case SimdBackend::avx2: return "avx2";
        default: return "avx512";
    }
}

}  // namespace rotor
