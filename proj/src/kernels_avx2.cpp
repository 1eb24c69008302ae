#include "rotor/kernels.hpp"

namespace rotor::simd {

void advance_avx2(const ModelParams& params, const EnsembleView& v, const StepPlan& plan) {
    advance_impl<4>(params, v, plan);
}

void escape_avx2(const ModelParams& params, const EscapePlan& plan, std::uint64_t* hit_steps) {
    escape_impl<4>(params, plan, hit_steps);
}

}  // namespace rotor::simd
