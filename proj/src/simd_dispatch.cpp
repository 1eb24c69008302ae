#include "rotor/simd.hpp"

#include <stdexcept>

namespace rotor {

namespace simd {
void advance_scalar(const ModelParams&, const EnsembleView&, const StepPlan&);
void escape_scalar(const ModelParams&, const EscapePlan&, std::uint64_t*);
void advance_avx2(const ModelParams&, const EnsembleView&, const StepPlan&);
void escape_avx2(const ModelParams&, const EscapePlan&, std::uint64_t*);
void advance_avx512(const ModelParams&, const EnsembleView&, const StepPlan&);
void escape_avx512(const ModelParams&, const EscapePlan&, std::uint64_t*);
}  // namespace simd

namespace {
const EnsembleOps kScalarOps{simd::advance_scalar, simd::escape_scalar, "scalar"};
const EnsembleOps kAvx2Ops{simd::advance_avx2, simd::escape_avx2, "avx2"};
const EnsembleOps kAvx512Ops{simd::advance_avx512, simd::escape_avx512, "avx512"};
}  // namespace

SimdBackend detect_backend() {
    if (__builtin_cpu_supports("avx512f")) return SimdBackend::avx512;
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return SimdBackend::avx2;
    return SimdBackend::scalar;
}

SimdBackend backend_from_name(const std::string& name) {
    if (name == "auto") return detect_backend();
    if (name == "scalar") return SimdBackend::scalar;
    if (name == "avx2") {
        if (!(__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")))
            throw std::invalid_argument("simd: this CPU cannot run the avx2 backend");
        return SimdBackend::avx2;
    }
    if (name == "avx512") {
        if (!__builtin_cpu_supports("avx512f"))
            throw std::invalid_argument("simd: this CPU cannot run the avx512 backend");
        return SimdBackend::avx512;
    }
    throw std::invalid_argument("simd: unknown backend '" + name + "'");
}

const EnsembleOps& ensemble_ops(SimdBackend backend) {
    switch (backend) {
        case SimdBackend::scalar: return kScalarOps;
        case SimdBackend::avx2: return kAvx2Ops;
        default: return kAvx512Ops;
    }
}

}  // namespace rotor
