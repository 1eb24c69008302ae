// Experiment configuration: one JSON document with a section per
// subcommand. Every field has a default, unknown keys are rejected with
// their full path, and command-line overrides address fields by dotted
// path. The admissibility chain tying beta_minus, beta_plus, delta to the
// temperature is validated at load time.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotor/params.hpp"
#include "rotor/state.hpp"

namespace rotor {

struct SimulateConfig {
    State x0{0.0, 0.0, 0.0, 30.0};
    bool gibbs_init = false;  // draw the starts from pi instead of x0
    std::uint64_t n_traj = 1;
    double t_end = 100.0;
    std::uint64_t stride = 100;  // steps between dumped rows
};

struct GibbsConfig {
    std::uint64_t n_samples = 200000;
    std::vector<double> tail_log_w = {2.0, 5.0, 10.0, 30.0, 100.0};
    std::uint64_t tail_mc_samples = 200000;
};

struct OrderCheckConfig {
    std::vector<double> p_values = {64.0, 128.0, 256.0, 512.0, 1024.0};
    std::vector<double> rays = {0.0, 0.3, -0.3, 0.4, -0.4};
    int n_angles = 256;
};

struct DriftCertifyConfig {
    std::uint64_t n_samples = 100000;
    double momentum_cap = 1000.0;
    bool write_sample = true;
};

struct NonintegrabilityConfig {
    std::vector<double> epsilons = {0.01, 0.05, 0.1, 0.3, 0.5};
    int max_octaves = 14;
};

struct TvCurveConfig {
    State x0{0.0, 0.0, 0.0, 30.0};
    std::vector<double> times = {1.0,  2.0,   4.0,   8.0,   16.0,  32.0,
                                 64.0, 128.0, 256.0, 512.0, 1024.0};
    std::uint64_t n_traj = 20000;
    int n_levels = 24;
    int n_bootstrap = 200;
};

struct EscapeConfig {
    std::vector<double> p_values = {8.0, 16.0};
    double floor = 2.0;
    std::uint64_t n_traj = 256;
    std::uint64_t step_budget = 1000000000;
};

struct RateFitConfig {
    std::string input = "lb_curve.csv";
    int n_bootstrap = 200;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    int workers = 0;  // recorded for provenance; the engine is one thread of SIMD lanes
    std::string simd = "auto";
    double dt = 0.01;
    std::string scheme = "baoab";
    ModelParams model;
    LyapunovParams lyapunov;
    SimulateConfig simulate;
    GibbsConfig gibbs;
    OrderCheckConfig order_check;
    DriftCertifyConfig drift_certify;
    NonintegrabilityConfig nonintegrability;
    TvCurveConfig tv_curve;
    EscapeConfig escape;
    RateFitConfig rate_fit;
};

// The full document with every field populated, suitable for echoing.
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Defaults, then the file (if given), then "section.key=value" overrides,
// then validation. Unknown keys anywhere are an invalid_argument.
ExperimentConfig load_config(const std::filesystem::path* config_path,
                             const std::vector<std::string>& overrides);

}  // namespace rotor
