#include "rotor/config.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace rotor {

namespace {

nlohmann::json state_to_json(const State& x) {
    return nlohmann::json::array({x.q1, x.q2, x.p1, x.p2});
}

template <typename T>
T get_field(const nlohmann::json& section, const std::string& where, const char* key) {
    try {
        return section.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: field " + where + "." + key + ": " + e.what());
    }
}

double num_field(const nlohmann::json& section, const std::string& where, const char* key) {
    const double v = get_field<double>(section, where, key);
    if (!std::isfinite(v))
        throw std::invalid_argument("config: field " + where + "." + key + " must be finite");
    return v;
}

// Counts travel through double, so they must be whole and below 2^53.
std::uint64_t count_field(const nlohmann::json& section, const std::string& where,
                          const char* key, std::uint64_t min_value) {
    const double v = num_field(section, where, key);
    if (v < 0.0 || v != std::floor(v) || v > 9.0e15)
        throw std::invalid_argument("config: field " + where + "." + key +
                                    " must be a whole number below 9e15");
    const auto n = static_cast<std::uint64_t>(v);
    if (n < min_value)
        throw std::invalid_argument("config: field " + where + "." + key + " must be at least " +
                                    std::to_string(min_value));
    return n;
}

int int_field(const nlohmann::json& section, const std::string& where, const char* key,
              int min_value) {
    const double v = num_field(section, where, key);
    if (v != std::floor(v) || std::fabs(v) > 1e9)
        throw std::invalid_argument("config: field " + where + "." + key +
                                    " must be an integer");
    const int n = static_cast<int>(v);
    if (n < min_value)
        throw std::invalid_argument("config: field " + where + "." + key + " must be at least " +
                                    std::to_string(min_value));
    return n;
}

State state_field(const nlohmann::json& section, const std::string& where, const char* key) {
    const auto v = get_field<std::vector<double>>(section, where, key);
    if (v.size() != 4)
        throw std::invalid_argument("config: field " + where + "." + key +
                                    " must be [q1, q2, p1, p2]");
    for (const double c : v)
        if (!std::isfinite(c))
            throw std::invalid_argument("config: field " + where + "." + key +
                                        " must be finite");
    return State{v[0], v[1], v[2], v[3]};
}

std::vector<double> numbers_field(const nlohmann::json& section, const std::string& where,
                                  const char* key, std::size_t min_size) {
    const auto v = get_field<std::vector<double>>(section, where, key);
    if (v.size() < min_size)
        throw std::invalid_argument("config: field " + where + "." + key + " needs at least " +
                                    std::to_string(min_size) + " entries");
    for (const double c : v)
        if (!std::isfinite(c))
            throw std::invalid_argument("config: field " + where + "." + key +
                                        " must be finite");
    return v;
}

void merge_checked(nlohmann::json& base, const nlohmann::json& patch, const std::string& path) {
    for (const auto& [key, value] : patch.items()) {
        const std::string here = path.empty() ? key : path + "." + key;
        if (!base.contains(key)) throw std::invalid_argument("config: unknown key " + here);
        nlohmann::json& slot = base[key];
        if (slot.is_object()) {
            if (!value.is_object())
                throw std::invalid_argument("config: " + here + " must be an object");
            merge_checked(slot, value, here);
        } else {
            slot = value;
        }
    }
}

void apply_override(nlohmann::json& doc, const std::string& spec) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw std::invalid_argument("config: override must look like section.key=value, got '" +
                                    spec + "'");
    const std::string path = spec.substr(0, eq);
    const std::string text = spec.substr(eq + 1);

    nlohmann::json* node = &doc;
    std::size_t start = 0;
    std::string walked;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string part = path.substr(start, dot - start);
        walked = walked.empty() ? part : walked + "." + part;
        if (!node->is_object() || !node->contains(part))
            throw std::invalid_argument("config: unknown key " + walked);
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (node->is_object())
        throw std::invalid_argument("config: cannot replace the whole section " + path);

    nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    if (value.is_object())
        throw std::invalid_argument("config: override value for " + path +
                                    " must not be an object");
    *node = std::move(value);
}

ExperimentConfig decode(const nlohmann::json& doc) {
    ExperimentConfig cfg;
    cfg.seed = count_field(doc, "", "seed", 0);
    cfg.workers = int_field(doc, "", "workers", 0);
    cfg.simd = get_field<std::string>(doc, "", "simd");
    if (cfg.simd != "auto" && cfg.simd != "scalar" && cfg.simd != "avx2" &&
        cfg.simd != "avx512")
        throw std::invalid_argument(
            "config: simd must be one of auto, scalar, avx2, avx512");

    const nlohmann::json& integ = doc.at("integrator");
    cfg.dt = num_field(integ, "integrator", "dt");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("config: integrator.dt must be > 0");
    cfg.scheme = get_field<std::string>(integ, "integrator", "scheme");
    if (cfg.scheme != "baoab")
        throw std::invalid_argument("config: integrator.scheme must be \"baoab\"");

    const nlohmann::json& model = doc.at("model");
    const nlohmann::json& pot = model.at("potential");
    cfg.model = ModelParams(num_field(model, "model", "gamma"),
                            num_field(model, "model", "temperature"),
                            PeriodicPotential(numbers_field(pot, "model.potential", "cos", 0),
                                              numbers_field(pot, "model.potential", "sin", 0)));

    const nlohmann::json& lyap = doc.at("lyapunov");
    cfg.lyapunov = LyapunovParams(num_field(lyap, "lyapunov", "beta_minus"),
                                  num_field(lyap, "lyapunov", "beta_plus"),
                                  num_field(lyap, "lyapunov", "delta"),
                                  num_field(lyap, "lyapunov", "drift_constant"),
                                  int_field(lyap, "lyapunov", "cutoff_sharpness", 1));
    cfg.lyapunov.validate_against(cfg.model);

    const nlohmann::json& sim = doc.at("simulate");
    cfg.simulate.x0 = state_field(sim, "simulate", "x0");
    cfg.simulate.gibbs_init = get_field<bool>(sim, "simulate", "gibbs_init");
    cfg.simulate.n_traj = count_field(sim, "simulate", "n_traj", 1);
    cfg.simulate.t_end = num_field(sim, "simulate", "t_end");
    if (!(cfg.simulate.t_end > 0.0))
        throw std::invalid_argument("config: simulate.t_end must be > 0");
    cfg.simulate.stride = count_field(sim, "simulate", "stride", 1);

    const nlohmann::json& gibbs = doc.at("gibbs");
    cfg.gibbs.n_samples = count_field(gibbs, "gibbs", "n_samples", 100);
    cfg.gibbs.tail_log_w = numbers_field(gibbs, "gibbs", "tail_log_w", 1);
    cfg.gibbs.tail_mc_samples = count_field(gibbs, "gibbs", "tail_mc_samples", 100);

    const nlohmann::json& order = doc.at("order_check");
    cfg.order_check.p_values = numbers_field(order, "order_check", "p_values", 4);
    cfg.order_check.rays = numbers_field(order, "order_check", "rays", 1);
    cfg.order_check.n_angles = int_field(order, "order_check", "n_angles", 1);

    const nlohmann::json& certify = doc.at("drift_certify");
    cfg.drift_certify.n_samples = count_field(certify, "drift_certify", "n_samples", 100);
    cfg.drift_certify.momentum_cap = num_field(certify, "drift_certify", "momentum_cap");
    if (!(cfg.drift_certify.momentum_cap > 1.0))
        throw std::invalid_argument("config: drift_certify.momentum_cap must be > 1");
    cfg.drift_certify.write_sample = get_field<bool>(certify, "drift_certify", "write_sample");

    const nlohmann::json& noninteg = doc.at("nonintegrability");
    cfg.nonintegrability.epsilons = numbers_field(noninteg, "nonintegrability", "epsilons", 1);
    cfg.nonintegrability.max_octaves = int_field(noninteg, "nonintegrability", "max_octaves", 2);

    const nlohmann::json& tv = doc.at("tv_curve");
    cfg.tv_curve.x0 = state_field(tv, "tv_curve", "x0");
    cfg.tv_curve.times = numbers_field(tv, "tv_curve", "times", 1);
    cfg.tv_curve.n_traj = count_field(tv, "tv_curve", "n_traj", 1000);
    cfg.tv_curve.n_levels = int_field(tv, "tv_curve", "n_levels", 4);
    cfg.tv_curve.n_bootstrap = int_field(tv, "tv_curve", "n_bootstrap", 0);

    const nlohmann::json& escape = doc.at("escape");
    cfg.escape.p_values = numbers_field(escape, "escape", "p_values", 1);
    cfg.escape.floor = num_field(escape, "escape", "floor");
    if (!(cfg.escape.floor >= 0.0))
        throw std::invalid_argument("config: escape.floor must be >= 0");
    cfg.escape.n_traj = count_field(escape, "escape", "n_traj", 1);
    cfg.escape.step_budget = count_field(escape, "escape", "step_budget", 1);

    const nlohmann::json& fit = doc.at("rate_fit");
    cfg.rate_fit.input = get_field<std::string>(fit, "rate_fit", "input");
    if (cfg.rate_fit.input.empty())
        throw std::invalid_argument("config: rate_fit.input must name a CSV file");
    cfg.rate_fit.n_bootstrap = int_field(fit, "rate_fit", "n_bootstrap", 0);

    return cfg;
}

}  // namespace

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    return nlohmann::json{
        {"seed", cfg.seed},
        {"workers", cfg.workers},
        {"simd", cfg.simd},
        {"integrator", {{"dt", cfg.dt}, {"scheme", cfg.scheme}}},
        {"model",
         {{"gamma", cfg.model.gamma},
          {"temperature", cfg.model.temperature},
          {"potential",
           {{"cos", cfg.model.potential.cosine_coeffs()},
            {"sin", cfg.model.potential.sine_coeffs()}}}}},
        {"lyapunov",
         {{"beta_minus", cfg.lyapunov.beta_minus},
          {"beta_plus", cfg.lyapunov.beta_plus},
          {"delta", cfg.lyapunov.delta},
          {"drift_constant", cfg.lyapunov.A},
          {"cutoff_sharpness", cfg.lyapunov.cutoff_sharpness}}},
        {"simulate",
         {{"x0", state_to_json(cfg.simulate.x0)},
          {"gibbs_init", cfg.simulate.gibbs_init},
          {"n_traj", cfg.simulate.n_traj},
          {"t_end", cfg.simulate.t_end},
          {"stride", cfg.simulate.stride}}},
        {"gibbs",
         {{"n_samples", cfg.gibbs.n_samples},
          {"tail_log_w", cfg.gibbs.tail_log_w},
          {"tail_mc_samples", cfg.gibbs.tail_mc_samples}}},
        {"order_check",
         {{"p_values", cfg.order_check.p_values},
          {"rays", cfg.order_check.rays},
          {"n_angles", cfg.order_check.n_angles}}},
        {"drift_certify",
         {{"n_samples", cfg.drift_certify.n_samples},
          {"momentum_cap", cfg.drift_certify.momentum_cap},
          {"write_sample", cfg.drift_certify.write_sample}}},
        {"nonintegrability",
         {{"epsilons", cfg.nonintegrability.epsilons},
          {"max_octaves", cfg.nonintegrability.max_octaves}}},
        {"tv_curve",
         {{"x0", state_to_json(cfg.tv_curve.x0)},
          {"times", cfg.tv_curve.times},
          {"n_traj", cfg.tv_curve.n_traj},
          {"n_levels", cfg.tv_curve.n_levels},
          {"n_bootstrap", cfg.tv_curve.n_bootstrap}}},
        {"escape",
         {{"p_values", cfg.escape.p_values},
          {"floor", cfg.escape.floor},
          {"n_traj", cfg.escape.n_traj},
          {"step_budget", cfg.escape.step_budget}}},
        {"rate_fit",
         {{"input", cfg.rate_fit.input}, {"n_bootstrap", cfg.rate_fit.n_bootstrap}}},
    };
}

ExperimentConfig load_config(const std::filesystem::path* config_path,
                             const std::vector<std::string>& overrides) {
    nlohmann::json doc = config_to_json(ExperimentConfig{});
    if (config_path != nullptr) {
        std::ifstream in(*config_path);
        if (!in)
            throw std::invalid_argument("config: cannot open " + config_path->string());
        nlohmann::json file;
        try {
            file = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::invalid_argument("config: " + config_path->string() + ": " + e.what());
        }
        if (!file.is_object())
            throw std::invalid_argument("config: document must be a JSON object");
        merge_checked(doc, file, "");
    }
    for (const std::string& spec : overrides) apply_override(doc, spec);
    return decode(doc);
}

}  // namespace rotor
