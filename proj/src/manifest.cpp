#include "rotor/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

#ifndef ROTORLAB_VERSION
#define ROTORLAB_VERSION "0.0.0"
#endif
#ifndef ROTORLAB_GIT_SHA
#define ROTORLAB_GIT_SHA "unknown"
#endif

namespace rotor {

Manifest start_manifest(const std::string& command, const nlohmann::json& config_echo,
                        std::uint64_t seed, const std::string& backend) {
    Manifest m;
    m.command = command;
    m.config_echo = config_echo;
    m.seed = seed;
    m.backend = backend;

    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    m.started_at_utc = buf;
    return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
    nlohmann::json j{
        {"command", m.command},
        {"config", m.config_echo},
        {"seed", m.seed},
        {"backend", m.backend},
        {"status", m.status},
        {"message", m.message},
        {"started_at_utc", m.started_at_utc},
        {"wall_seconds", m.wall_seconds},
        {"outputs", m.outputs},
        {"version", ROTORLAB_VERSION},
        {"git_sha", ROTORLAB_GIT_SHA},
    };
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("manifest: cannot open " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace rotor
