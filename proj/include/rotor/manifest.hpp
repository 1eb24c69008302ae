// Run manifest: one JSON record per invocation, written when the run starts
// and rewritten when it ends, so even an aborted run leaves its
// configuration, seed, and status on disk.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace rotor {

struct Manifest {
    std::string command;
    nlohmann::json config_echo;
    std::uint64_t seed = 0;
    std::string backend;
    std::string status = "running";  // running | ok | validation_error | numerical_error
    std::string message;
    std::string started_at_utc;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;
};

// Stamps the start time; status starts as "running".
Manifest start_manifest(const std::string& command, const nlohmann::json& config_echo,
                        std::uint64_t seed, const std::string& backend);

// Serializes the manifest (plus tool version and git revision) to path.
void write_manifest(const std::filesystem::path& path, const Manifest& m);

}  // namespace rotor
