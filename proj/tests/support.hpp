// Shared helpers for the test binaries: scratch directories, subprocess
// invocation of the command-line tool, and tiny fitting utilities.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace testing {

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                (tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

// Exit code of `binary args`, with stdout and stderr captured into a file.
inline int run_process(const std::string& binary, const std::string& args,
                       const std::filesystem::path& capture, std::string* text = nullptr) {
    const std::string cmd =
        "'" + binary + "' " + args + " > '" + capture.string() + "' 2>&1";
    const int raw = std::system(cmd.c_str());
    if (text != nullptr) {
        std::ifstream in(capture);
        std::ostringstream buf;
        buf << in.rdbuf();
        *text = buf.str();
    }
    if (raw < 0) return -1;
    return (raw >> 8) & 0xff;
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return nlohmann::json::parse(in);
}

// Least-squares slope of y against x.
inline double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fitted_slope: need two matched points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fitted_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace testing
