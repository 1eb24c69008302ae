#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "support.hpp"

namespace fs = std::filesystem;

TEST_CASE("scratch directories exist while held and vanish afterwards") {
    fs::path where;
    {
        testing::TempDir tmp("support_probe");
        where = tmp.path();
        CHECK(fs::is_directory(where));
        std::ofstream(where / "x.txt") << "1\n";
        CHECK(fs::exists(where / "x.txt"));
    }
    CHECK(!fs::exists(where));
}

TEST_CASE("json reading round-trips through a file") {
    testing::TempDir tmp("support_json");
    const fs::path p = tmp.path() / "doc.json";
    std::ofstream(p) << R"({"a": 1.5, "b": [1, 2, 3], "c": {"d": "x"}})";
    const nlohmann::json j = testing::read_json(p);
    CHECK(j.at("a") == 1.5);
    CHECK(j.at("b").size() == 3);
    CHECK(j.at("c").at("d") == "x");
    CHECK_THROWS(testing::read_json(tmp.path() / "missing.json"));
}

TEST_CASE("fitted slopes recover exact power laws") {
    std::vector<double> x, y;
    for (const double p : {8.0, 16.0, 32.0, 64.0}) {
        x.push_back(std::log(p));
        y.push_back(std::log(3.0 * std::pow(p, 4.0)));
    }
    CHECK(testing::fitted_slope(x, y) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_THROWS(testing::fitted_slope({1.0}, {2.0}));
    CHECK_THROWS(testing::fitted_slope({1.0, 1.0}, {2.0, 3.0}));
}

TEST_CASE("process runner reports exit codes and captures output") {
    testing::TempDir tmp("support_proc");
    std::string text;
    CHECK(testing::run_process("/bin/sh", "-c 'echo hello; exit 0'",
                               tmp.path() / "c1.txt", &text) == 0);
    CHECK(text.find("hello") != std::string::npos);
    CHECK(testing::run_process("/bin/sh", "-c 'exit 3'", tmp.path() / "c2.txt") == 3);
}
