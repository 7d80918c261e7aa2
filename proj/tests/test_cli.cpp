#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cdp/cli.hpp"

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cdp::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#') v.push_back(line);
    return v;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("constants as JSON") {
    const auto r = cli({"--no-header-timestamp", "constants", "--c5", "0.5"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["psi"].get<double>() == doctest::Approx(0.01798013).epsilon(1e-6));
    CHECK(j["c1"].get<double>() == 331776.0);
    CHECK(j["c5"].get<double>() == 0.5);
    CHECK_FALSE(j["c5_calibrated"].get<bool>());
}

TEST_CASE("scales rows") {
    const auto r = cli({"scales", "--c5", "0.32", "--no-header-timestamp"});
    REQUIRE(r.code == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0].rfind("seed,k,L,", 0) == 0);
    CHECK(lines[4].find(",3,50875,") != std::string::npos);
}

TEST_CASE("oracle on a graph file") {
    const auto dir = std::filesystem::temp_directory_path() / "cdperc_cli_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "path.txt").string();
    {
        std::ofstream f(path);
        f << "vertices 3\nedges 0-1 1-2\nconstraints 1 2 1\n";
    }
    const auto r = cli({"--no-header-timestamp", "oracle", "--graph", path, "--edge", "0", "--t", "0.5", "--n", "1000"});
    REQUIRE(r.code == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 2);
    // P(first edge open) on a path of two edges with middle constraint 2 is t.
    CHECK(lines[1].find(",0.5,1000,0.5,") != std::string::npos);
}

TEST_CASE("exit codes") {
    auto r = cli({"crossing", "--bogus"});
    CHECK(r.code == 2);
    CHECK(nlohmann::json::parse(r.err)["status"] == "config_error");
    CHECK(cli({}).code == 2);
    CHECK(cli({"crossing", "--t", "1.5", "--n", "1"}).code == 2);
    CHECK(cli({"crossing", "--rho", "0.5", "0.5", "0.5", "--n", "1"}).code == 2);
    CHECK(cli({"dualscan", "--N", "0", "--n", "1"}).code == 2);
    r = cli({"--output", "/nonexistent_dir/x/out.csv", "scales", "--c5", "0.3"});
    CHECK(r.code == 3);
    CHECK(nlohmann::json::parse(r.err)["status"] == "runtime_error");
}

TEST_CASE("output is deterministic and replays from its embedded config") {
    const std::vector<std::string> args{"--seed", "17", "--workers", "1", "--no-header-timestamp", "crossing",
                                        "--L", "8", "12", "--t", "0.6", "0.7", "--n", "200"};
    const auto a = cli(args);
    REQUIRE(a.code == 0);
    auto args3 = args;
    args3[3] = "3";
    CHECK(cli(args3).out == a.out);

    const auto cfg = cdp::cli::extract_embedded_config(a.out);
    CHECK(cfg.find("seed = 17") != std::string::npos);
    CHECK(cfg.find("[crossing]") != std::string::npos);
    const auto dir = std::filesystem::temp_directory_path() / "cdperc_cli_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "replay.toml").string();
    {
        std::ofstream f(path);
        f << cfg;
    }
    const auto b = cli({"--config", path, "--no-header-timestamp", "--workers", "2", "crossing"});
    REQUIRE(b.code == 0);
    CHECK(b.out == a.out);
}

}
