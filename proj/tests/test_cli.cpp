#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "atlas/cli.hpp"
#include "atlas/io.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace atlas;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"atlaslab"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("atlaslab_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

}  // namespace

TEST_CASE("config serialization round-trips") {
    cli::RunConfig config;
    config.a = 1.7;
    config.gamma = 0.3;
    config.t_grid = {0.1, 0.7};
    config.record_times = {0.05, 0.1};
    config.master_seed = 987654321;
    config.field = "chi";
    const cli::RunConfig parsed = cli::config_from_json(cli::config_to_json(config));
    CHECK(parsed == config);
}

TEST_CASE("sha256 known vector") {
    CHECK(io::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(io::sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("full-precision doubles round-trip through formatting") {
    for (double v : {1.0 / 3.0, 2.5e-17, -123456.789, 0.1}) {
        const std::string s = io::format_double(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("flags override config file which overrides defaults") {
    const fs::path dir = fresh_dir("precedence");
    cli::RunConfig file_config;
    file_config.a = 2.5;
    file_config.n_particles = 7;
    file_config.out_dir = (dir / "out1").string();
    const fs::path config_path = dir / "config.json";
    io::write_file(config_path, cli::config_to_json(file_config).dump());

    // Layer 1: defaults only.
    REQUIRE(run_cli({"profile", "--n", "5", "--out", (dir / "out0").string()}) == 0);
    const json m0 = read_json(dir / "out0" / "manifest.json");
    CHECK(m0["config"]["a"].get<double>() == 1.0);

    // Layer 2: config file value.
    REQUIRE(run_cli({"profile", "--config", config_path.string()}) == 0);
    const json m1 = read_json(dir / "out1" / "manifest.json");
    CHECK(m1["config"]["a"].get<double>() == 2.5);
    CHECK(m1["config"]["n_particles"].get<int>() == 7);

    // Layer 3: explicit flag wins.
    REQUIRE(run_cli({"profile", "--config", config_path.string(), "--a", "3.5", "--out",
                     (dir / "out2").string()}) == 0);
    const json m2 = read_json(dir / "out2" / "manifest.json");
    CHECK(m2["config"]["a"].get<double>() == 3.5);
    CHECK(m2["config"]["n_particles"].get<int>() == 7);
}

TEST_CASE("simulate twice yields identical artifact hashes") {
    const fs::path dir = fresh_dir("determinism");
    const std::vector<std::string> common{
        "simulate", "--n",   "20",  "--replicas", "2",   "--dt", "0.01", "--T", "0.1",
        "--record-times", "0.05", "0.1", "--seed", "99"};
    auto with_out = [&](const std::string& out) {
        auto args = common;
        args.push_back("--out");
        args.push_back((dir / out).string());
        return args;
    };
    REQUIRE(run_cli(with_out("run1")) == 0);
    REQUIRE(run_cli(with_out("run2")) == 0);
    const json m1 = read_json(dir / "run1" / "manifest.json");
    const json m2 = read_json(dir / "run2" / "manifest.json");
    REQUIRE(m1["artifacts"].size() == m2["artifacts"].size());
    for (std::size_t i = 0; i < m1["artifacts"].size(); ++i) {
        CHECK(m1["artifacts"][i]["file"] == m2["artifacts"][i]["file"]);
        CHECK(m1["artifacts"][i]["sha256"] == m2["artifacts"][i]["sha256"]);
    }
}

TEST_CASE("profile output carries the CSV header and N rows") {
    const fs::path dir = fresh_dir("profile");
    REQUIRE(run_cli({"profile", "--n", "10", "--out", dir.string()}) == 0);
    std::ifstream in(dir / "profile.csv");
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "rank,position");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 10);
}

TEST_CASE("verify runs the fast kernel suite") {
    const fs::path dir = fresh_dir("verify");
    CHECK(run_cli({"verify", "--suite", "kernels", "--out", dir.string()}) == 0);
    const json manifest = read_json(dir / "manifest.json");
    CHECK(manifest["suites"]["criterion_1"].get<bool>());
    CHECK(manifest["suites"]["criterion_2"].get<bool>());
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli({"frobnicate"}) == 2);
    CHECK(run_cli({}) == 2);
    CHECK(run_cli({"simulate", "--no-such-flag"}) == 2);
}

TEST_CASE("environment variable sets the default output directory") {
    const fs::path dir = fresh_dir("envout");
    setenv("ATLASLAB_OUT_DIR", (dir / "from_env").string().c_str(), 1);
    REQUIRE(run_cli({"profile", "--n", "3"}) == 0);
    CHECK(fs::exists(dir / "from_env" / "profile.csv"));
    // An explicit flag still wins.
    REQUIRE(run_cli({"profile", "--n", "3", "--out", (dir / "flagged").string()}) == 0);
    CHECK(fs::exists(dir / "flagged" / "profile.csv"));
    unsetenv("ATLASLAB_OUT_DIR");
}

TEST_CASE("data subcommands emit their documented CSV schemas") {
    const fs::path dir = fresh_dir("surfaces");
    auto first_line = [](const fs::path& p) {
        std::ifstream in(p);
        REQUIRE(in.good());
        std::string line;
        std::getline(in, line);
        return line;
    };
    auto row_count = [](const fs::path& p) {
        std::ifstream in(p);
        std::string line;
        int rows = -1;  // skip header
        while (std::getline(in, line))
            if (!line.empty()) ++rows;
        return rows;
    };

    REQUIRE(run_cli({"kernels", "--out", (dir / "kernels").string()}) == 0);
    CHECK(first_line(dir / "kernels" / "kernels.csv") == "identity,params,residual");
    CHECK(row_count(dir / "kernels" / "kernels.csv") == 27 * 5);

    REQUIRE(run_cli({"gaps", "--n", "4", "--gamma", "1", "--dt", "0.005", "--T", "30",
                     "--burnin", "5", "--thin", "10", "--batches", "10", "--theory", "finite",
                     "--out", (dir / "gaps").string()}) == 0);
    CHECK(first_line(dir / "gaps" / "gaps.csv") ==
          "gap_index,rate,theory_mean,est_mean,ci_halfwidth");
    CHECK(row_count(dir / "gaps" / "gaps.csv") == 3);

    REQUIRE(run_cli({"field", "--n", "60", "--eps", "0.04", "--dt", "0.05", "--T", "0.1",
                     "--t-grid", "0", "0.1", "--x-grid", "0.5", "1.0", "--replicas", "3",
                     "--field", "count", "--out", (dir / "field").string()}) == 0);
    CHECK(first_line(dir / "field" / "field.csv") == "replica,t,x,value");
    CHECK(row_count(dir / "field" / "field.csv") == 3 * 2 * 2);

    REQUIRE(run_cli({"gpath", "--n", "60", "--eps", "0.04", "--dt", "0.05", "--T", "0.1",
                     "--t-grid", "0", "0.1", "--x", "0.5", "--replicas", "3", "--out",
                     (dir / "gpath").string()}) == 0);
    CHECK(first_line(dir / "gpath" / "gpath.csv") == "replica,t,x,value");
    CHECK(row_count(dir / "gpath" / "gpath.csv") == 3 * 2);

    REQUIRE(run_cli({"limitcov", "--a", "1", "--t-grid", "0.5", "1.0", "--x-grid", "1.0",
                     "--out", (dir / "limitcov").string()}) == 0);
    CHECK(first_line(dir / "limitcov" / "limitcov.csv") == "kind,t,tp,x,xp,value");
    CHECK(row_count(dir / "limitcov" / "limitcov.csv") == 4 * 5 + 2);

    REQUIRE(run_cli({"limitsample", "--a", "1", "--x", "1", "--t-grid", "0.5", "1.0",
                     "--replicas", "4", "--out", (dir / "limitsample").string()}) == 0);
    CHECK(first_line(dir / "limitsample" / "limitsample.csv") == "replica,time,value");
    CHECK(row_count(dir / "limitsample" / "limitsample.csv") == 4 * 2);
}

TEST_CASE("lowest subcommand emits a KS table") {
    const fs::path dir = fresh_dir("lowest");
    REQUIRE(run_cli({"lowest", "--gamma", "0", "--a", "1", "--T", "0.5", "--dt", "0.01", "--n",
                     "50", "--replicas", "64", "--seed", "7", "--out", dir.string()}) == 0);
    std::ifstream in(dir / "lowest_ks.csv");
    REQUIRE(in.good());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "statistic,p_value,n");
    CHECK(!row.empty());
}
