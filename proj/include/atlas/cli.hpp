// Command-line front end: configuration with layered precedence
// (defaults < JSON config file < explicit flags), subcommand dispatch, and
// manifest-tracked output files.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace atlas::cli {

struct RunConfig {
    double a = 1.0;
    double gamma = 0.0;
    std::int64_t n_particles = 2000;
    double dt = 1e-3;
    double horizon = 1.0;
    std::string profile = "nu";  // nu | tilde_nu | homogeneous | mu_a
    double eps = 1e-4;
    std::vector<double> t_grid{0.25, 0.5, 1.0};
    std::vector<double> x_grid{0.5, 1.0, 2.0};
    std::vector<double> record_times;  // empty: derived from t_grid
    std::int64_t replicas = 100;
    std::uint64_t master_seed = 1;
    std::string out_dir = "out";
    std::string suite = "all";
    int workers = 0;
    double x = 1.0;
    std::string field = "count";  // count | ranked | chi | chi_tilde | chi_check
    double burnin = 0.0;
    std::int64_t batches = 20;
    std::int64_t thin = 10;
    std::string theory = "product";  // product | finite

    bool operator==(const RunConfig&) const = default;
};

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

/// Entry point used by the atlaslab binary. Returns the process exit code:
/// 0 success, 1 suite failure, 2 usage error.
int run(int argc, const char* const* argv);

}  // namespace atlas::cli
