// The acceptance suite: twelve numbered criteria comparing simulation,
// quadrature, and closed-form routes at fixed tolerances and pinned seeds.
// Each criterion is self-contained and prints one pass/fail line when run
// through the `acceptance` binary or `atlaslab verify`.

#pragma once

#include <string>
#include <vector>

namespace atlas::acceptance {

inline constexpr int kNumCriteria = 12;

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

const char* criterion_name(int id);

/// Runs criterion `id` (1-based). `workers` <= 0 selects hardware
/// concurrency for the simulation-backed criteria.
CriterionResult run_criterion(int id, int workers = 0);

/// Suite-name -> criterion ids mapping used by `atlaslab verify`; "all"
/// selects every criterion. Throws on unknown names.
std::vector<int> criteria_for_suite(const std::string& suite);

std::vector<std::string> suite_names();

/// Formats the standard one-line report.
std::string format_result(const CriterionResult& r);

}  // namespace atlas::acceptance
