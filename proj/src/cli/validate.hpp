#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace dynmix::cli {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;  // worst deviation (or the statistic named in detail)
    double threshold = 0.0; // pass bound applied to `measured`
    std::string detail;
    double seconds = 0.0;
};

struct ValidateOptions {
    bool quick = false; // closed-form checks only
    std::uint64_t seed = 1;
    unsigned workers = 0;
};

// Cross-check matrix: closed forms vs GKSL integration vs Monte-Carlo vs
// the brute-force oracle.
std::vector<CheckResult> run_validation(const ValidateOptions& options);

nlohmann::json validation_report(const std::vector<CheckResult>& results, const ValidateOptions& options);

} // namespace dynmix::cli
