#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace bcrt {

struct SelftestOptions {
    std::uint64_t seed = 0;
    std::size_t n = 2048;   // grid resolution of the test trees
    unsigned threads = 1;
    double w1_fault = 0.0;  // added to every edge-cut result
};

struct SuiteResult {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    double worst = 0.0;  // largest observed error (suite-specific units)
    bool passed() const noexcept { return failures == 0; }
};

SuiteResult oracle_equivalence_suite(const SelftestOptions& opt);
SuiteResult metric_axioms_suite(const SelftestOptions& opt);
SuiteResult four_point_suite(const SelftestOptions& opt);
SuiteResult edge_list_suite(const SelftestOptions& opt);
SuiteResult meet_suite(const SelftestOptions& opt);
SuiteResult ball_intersection_suite(const SelftestOptions& opt);
SuiteResult lipschitz_suite(const SelftestOptions& opt);
SuiteResult rerooting_suite(const SelftestOptions& opt);
SuiteResult distortion_suite(const SelftestOptions& opt);

std::vector<SuiteResult> run_selftest(const SelftestOptions& opt);

}  // namespace bcrt
