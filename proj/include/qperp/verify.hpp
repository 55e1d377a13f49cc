#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qperp/stats.hpp"

namespace qperp {

struct VerificationCase {
    std::string name;
    std::string inputs;
    double expected;
    double observed;
    double tolerance;
    bool pass;
};

// Machine-readable result of a verification run. The timestamp is whatever
// the caller supplies (empty by default): every field must be a pure
// function of (suite, seed) so reruns are byte-identical.
struct VerificationReport {
    std::string suite_name;
    std::vector<VerificationCase> cases;
    bool overall_pass = true;
    std::uint64_t seed = 0;
    std::string timestamp;
};

VerificationReport run_analytic_suite(std::uint64_t seed);
VerificationReport run_distributional_suite(std::uint64_t seed);
// Both suites, merged; overall_pass is the conjunction.
VerificationReport run_all_suites(std::uint64_t seed);

// Multiple-testing policy for the stochastic checks: a KS case fails only
// if the first run already exceeds the 0.1% critical value, or the 1%-level
// check fails for three derived seeds in a row. first_out receives the
// first run's result.
bool ks_gate(const std::function<KsResult(std::uint64_t)>& run, std::uint64_t seed,
             KsResult* first_out = nullptr);

// Same retry shape for "within 3 standard errors" checks: pass if any of
// three derived seeds lands within 3 SE. run returns (deviation, std_err).
struct DeviationResult {
    double deviation;
    double std_err;
};
bool deviation_gate(const std::function<DeviationResult(std::uint64_t)>& run, std::uint64_t seed,
                    DeviationResult* first_out = nullptr);

void write_report_json(const VerificationReport& report, std::ostream& out);
void print_report(const VerificationReport& report, std::ostream& out);

} // namespace qperp
