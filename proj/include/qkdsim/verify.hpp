#pragma once

#include <string>
#include <vector>

namespace qkd {

struct SuiteResult {
    std::string name;
    bool passed;
    std::string detail;  // residuals and the tolerance they were held to
};

// Fast, purely analytic self-checks: Kraus completeness, closed-form versus
// numeric channel agreement, channel invariants, observable algebra, Born
// rule normalization, guessing-strategy identities, X/Y neutralization and
// CHSH bounds. Runs in milliseconds.
std::vector<SuiteResult> run_verification();

bool all_passed(const std::vector<SuiteResult>& suites);
std::string format_verification(const std::vector<SuiteResult>& suites);

}  // namespace qkd
