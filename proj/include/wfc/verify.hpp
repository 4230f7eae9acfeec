#pragma once

// Self-check suites behind the `verify` verb: dioid laws, the two exact
// S_win routes against each other, the a-priori sandwich, MGF-bound
// dominance over sampled paths, and the Markov-chain structure checks.

#include <cstdint>
#include <string>
#include <vector>

namespace wfc::verify {

enum class Fault {
    None,
    WindowSignFlip,  // the sandwich suite evaluates S_win with -w
};

struct Options {
    std::uint64_t seed = 1;
    Fault fault = Fault::None;
    unsigned jobs = 1;
};

struct SuiteResult {
    std::string name;
    std::int64_t checks = 0;
    std::int64_t failures = 0;
    double seconds = 0.0;
    std::string first_failure;
};

std::vector<SuiteResult> run_all(const Options& options);

/// One line per suite plus a total; the caller decides the exit status.
std::string format_report(const std::vector<SuiteResult>& results);

bool all_passed(const std::vector<SuiteResult>& results);

}  // namespace wfc::verify
