#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abcorr/fock.hpp"
#include "abcorr/states.hpp"

namespace abcorr {

struct CheckResult {
    std::string name;
    bool passed = false;
    double residual = 0.0;   // worst-case value of the checked quantity
    double tolerance = 0.0;
    std::string detail;
};

struct ValidateOptions {
    bool perturb = false;              // flip the sign of the entangled state's coherences
    std::vector<Index> dims{16, 32, 64};
    std::uint64_t seed = 7;
    unsigned threads = 0;
};

/// Entangled state with its coherence pair negated, i.e. (|01> - |10>)/sqrt(2).
/// Still a valid state, but no longer the one the closed forms describe.
TwoModeState make_perturbed_ent(Index dim);

/// Fraction of the DFT power of `samples` in bins 0, `bin` and n - `bin`.
double spectral_fraction(const std::vector<double>& samples, std::size_t bin);

std::vector<CheckResult> run_validation(const ValidateOptions& options);

bool all_passed(const std::vector<CheckResult>& results);

std::string format_report(const std::vector<CheckResult>& results);

}  // namespace abcorr
