#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "funreg/simulate.hpp"
#include "funreg/tuning.hpp"

namespace funreg {

/// One simulation setting: scenario, grid size n = n1 = n2, training size T, basis size q, p and kappa.
struct BenchCell
{
    ScenarioKind scenario = ScenarioKind::exponential;
    int n = 5;
    int subjects = 50;
    int q = 5;
    int p = 0;
    double kappa = 1.0;
};

/// Test-set size paired with T training subjects: floor(T / 2), at least 1.
int test_subjects(int subjects);

struct ReplicateResult
{
    std::uint64_t seed = 0;
    double rmise = 0.0;
    double runtime_ms = 0.0;
    PenaltyConfig selected;
    bool converged = true;
    /// Per covariate group: true when the fitted beta_l is not identically zero.
    std::vector<bool> active_groups;
};

/**
 * Simulate T + test_subjects(T) subjects, tune on the first T by cross
 * validation, refit at the selected penalties and score the held-back
 * subjects by RMISE against the oracle on the y grid.
 */
ReplicateResult run_replicate(const BenchCell& cell, std::uint64_t seed, const CVConfig& cv);

struct BenchConfig
{
    BenchCell cell;
    int replicates = 1;
    std::uint64_t seed_base = 1;
    CVConfig cv = function_on_function_preset();
    /// Replicates run concurrently on this many threads; output is sorted by seed.
    int threads = 1;
};

std::vector<ReplicateResult> run_bench(const BenchConfig& config);

double mean_rmise(const std::vector<ReplicateResult>& results);

/// Reference RMISE_avg x 100 for the same cell, if tabulated.
std::optional<double> reference_rmise_x100(const BenchCell& cell);

/**
 * CSV columns: scenario,n,T,q,p,kappa,seed,rmise_x100,runtime_ms. One row per
 * replicate plus a final aggregate row with seed "avg". With timing off,
 * runtime_ms is written as 0 so the file is reproducible byte for byte.
 */
void write_bench_csv(std::ostream& os, const BenchCell& cell, const std::vector<ReplicateResult>& results,
                     bool timing);

} // namespace funreg
