#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "funreg/dataset.hpp"
#include "funreg/estimator.hpp"

namespace funreg {

/// 10^from, 10^(from+step), ..., 10^to (inclusive, MATLAB-style range).
std::vector<double> log10_range(double from, double step, double to);

struct CVConfig
{
    int folds = 5;
    std::vector<double> lambda1_grid{1.0};
    std::vector<double> lambda2_grid{0.0};
    std::vector<double> lambda3_grid{0.0};
    /// When set, lambda3_grid holds fractions of lambda3_ceiling(data).
    bool lambda3_relative = false;
    std::uint64_t seed = 1;
    /// Worker threads for grid evaluation; results do not depend on it.
    int threads = 1;
    /// Tolerances and iteration caps for every fit; its lambdas are ignored.
    PenaltyConfig base;

    void validate() const;
};

/// lambda1 over 10^(-15:0.5:2); beta terms unused (p = 0).
CVConfig function_on_function_preset();

/// lambda1 x lambda2 over 10^(-18:1:-1) each; lambda3 over 10^(-3:1:0) x lambda3_ceiling(data).
CVConfig mixed_predictor_preset();

/**
 * Smallest lambda3 that zeroes every group at B = 0 when R = 0:
 * 2 sqrt(n2) max_l || sum_t Z_tl Y*_t ||.
 */
double lambda3_ceiling(const FunctionalDataset& data);

using Fold = std::vector<std::size_t>;

/// Seeded shuffle of 0..T-1 cut into contiguous blocks whose sizes differ by at most one.
std::vector<Fold> kfold_split(std::size_t subjects, int folds, std::uint64_t seed);

/// Mean over held-out subjects of (1/n2) sum_j w_r(j) (Y - Y_hat)^2.
double held_out_error(const FittedModel& model, const FunctionalDataset& held_out);

/// Score of each fold (fit on the complement, evaluate on the fold).
std::vector<double> fold_scores(const FunctionalDataset& data, const KernelSpec& kernel, const PenaltyConfig& cfg,
                                const std::vector<Fold>& split);

/// Arithmetic mean of fold_scores.
double cv_score(const FunctionalDataset& data, const KernelSpec& kernel, const PenaltyConfig& cfg,
                const std::vector<Fold>& split);

struct ScoreRow
{
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    std::vector<double> fold_scores;
    double mean = 0.0;
    bool failed = false;
    std::string error;
};

struct CVResult
{
    PenaltyConfig selected;
    double best_score = 0.0;
    /// One row per grid point, lambda1-major then lambda2 then lambda3.
    std::vector<ScoreRow> table;
};

/**
 * Grid search minimizing the mean fold score. Ties go to the larger penalty,
 * compared lexicographically on (lambda1, lambda2, lambda3).
 */
CVResult cv_select(const FunctionalDataset& data, const KernelSpec& kernel, const CVConfig& cv);

/// CSV: lambda1,lambda2,lambda3,fold,fold_score,mean_score (one line per grid point and fold).
void write_score_table(std::ostream& os, const CVResult& result);

} // namespace funreg
