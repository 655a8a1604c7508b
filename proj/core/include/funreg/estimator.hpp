#pragma once

#include <vector>

#include "funreg/dataset.hpp"
#include "funreg/kernel.hpp"

namespace funreg {

/**
 * Penalty levels and stopping controls for the iterative coordinate descent.
 *
 * lambda1 weights the Hilbert-Schmidt norm of A, lambda2 the RKHS norms of the
 * beta_l, lambda3 the group penalty sum_l ||beta_l||_{n2}. The same absolute
 * tolerance epsilon stops all three loop levels; the inner levels are also
 * capped at max_group_passes / max_coordinate_sweeps.
 */
struct PenaltyConfig
{
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    double lambda3 = 0.0;
    double epsilon = 1e-8;
    int max_iterations = 10000;
    int max_group_passes = 100;
    int max_coordinate_sweeps = 100;

    /// Throws ErrorKind::parameter on negative penalties, lambda1 <= 0 or epsilon <= 0.
    void validate() const;
};

/**
 * Quantities shared by every fit on one dataset: Gram matrices, quadrature
 * weights, transformed kernels and the spectral factors of the ridge step.
 * Immutable once built, so it can back any number of fits concurrently.
 */
struct SolverWorkspace
{
    KernelSpec kernel;
    SampleGrid x_grid;
    SampleGrid y_grid;
    Eigen::Index n1 = 0;
    Eigen::Index n2 = 0;
    Eigen::Index subjects = 0;
    Eigen::Index covariates = 0;

    Matrix x;         // n1 x T
    Matrix z;         // p x T
    Matrix y_star;    // W_R Y

    Matrix k1;        // n2 x n2 Gram on y_grid
    Matrix k2;        // n1 x n1 Gram on x_grid
    Vector w_r_sqrt;  // diagonal of W_R (square roots of y weights)
    Vector w_s;       // diagonal of W_S (x weights)
    Matrix k1_star;   // W_R K1
    Matrix k2_star;   // K2 W_S
    Matrix k1_star_inv; // (K1*)^{-1} with the floored inverse of K1
    Matrix k3;        // (K1*)^{-T} K1 (K1*)^{-1}
    Matrix k1_sqrt, k2_sqrt, k1_inv_sqrt, k2_inv_sqrt;

    SymmetricSpectrum design_spectrum;   // S4 S4^T, S4 = K2^{1/2} W_S X / n1
    SymmetricSpectrum response_spectrum; // K1^{1/2} W_R^2 K1^{1/2}

    // Ridge step R = coef_left * [(ridge_left * Ytilde * ridge_right) ./ (lambda1 + D2 D1^T)] * coef_right.
    Matrix ridge_left;   // U2^T K1^{1/2} W_R
    Matrix ridge_right;  // X^T W_S K2^{1/2} U1 / n1
    Matrix coef_left;    // K1^{-1/2} U2
    Matrix coef_right;   // U1^T K2^{-1/2}

    Matrix k2_star_x;    // K2* X
    Vector z_sq;         // sum_t Z_tl^2
};

SolverWorkspace precompute(const FunctionalDataset& data, const KernelSpec& kernel);

/// Representer coefficients: A(r,s) = k1(r)^T R k2(s), beta(r) = B^T k1(r).
struct CoefficientFit
{
    Matrix r;  // n2 x n1
    Matrix b;  // n2 x p
    bool converged = false;
    int iterations = 0;
    /// Full objective at R = B = 0, then after every R update and every B update.
    std::vector<double> objective_trace;
};

/// Objective sequences from the two inner levels, one vector per inner run.
struct FitTrace
{
    std::vector<std::vector<double>> group_passes;
    std::vector<std::vector<double>> coordinate_sweeps;
};

/// Penalized least-squares objective in (R, B).
double objective(const SolverWorkspace& ws, const Matrix& r, const Matrix& b, const PenaltyConfig& cfg);

/// Gradient of the differentiable part (loss + lambda1 + lambda2 terms).
struct SmoothGradient
{
    Matrix r;
    Matrix b;
};
SmoothGradient smooth_gradient(const SolverWorkspace& ws, const Matrix& r, const Matrix& b, const PenaltyConfig& cfg);

/// Closed-form ridge update of R given B; lambda1 must be > 0.
Matrix update_r(const SolverWorkspace& ws, const Matrix& b, double lambda1);

/// Ridge update of R for an explicit working response Ytilde (n2 x T).
Matrix update_r_for_response(const SolverWorkspace& ws, const Matrix& y_tilde, double lambda1);

/// g_l = sum_t Z_tl * partial_residual_t (partial residual excludes group l).
Vector group_correlation(const SolverWorkspace& ws, const Matrix& partial_residual, Eigen::Index l);

/// True when group l must be zero: (2 sqrt(n2) / lambda3) ||g_l|| < 1. Requires lambda3 > 0.
bool group_check(const SolverWorkspace& ws, const Matrix& partial_residual, Eigen::Index l, double lambda3);
bool group_check(const Vector& correlation, Eigen::Index n2, double lambda3);

/**
 * One coordinate of a group: minimize
 *   curvature * h^2 - 2 * linear * h + penalty * sqrt(h^2 + others_sq)
 * which is the coordinate objective with constants dropped.
 */
struct ScalarSubproblem
{
    double curvature = 1.0;
    double linear = 0.0;
    double penalty = 0.0;
    double others_sq = 0.0;

    double value(double h) const;
};

/// Unique minimizer; soft threshold when others_sq == 0, safeguarded Newton otherwise.
double solve_scalar(const ScalarSubproblem& problem);

/**
 * Minimizer over h_lk with the rest of h_l fixed. partial_residual is
 * Ytilde^l (n2 x T). Throws ErrorKind::degenerate when
 * sum_t Z_tl^2 + lambda2 K3_kk <= 0.
 */
double update_h_coordinate(const SolverWorkspace& ws, Eigen::Index l, Eigen::Index k, const Vector& h_l,
                           const Matrix& partial_residual, double lambda2, double lambda3);

/// Group update of B given R, starting from b_start. lambda3 == 0 is solved in closed form.
Matrix update_b(const SolverWorkspace& ws, const Matrix& r, const Matrix& b_start, const PenaltyConfig& cfg,
                FitTrace* trace = nullptr);

/// Alternate update_r and update_b from R = B = 0 until the objective decrease drops below epsilon.
CoefficientFit fit(const SolverWorkspace& ws, const PenaltyConfig& cfg, FitTrace* trace = nullptr);
CoefficientFit fit(const FunctionalDataset& data, const KernelSpec& kernel, const PenaltyConfig& cfg,
                   FitTrace* trace = nullptr);

/// Optimality diagnostics for one covariate group, in the h = K1* b parametrization.
struct GroupKkt
{
    bool active = false;
    /// (2 sqrt(n2) / lambda3) ||g_l||; must be <= 1 for a zero group.
    double ratio = 0.0;
    /// ||stationarity residual|| / scale for an active group; 0 for a zero group.
    double stationarity = 0.0;
    /// ||Y*||_F * ||Z_l||, the bound on ||g_l|| used to normalize the residual.
    double scale = 0.0;
};
std::vector<GroupKkt> kkt_report(const SolverWorkspace& ws, const Matrix& r, const Matrix& b, const PenaltyConfig& cfg);

/// Everything needed to evaluate and serialize a fitted model.
struct FittedModel
{
    KernelSpec kernel;
    SampleGrid x_grid;
    SampleGrid y_grid;
    PenaltyConfig penalty;
    CoefficientFit coefficients;

    Eigen::Index covariates() const noexcept { return coefficients.b.cols(); }
};

FittedModel make_model(const SolverWorkspace& ws, const PenaltyConfig& cfg, CoefficientFit coefficients);

} // namespace funreg
