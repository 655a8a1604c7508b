#pragma once

#include <span>
#include <utility>
#include <vector>

#include "funreg/estimator.hpp"
#include "funreg/simulate.hpp"

namespace funreg {

/// New subjects to predict: x_new is n1 x m on the training x_grid, z_new is p x m.
struct PredictionRequest
{
    Matrix x_new;
    Matrix z_new;
    std::vector<double> target_points;
};

/// A_hat(r, s) = k1(r)^T R k2(s).
double eval_a(const FittedModel& model, double r, double s);

/// beta_hat_l(r) = k1(r)^T b_l; throws ErrorKind::index when l >= p.
double eval_beta(const FittedModel& model, Eigen::Index l, double r);

/**
 * Y_hat(r) = (1/n1) sum_i w_s(i) A_hat(r, s_i) X(s_i) + <beta_hat(r), Z>,
 * returned as |target_points| x m.
 */
Matrix predict(const FittedModel& model, const PredictionRequest& request);

/// Predictions at the model's own y_grid.
Matrix predict_on_grid(const FittedModel& model, const Matrix& x_new, const Matrix& z_new);

/**
 * sqrt( sum_t int (oracle - predicted)^2 / sum_t int oracle^2 ), integrals by
 * the weighted Riemann sum of `grid`. Columns are subjects, rows grid points.
 * Throws ErrorKind::undefined_metric when the oracle energy is zero.
 */
double rmise(const Matrix& predictions, const Matrix& oracles, const SampleGrid& grid);

struct ErrorSummary
{
    double rmse = 0.0;
    double mae = 0.0;
};

/// RMSE and MAE of predicted vs observed over the window points.
ErrorSummary rmse_mae(std::span<const double> predicted, std::span<const double> observed);

/// Oracle signal of each simulated subject at the grid points (n2 x T).
Matrix oracle_on_grid(const SimulatedData& sim, const SampleGrid& grid);

/**
 * Empirical discretized excess risk: mean over subjects of
 * (1/n2) sum_j [(Y - Y_hat)^2 - (Y - Y_true)^2], where Y_true integrates the
 * true A* against the basis-reconstructed X on simpson_nodes nodes.
 */
double discretized_excess_risk(const Matrix& fitted, const SimulatedData& test);
double discretized_excess_risk(const FittedModel& model, const SimulatedData& test);

} // namespace funreg
