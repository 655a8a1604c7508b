#include "funreg/evaluation.hpp"

#include <cmath>
#include <string>

#include "funreg/error.hpp"

namespace funreg {

namespace {

void check_unit(double v, const char* what)
{
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::domain, std::string(what) + " outside [0,1]");
}

} // namespace

double eval_a(const FittedModel& model, double r, double s)
{
    check_unit(r, "r");
    check_unit(s, "s");
    const Vector kr = kernel_section(model.kernel, r, model.y_grid.points());
    const Vector ks = kernel_section(model.kernel, s, model.x_grid.points());
    return kr.dot(model.coefficients.r * ks);
}

double eval_beta(const FittedModel& model, Eigen::Index l, double r)
{
    if (l < 0 || l >= model.covariates())
        fail(ErrorKind::index, "covariate index " + std::to_string(l) + " out of range (p = " +
                                   std::to_string(model.covariates()) + ")");
    check_unit(r, "r");
    return kernel_section(model.kernel, r, model.y_grid.points()).dot(model.coefficients.b.col(l));
}

Matrix predict(const FittedModel& model, const PredictionRequest& request)
{
    const auto n1 = static_cast<Eigen::Index>(model.x_grid.size());
    if (request.x_new.rows() != n1)
        fail(ErrorKind::shape, "x_new has " + std::to_string(request.x_new.rows()) + " rows, model expects " +
                                   std::to_string(n1));
    if (request.z_new.rows() != model.covariates())
        fail(ErrorKind::shape, "z_new has " + std::to_string(request.z_new.rows()) +
                                   " covariates, model expects " + std::to_string(model.covariates()));
    if (request.z_new.cols() != request.x_new.cols())
        fail(ErrorKind::shape, "x_new and z_new must have the same number of subjects");
    for (double r : request.target_points) check_unit(r, "target point");

    const Matrix k_target = cross_gram(model.kernel, request.target_points, model.y_grid.points());
    const Matrix k2 = gram_matrix(model.kernel, model.x_grid.points());
    const Vector w_s = model.x_grid.weight_vector();
    // (1/n1) K(target, r) R K2 W_S X + K(target, r) B Z
    const Matrix functional =
        (1.0 / static_cast<double>(n1)) * (model.coefficients.r * (k2 * (w_s.asDiagonal() * request.x_new)));
    Matrix inner = functional;
    if (model.covariates() > 0) inner += model.coefficients.b * request.z_new;
    return k_target * inner;
}

Matrix predict_on_grid(const FittedModel& model, const Matrix& x_new, const Matrix& z_new)
{
    return predict(model, PredictionRequest{x_new, z_new, model.y_grid.points()});
}

double rmise(const Matrix& predictions, const Matrix& oracles, const SampleGrid& grid)
{
    if (predictions.rows() != oracles.rows() || predictions.cols() != oracles.cols())
        fail(ErrorKind::shape, "rmise: predictions and oracles differ in shape");
    if (static_cast<std::size_t>(oracles.rows()) != grid.size())
        fail(ErrorKind::shape, "rmise: rows do not match the integration grid");
    const Vector w = grid.weight_vector();
    const double error = (w.asDiagonal() * (oracles - predictions).cwiseAbs2()).sum();
    const double energy = (w.asDiagonal() * oracles.cwiseAbs2()).sum();
    if (!(energy > 0.0)) fail(ErrorKind::undefined_metric, "rmise: oracle signal has zero energy");
    return std::sqrt(error / energy);
}

ErrorSummary rmse_mae(std::span<const double> predicted, std::span<const double> observed)
{
    if (predicted.size() != observed.size()) fail(ErrorKind::shape, "rmse_mae: length mismatch");
    if (predicted.empty()) fail(ErrorKind::parameter, "rmse_mae: empty window");
    double sq = 0.0;
    double abs = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double e = predicted[i] - observed[i];
        sq += e * e;
        abs += std::abs(e);
    }
    const auto n = static_cast<double>(predicted.size());
    return {std::sqrt(sq / n), abs / n};
}

Matrix oracle_on_grid(const SimulatedData& sim, const SampleGrid& grid)
{
    const auto t = sim.basis_coefficients.cols();
    const auto q = static_cast<std::size_t>(sim.basis_coefficients.rows());
    const auto p = static_cast<std::size_t>(sim.data.z.rows());
    Matrix out(static_cast<Eigen::Index>(grid.size()), t);
    for (Eigen::Index c = 0; c < t; ++c) {
        const std::span<const double> coef(sim.basis_coefficients.col(c).data(), q);
        const std::span<const double> z(sim.data.z.col(c).data(), p);
        for (std::size_t j = 0; j < grid.size(); ++j)
            out(static_cast<Eigen::Index>(j), c) = sim.oracle.response(coef, z, grid.point(j));
    }
    return out;
}

double discretized_excess_risk(const Matrix& fitted, const SimulatedData& test)
{
    const FunctionalDataset& d = test.data;
    if (fitted.rows() != d.y.rows() || fitted.cols() != d.y.cols())
        fail(ErrorKind::shape, "excess risk: fitted values must match the test responses");

    // X on the Simpson nodes from its basis coefficients.
    const int nodes = simpson_nodes;
    const int q = static_cast<int>(test.basis_coefficients.rows());
    Matrix basis(nodes, q);
    for (int k = 0; k < nodes; ++k)
        for (int i = 1; i <= q; ++i)
            basis(k, i - 1) = cosine_basis(i, static_cast<double>(k) / static_cast<double>(nodes - 1));
    const Matrix curves = basis * test.basis_coefficients;

    const auto n2 = d.y.rows();
    const auto t = d.y.cols();
    double total = 0.0;
    std::vector<double> integrand(static_cast<std::size_t>(nodes));
    for (Eigen::Index j = 0; j < n2; ++j) {
        const double r = d.y_grid.point(static_cast<std::size_t>(j));
        Vector a_row(nodes);
        for (int k = 0; k < nodes; ++k) a_row[k] = test.oracle.a(r, static_cast<double>(k) / (nodes - 1));
        for (Eigen::Index c = 0; c < t; ++c) {
            for (int k = 0; k < nodes; ++k) integrand[static_cast<std::size_t>(k)] = a_row[k] * curves(k, c);
            double truth = simpson(integrand);
            for (int l = 0; l < test.oracle.p() && l < d.z.rows(); ++l) truth += test.oracle.beta(l, r) * d.z(l, c);
            const double fit_err = d.y(j, c) - fitted(j, c);
            const double true_err = d.y(j, c) - truth;
            total += fit_err * fit_err - true_err * true_err;
        }
    }
    return total / (static_cast<double>(n2) * static_cast<double>(t));
}

double discretized_excess_risk(const FittedModel& model, const SimulatedData& test)
{
    if (test.data.x_grid != model.x_grid || test.data.y_grid != model.y_grid)
        fail(ErrorKind::grid, "excess risk: test grids differ from the training grids");
    return discretized_excess_risk(predict_on_grid(model, test.data.x, test.data.z), test);
}

} // namespace funreg
