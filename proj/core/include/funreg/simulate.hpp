#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "funreg/dataset.hpp"
#include "funreg/kernel.hpp"

namespace funreg {

enum class ScenarioKind {
    /// A*(r,s) = kappa sqrt(3) exp(-(r+s)), beta*_1(r) = kappa sqrt(3) exp(-r).
    exponential,
    /// A* and beta*_1 with random coefficients in the cosine basis.
    random,
};

struct SimulationScenario
{
    ScenarioKind kind = ScenarioKind::exponential;
    int q = 5;
    double kappa = 1.0;
    int p = 0;
    std::uint64_t seed = 1;
};

/// u_1(s) = 1, u_i(s) = sqrt(2) cos((i-1) pi s) for i >= 2. Orthonormal in L2[0,1].
double cosine_basis(int i, double s);

/**
 * True coefficient functions of a simulated model. Only beta*_1 can be
 * nonzero; beta*_j vanishes for j >= 2.
 */
class OracleModel
{
public:
    OracleModel() = default;
    OracleModel(ScenarioKind kind, double kappa, int q, int p, Matrix lambda = {}, Vector b = {});

    ScenarioKind kind() const noexcept { return kind_; }
    double kappa() const noexcept { return kappa_; }
    int q() const noexcept { return q_; }
    int p() const noexcept { return p_; }
    /// Random-scenario coefficient matrix (q x q, unit spectral norm); empty otherwise.
    const Matrix& lambda() const noexcept { return lambda_; }
    /// Random-scenario beta coefficients (unit Euclidean norm); empty otherwise.
    const Vector& b() const noexcept { return b_; }

    double a(double r, double s) const;
    /// beta*_l(r) for the zero-based covariate index l < p.
    double beta(int l, double r) const;

    /// Integral of A*(r, s) u_i(s) ds over [0,1], exact.
    double a_basis_integral(double r, int i) const;

    /// Integral of A*(r, s) X(s) ds + sum_l beta*_l(r) z_l for X = sum_i coefficients[i] u_{i+1}.
    double response(std::span<const double> coefficients, std::span<const double> z, double r) const;

private:
    ScenarioKind kind_ = ScenarioKind::exponential;
    double kappa_ = 1.0;
    int q_ = 1;
    int p_ = 0;
    Matrix lambda_;
    Vector b_;
};

struct SimulatedData
{
    FunctionalDataset data;
    OracleModel oracle;
    /// q x T latent coefficients of each X_t in the cosine basis.
    Matrix basis_coefficients;

    /// Subjects [first, first + count) with their latent coefficients.
    SimulatedData slice(std::size_t first, std::size_t count) const;
};

/**
 * Draw T subjects from the functional linear model on equispaced grids of
 * sizes n1 (X) and n2 (Y). Random stream order: x coefficients, noise
 * coefficients, Z, then (random scenario only) Lambda and b.
 */
SimulatedData simulate(const SimulationScenario& scenario, int n1, int n2, int subjects);

/// r -> Y_oracle(r) for a curve given by its cosine-basis coefficients.
std::function<double(double)> oracle_response(const OracleModel& oracle, std::span<const double> coefficients,
                                              std::span<const double> z);

/**
 * r -> Y_oracle(r) for a curve sampled at the 2m+1 equispaced nodes of [0,1]
 * (including both endpoints); the integral uses composite Simpson.
 */
std::function<double(double)> oracle_response_sampled(const OracleModel& oracle, std::span<const double> curve,
                                                      std::span<const double> z);

/// Number of Simpson nodes used when the true model must be integrated numerically.
inline constexpr int simpson_nodes = 2049;

/// Composite Simpson rule on [0,1] for values at an odd number of equispaced nodes.
double simpson(std::span<const double> values);

} // namespace funreg
