#pragma once

#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace funreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class KernelKind {
    /// Rescaled Bernoulli-polynomial kernel reproducing the Sobolev space W^{2,2}[0,1].
    bernoulli_w22,
};

struct KernelSpec
{
    KernelKind kind = KernelKind::bernoulli_w22;
};

std::string_view kernel_name(KernelKind kind) noexcept;
KernelKind kernel_from_name(std::string_view name);

/// k(x, y) for x, y in [0,1]. Throws ErrorKind::domain outside the unit interval.
double kernel_eval(const KernelSpec& spec, double x, double y);

/// M(i, j) = k(points[i], points[j]).
Matrix gram_matrix(const KernelSpec& spec, std::span<const double> points);

/// M(i, j) = k(rows[i], cols[j]).
Matrix cross_gram(const KernelSpec& spec, std::span<const double> rows, std::span<const double> cols);

/// Column vector [k(x, points[0]), ..., k(x, points[n-1])].
Vector kernel_section(const KernelSpec& spec, double x, std::span<const double> points);

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
struct SymmetricSpectrum
{
    Vector eigenvalues;
    Matrix eigenvectors;

    Matrix reconstruct() const;
};

/// Tolerance on |m - m^T| (relative to max |m|) accepted by sym_eig.
inline constexpr double symmetry_tolerance = 1e-10;
/// Eigenvalues below max * spectral_floor_ratio are raised to that floor in spectral_power.
inline constexpr double spectral_floor_ratio = 1e-12;
/// Eigenvalues below -max * psd_tolerance are rejected as not PSD.
inline constexpr double psd_tolerance = 1e-8;

SymmetricSpectrum sym_eig(const Matrix& m);

/**
 * m^exponent for a symmetric PSD matrix, exponent in {1/2, -1/2, -1}.
 *
 * Eigenvalues are floored at max(eigenvalue) * spectral_floor_ratio before the
 * power is applied, so negative powers of numerically singular Gram matrices
 * behave like a regularized pseudo-inverse.
 */
Matrix spectral_power(const Matrix& m, double exponent);
Matrix spectral_power(const SymmetricSpectrum& spectrum, double exponent);

} // namespace funreg
