#include "funreg/kernel.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "funreg/error.hpp"

namespace funreg {

namespace {

void check_unit(double x)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream os;
        os << "kernel argument " << x << " outside [0,1]";
        fail(ErrorKind::domain, os.str());
    }
}

// Scaled Bernoulli polynomials.
double b1(double x) { return x - 0.5; }

double b2(double x)
{
    const double c = b1(x);
    return 0.5 * (c * c - 1.0 / 12.0);
}

double b4(double x)
{
    const double c2 = b1(x) * b1(x);
    return (c2 * c2 - 0.5 * c2 + 7.0 / 240.0) / 24.0;
}

double bernoulli_kernel(double x, double y)
{
    return 1.0 + b1(x) * b1(y) + b2(x) * b2(y) - b4(std::abs(x - y));
}

} // namespace

std::string_view kernel_name(KernelKind kind) noexcept
{
    switch (kind) {
    case KernelKind::bernoulli_w22: return "bernoulli_w22";
    }
    return "unknown";
}

KernelKind kernel_from_name(std::string_view name)
{
    if (name == "bernoulli_w22") return KernelKind::bernoulli_w22;
    fail(ErrorKind::parse, "unknown kernel kind '" + std::string(name) + "'");
}

double kernel_eval(const KernelSpec& spec, double x, double y)
{
    check_unit(x);
    check_unit(y);
    switch (spec.kind) {
    case KernelKind::bernoulli_w22: return bernoulli_kernel(x, y);
    }
    fail(ErrorKind::parameter, "unsupported kernel kind");
}

Matrix gram_matrix(const KernelSpec& spec, std::span<const double> points)
{
    if (points.empty()) fail(ErrorKind::size, "gram_matrix: empty point set");
    const auto n = static_cast<Eigen::Index>(points.size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = kernel_eval(spec, points[i], points[i]);
        for (Eigen::Index j = 0; j < i; ++j) {
            m(i, j) = kernel_eval(spec, points[i], points[j]);
            m(j, i) = m(i, j);
        }
    }
    return m;
}

Matrix cross_gram(const KernelSpec& spec, std::span<const double> rows, std::span<const double> cols)
{
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = kernel_eval(spec, rows[i], cols[j]);
    return m;
}

Vector kernel_section(const KernelSpec& spec, double x, std::span<const double> points)
{
    Vector v(static_cast<Eigen::Index>(points.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = kernel_eval(spec, x, points[i]);
    return v;
}

Matrix SymmetricSpectrum::reconstruct() const
{
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

SymmetricSpectrum sym_eig(const Matrix& m)
{
    if (m.rows() != m.cols()) fail(ErrorKind::shape, "sym_eig: matrix is not square");
    if (m.size() == 0) fail(ErrorKind::size, "sym_eig: empty matrix");

    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > symmetry_tolerance * scale)
        fail(ErrorKind::shape, "sym_eig: matrix is not symmetric");

    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) fail(ErrorKind::numeric, "sym_eig: eigensolver failed");

    // Eigen returns ascending order.
    SymmetricSpectrum out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

Matrix spectral_power(const SymmetricSpectrum& spectrum, double exponent)
{
    if (exponent != 0.5 && exponent != -0.5 && exponent != -1.0)
        fail(ErrorKind::parameter, "spectral_power: exponent must be 1/2, -1/2 or -1");

    const Vector& d = spectrum.eigenvalues;
    const double top = d.maxCoeff();
    const double bottom = d.minCoeff();
    if (top < 0.0 || bottom < -psd_tolerance * std::max(top, 0.0))
        fail(ErrorKind::not_psd, "spectral_power: matrix is not positive semidefinite");
    if (top == 0.0) {
        if (exponent > 0.0) return Matrix::Zero(d.size(), d.size());
        fail(ErrorKind::numeric, "spectral_power: negative power of the zero matrix");
    }

    const double floor = top * spectral_floor_ratio;
    Vector powered(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i)
        powered[i] = std::pow(std::max(d[i], floor), exponent);

    const Matrix& u = spectrum.eigenvectors;
    Matrix out = u * powered.asDiagonal() * u.transpose();
    return 0.5 * (out + out.transpose());
}

Matrix spectral_power(const Matrix& m, double exponent)
{
    return spectral_power(sym_eig(m), exponent);
}

} // namespace funreg
