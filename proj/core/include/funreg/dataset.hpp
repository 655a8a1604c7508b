#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "funreg/kernel.hpp"

namespace funreg {

/**
 * Ordered sample points on [0,1] with their Riemann quadrature weights
 * w(i) = (n + 1) * (points[i] - points[i-1]), points[-1] = 0.
 *
 * The integral of f over [0,1] is approximated by (1/n) * sum_i w(i) f(points[i]).
 */
class SampleGrid
{
public:
    SampleGrid() = default;

    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<double>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double point(std::size_t i) const { return points_.at(i); }
    double weight(std::size_t i) const { return weights_.at(i); }

    Vector weight_vector() const;

    /// (1/n) * sum_i w(i) * values[i].
    double integrate(std::span<const double> values) const;
    double integrate(const Vector& values) const;

    friend bool operator==(const SampleGrid&, const SampleGrid&) = default;

private:
    friend SampleGrid make_grid(std::vector<double> points);

    std::vector<double> points_;
    std::vector<double> weights_;
};

/// Throws ErrorKind::grid unless points are strictly increasing inside (0,1].
/// Points equal to the canonical i/(n+1) grid get weights of exactly 1.
SampleGrid make_grid(std::vector<double> points);

/// Canonical equispaced grid s_i = i / (n + 1), i = 1..n; all weights equal 1.
SampleGrid equispaced_grid(std::size_t n);

/**
 * Discretely observed sample: column t of x / y / z holds subject t.
 * x is n1 x T on x_grid, y is n2 x T on y_grid, z is p x T (p may be 0).
 */
struct FunctionalDataset
{
    SampleGrid x_grid;
    SampleGrid y_grid;
    Matrix x;
    Matrix y;
    Matrix z;

    std::size_t subjects() const noexcept { return static_cast<std::size_t>(x.cols()); }
    std::size_t covariates() const noexcept { return static_cast<std::size_t>(z.rows()); }

    /// Throws ErrorKind::shape if the matrices do not conform to the grids.
    void validate() const;

    /// Dataset restricted to the given subject columns, in the given order.
    FunctionalDataset select(std::span<const std::size_t> subjects) const;
};

FunctionalDataset make_dataset(SampleGrid x_grid, SampleGrid y_grid, Matrix x, Matrix y, Matrix z);

/*
 * CSV layout:
 *   #x_grid: s1,...,sn1
 *   #y_grid: r1,...,rn2
 *   #p: <int>
 *   then one row per subject: n1 X values, n2 Y values, p Z values.
 * Reals are written with 17 significant digits.
 */
void write_csv(std::ostream& os, const FunctionalDataset& data);
FunctionalDataset read_csv(std::istream& is);
void save_csv(const FunctionalDataset& data, const std::filesystem::path& path);
FunctionalDataset load_csv(const std::filesystem::path& path);

} // namespace funreg
