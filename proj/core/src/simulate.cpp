#include "funreg/simulate.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "funreg/error.hpp"
#include "funreg/random.hpp"

namespace funreg {

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // 1 - U lies in (0, 1], keeping the log finite.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound)
{
    if (bound == 0) fail(ErrorKind::parameter, "Rng::below: bound must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    while (true) {
        const std::uint64_t v = engine_();
        if (v < limit) return v % bound;
    }
}

double cosine_basis(int i, double s)
{
    if (i < 1) fail(ErrorKind::parameter, "cosine_basis: index must be >= 1");
    if (i == 1) return 1.0;
    return std::numbers::sqrt2 * std::cos((i - 1) * std::numbers::pi * s);
}

namespace {

// Integral over [0,1] of exp(-s) u_i(s).
double exp_basis_integral(int i)
{
    const double e_inv = std::exp(-1.0);
    if (i == 1) return 1.0 - e_inv;
    const double m = (i - 1) * std::numbers::pi;
    const double sign = ((i - 1) % 2 == 0) ? 1.0 : -1.0; // cos((i-1) pi)
    return std::numbers::sqrt2 * (1.0 - e_inv * sign) / (1.0 + m * m);
}

const double sqrt3 = std::sqrt(3.0);

} // namespace

OracleModel::OracleModel(ScenarioKind kind, double kappa, int q, int p, Matrix lambda, Vector b)
    : kind_(kind), kappa_(kappa), q_(q), p_(p), lambda_(std::move(lambda)), b_(std::move(b))
{
    if (q < 1) fail(ErrorKind::parameter, "oracle: q must be >= 1");
    if (!(kappa > 0.0)) fail(ErrorKind::parameter, "oracle: kappa must be > 0");
    if (p < 0) fail(ErrorKind::parameter, "oracle: p must be >= 0");
    if (kind == ScenarioKind::random && (lambda_.rows() != q || lambda_.cols() != q || b_.size() != q))
        fail(ErrorKind::shape, "oracle: random scenario needs a q x q Lambda and a length-q b");
}

double OracleModel::a(double r, double s) const
{
    if (kind_ == ScenarioKind::exponential) return kappa_ * sqrt3 * std::exp(-(r + s));
    double sum = 0.0;
    for (int i = 1; i <= q_; ++i)
        for (int j = 1; j <= q_; ++j) sum += lambda_(i - 1, j - 1) * cosine_basis(i, r) * cosine_basis(j, s);
    return kappa_ * sum;
}

double OracleModel::beta(int l, double r) const
{
    if (l < 0 || l >= p_) fail(ErrorKind::index, "oracle: covariate index out of range");
    if (l > 0) return 0.0;
    if (kind_ == ScenarioKind::exponential) return kappa_ * sqrt3 * std::exp(-r);
    double sum = 0.0;
    for (int i = 1; i <= q_; ++i) sum += b_[i - 1] * cosine_basis(i, r);
    return kappa_ * sum;
}

double OracleModel::a_basis_integral(double r, int i) const
{
    if (kind_ == ScenarioKind::exponential) return kappa_ * sqrt3 * std::exp(-r) * exp_basis_integral(i);
    if (i < 1 || i > q_) return 0.0;
    double sum = 0.0;
    for (int k = 1; k <= q_; ++k) sum += lambda_(k - 1, i - 1) * cosine_basis(k, r);
    return kappa_ * sum;
}

double OracleModel::response(std::span<const double> coefficients, std::span<const double> z, double r) const
{
    double y = 0.0;
    for (std::size_t i = 0; i < coefficients.size(); ++i)
        if (coefficients[i] != 0.0) y += coefficients[i] * a_basis_integral(r, static_cast<int>(i) + 1);
    const int covariates = std::min(p_, static_cast<int>(z.size()));
    for (int l = 0; l < covariates; ++l) y += beta(l, r) * z[static_cast<std::size_t>(l)];
    return y;
}

SimulatedData SimulatedData::slice(std::size_t first, std::size_t count) const
{
    std::vector<std::size_t> idx(count);
    for (std::size_t k = 0; k < count; ++k) idx[k] = first + k;
    SimulatedData out;
    out.data = data.select(idx);
    out.oracle = oracle;
    out.basis_coefficients = basis_coefficients.middleCols(static_cast<Eigen::Index>(first),
                                                           static_cast<Eigen::Index>(count));
    return out;
}

SimulatedData simulate(const SimulationScenario& scenario, int n1, int n2, int subjects)
{
    if (n1 < 1 || n2 < 1 || subjects < 1) fail(ErrorKind::parameter, "simulate: n1, n2 and T must be >= 1");
    if (scenario.q < 1) fail(ErrorKind::parameter, "simulate: q must be >= 1");
    if (!(scenario.kappa > 0.0)) fail(ErrorKind::parameter, "simulate: kappa must be > 0");
    if (scenario.p < 0) fail(ErrorKind::parameter, "simulate: p must be >= 0");

    const int q = scenario.q;
    const int p = scenario.p;
    Rng rng(scenario.seed);

    Matrix coef(q, subjects);
    for (int t = 0; t < subjects; ++t)
        for (int i = 1; i <= q; ++i) coef(i - 1, t) = rng.uniform(-1.0 / i, 1.0 / i);
    Matrix noise(q, subjects);
    for (int t = 0; t < subjects; ++t)
        for (int i = 1; i <= q; ++i) noise(i - 1, t) = rng.uniform(-0.2 / i, 0.2 / i);
    Matrix z(p, subjects);
    const double z_bound = 1.0 / std::sqrt(3.0);
    for (int t = 0; t < subjects; ++t)
        for (int l = 0; l < p; ++l) z(l, t) = rng.uniform(-z_bound, z_bound);

    Matrix lambda;
    Vector b;
    if (scenario.kind == ScenarioKind::random) {
        lambda.resize(q, q);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j < q; ++j) lambda(i, j) = rng.normal();
        Eigen::JacobiSVD<Matrix> svd(lambda);
        lambda /= svd.singularValues()[0];
        b.resize(q);
        for (int i = 0; i < q; ++i) b[i] = rng.normal();
        b /= b.norm();
    }
    OracleModel oracle(scenario.kind, scenario.kappa, q, p, std::move(lambda), std::move(b));

    SampleGrid x_grid = equispaced_grid(static_cast<std::size_t>(n1));
    SampleGrid y_grid = equispaced_grid(static_cast<std::size_t>(n2));

    // Basis values on both grids.
    Matrix ux(n1, q), uy(n2, q);
    for (int i = 0; i < n1; ++i)
        for (int k = 1; k <= q; ++k) ux(i, k - 1) = cosine_basis(k, x_grid.point(static_cast<std::size_t>(i)));
    for (int j = 0; j < n2; ++j)
        for (int k = 1; k <= q; ++k) uy(j, k - 1) = cosine_basis(k, y_grid.point(static_cast<std::size_t>(j)));

    Matrix x = ux * coef;
    Matrix y = uy * noise;
    for (int t = 0; t < subjects; ++t) {
        const auto c = std::span<const double>(coef.col(t).data(), static_cast<std::size_t>(q));
        const auto zt = std::span<const double>(z.col(t).data(), static_cast<std::size_t>(p));
        for (int j = 0; j < n2; ++j) y(j, t) += oracle.response(c, zt, y_grid.point(static_cast<std::size_t>(j)));
    }

    SimulatedData out;
    out.data = make_dataset(std::move(x_grid), std::move(y_grid), std::move(x), std::move(y), std::move(z));
    out.oracle = std::move(oracle);
    out.basis_coefficients = std::move(coef);
    return out;
}

std::function<double(double)> oracle_response(const OracleModel& oracle, std::span<const double> coefficients,
                                              std::span<const double> z)
{
    return [oracle, c = std::vector<double>(coefficients.begin(), coefficients.end()),
            zz = std::vector<double>(z.begin(), z.end())](double r) { return oracle.response(c, zz, r); };
}

double simpson(std::span<const double> values)
{
    const std::size_t n = values.size();
    if (n < 3 || n % 2 == 0) fail(ErrorKind::size, "simpson: need an odd number (>= 3) of nodes");
    const double h = 1.0 / static_cast<double>(n - 1);
    double sum = values.front() + values.back();
    for (std::size_t k = 1; k + 1 < n; ++k) sum += (k % 2 == 1 ? 4.0 : 2.0) * values[k];
    return sum * h / 3.0;
}

std::function<double(double)> oracle_response_sampled(const OracleModel& oracle, std::span<const double> curve,
                                                      std::span<const double> z)
{
    if (curve.size() < 3 || curve.size() % 2 == 0)
        fail(ErrorKind::size, "oracle_response_sampled: need an odd number (>= 3) of nodes");
    return [oracle, x = std::vector<double>(curve.begin(), curve.end()),
            zz = std::vector<double>(z.begin(), z.end())](double r) {
        const std::size_t n = x.size();
        std::vector<double> integrand(n);
        for (std::size_t k = 0; k < n; ++k)
            integrand[k] = oracle.a(r, static_cast<double>(k) / static_cast<double>(n - 1)) * x[k];
        double y = simpson(integrand);
        const int covariates = std::min(oracle.p(), static_cast<int>(zz.size()));
        for (int l = 0; l < covariates; ++l) y += oracle.beta(l, r) * zz[static_cast<std::size_t>(l)];
        return y;
    };
}

} // namespace funreg
