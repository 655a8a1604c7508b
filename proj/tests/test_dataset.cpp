#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "funreg/error.hpp"
#include "funreg/dataset.hpp"
#include "funreg/simulate.hpp"
#include "oracles.hpp"

using namespace funreg;

namespace {

ErrorKind kind_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::io;
}

} // namespace

TEST_SUITE("grid")
{
    TEST_CASE("canonical equispaced grids have unit weights")
    {
        for (std::size_t n : {1u, 2u, 3u, 5u, 7u, 20u, 40u, 99u, 200u}) {
            const SampleGrid g = equispaced_grid(n);
            for (std::size_t i = 0; i < n; ++i) CHECK(g.weight(i) == 1.0);
            std::vector<double> ones(n, 1.0);
            CHECK(g.integrate(ones) == 1.0);
            // Same points typed in by hand give the same grid.
            std::vector<double> pts(n);
            for (std::size_t i = 0; i < n; ++i) pts[i] = (i + 1.0) / (n + 1.0);
            CHECK(make_grid(pts) == g);
        }
    }

    TEST_CASE("weights from spacing")
    {
        const SampleGrid one = make_grid({0.5});
        CHECK(one.weight(0) == doctest::Approx(1.0));
        const SampleGrid two = make_grid({0.25, 1.0});
        CHECK(two.weight(0) == doctest::Approx(0.75));
        CHECK(two.weight(1) == doctest::Approx(2.25));
        oracle::Random rng(5);
        const auto pts = rng.grid(9, true);
        const SampleGrid g = make_grid(pts);
        const Vector w = oracle::weights(pts);
        for (std::size_t i = 0; i < 9; ++i) CHECK(g.weight(i) == doctest::Approx(w[static_cast<Eigen::Index>(i)]));
    }

    TEST_CASE("invalid grids")
    {
        CHECK(kind_of([] { make_grid({}); }) == ErrorKind::grid);
        CHECK(kind_of([] { make_grid({0.0, 0.5}); }) == ErrorKind::grid);
        CHECK(kind_of([] { make_grid({0.5, 0.5}); }) == ErrorKind::grid);
        CHECK(kind_of([] { make_grid({0.6, 0.3}); }) == ErrorKind::grid);
        CHECK(kind_of([] { make_grid({0.5, 1.2}); }) == ErrorKind::grid);
        CHECK(kind_of([] { make_grid({-0.1}); }) == ErrorKind::grid);
    }
}

TEST_SUITE("simulation")
{
    TEST_CASE("cosine basis")
    {
        CHECK(cosine_basis(1, 0.37) == 1.0);
        CHECK(cosine_basis(2, 0.0) == doctest::Approx(std::sqrt(2.0)));
        CHECK(cosine_basis(3, 0.5) == doctest::Approx(-std::sqrt(2.0)));
        // Orthonormality by fine Simpson quadrature.
        for (int i = 1; i <= 4; ++i)
            for (int j = 1; j <= 4; ++j) {
                std::vector<double> v(simpson_nodes);
                for (int k = 0; k < simpson_nodes; ++k) {
                    const double s = k / (simpson_nodes - 1.0);
                    v[static_cast<std::size_t>(k)] = cosine_basis(i, s) * cosine_basis(j, s);
                }
                CHECK(simpson(v) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
            }
    }

    TEST_CASE("simulation is deterministic in the seed")
    {
        for (ScenarioKind kind : {ScenarioKind::exponential, ScenarioKind::random}) {
            SimulationScenario sc{kind, 5, 0.7, 2, 42};
            const auto a = simulate(sc, 5, 6, 12);
            const auto b = simulate(sc, 5, 6, 12);
            CHECK(a.data.x == b.data.x);
            CHECK(a.data.y == b.data.y);
            CHECK(a.data.z == b.data.z);
            CHECK(a.oracle.lambda() == b.oracle.lambda());
            sc.seed = 43;
            CHECK(simulate(sc, 5, 6, 12).data.y != a.data.y);
        }
    }

    TEST_CASE("simulated shapes and grids")
    {
        const auto sim = simulate({ScenarioKind::exponential, 5, 1.0, 0, 1}, 5, 7, 9);
        CHECK(sim.data.x.rows() == 5);
        CHECK(sim.data.y.rows() == 7);
        CHECK(sim.data.z.rows() == 0);
        CHECK(sim.data.subjects() == 9);
        CHECK(sim.data.x_grid == equispaced_grid(5));
        CHECK(sim.basis_coefficients.rows() == 5);
        const auto part = sim.slice(2, 3);
        CHECK(part.data.subjects() == 3);
        CHECK(part.data.y.col(0) == sim.data.y.col(2));
        CHECK(part.basis_coefficients.col(2) == sim.basis_coefficients.col(4));
    }

    TEST_CASE("scalar covariate variance matches the uniform law")
    {
        // Var U[-a, a] = a^2 / 3 with a = 1/sqrt(3).
        const double a = 1.0 / std::sqrt(3.0);
        const double expected = a * a / 3.0;
        const auto sim = simulate({ScenarioKind::random, 2, 1.0, 3, 9}, 3, 3, 10000);
        for (Eigen::Index l = 0; l < 3; ++l) {
            const double mean = sim.data.z.row(l).mean();
            const double var = (sim.data.z.row(l).array() - mean).square().sum() / (10000.0 - 1.0);
            CHECK(std::abs(var - expected) < 0.05 * expected);
            CHECK(sim.data.z.row(l).cwiseAbs().maxCoeff() <= a);
        }
    }

    TEST_CASE("random scenario normalization")
    {
        const auto sim = simulate({ScenarioKind::random, 6, 1.0, 1, 4}, 4, 4, 3);
        Eigen::JacobiSVD<Matrix> svd(sim.oracle.lambda());
        CHECK(svd.singularValues()[0] == doctest::Approx(1.0));
        CHECK(sim.oracle.b().norm() == doctest::Approx(1.0));
    }

    TEST_CASE("true coefficient functions")
    {
        const OracleModel a(ScenarioKind::exponential, 1.0, 5, 3);
        CHECK(a.a(0.0, 0.0) == doctest::Approx(std::sqrt(3.0)));
        CHECK(a.beta(0, 0.2) == doctest::Approx(std::sqrt(3.0) * std::exp(-0.2)));
        CHECK(a.beta(1, 0.2) == 0.0);
        CHECK(a.beta(2, 0.9) == 0.0);
        CHECK_THROWS_AS(a.beta(3, 0.1), Error);
    }

    TEST_CASE("oracle response examples")
    {
        const OracleModel a(ScenarioKind::exponential, 1.0, 5, 0);
        const std::vector<double> zero_x(5, 0.0), none;
        CHECK(oracle_response(a, zero_x, none)(0.3) == 0.0);

        std::vector<double> unit_one(5, 0.0);
        unit_one[0] = 1.0;
        for (double r : {0.0, 0.25, 0.8})
            CHECK(oracle_response(a, unit_one, none)(r) ==
                  doctest::Approx(std::sqrt(3.0) * std::exp(-r) * (1.0 - std::exp(-1.0))).epsilon(1e-13));

        // Exact basis integrals against fine quadrature of A*(r, .) u_i.
        for (int i = 1; i <= 5; ++i) {
            std::vector<double> v(simpson_nodes);
            for (int k = 0; k < simpson_nodes; ++k) {
                const double s = k / (simpson_nodes - 1.0);
                v[static_cast<std::size_t>(k)] = a.a(0.4, s) * cosine_basis(i, s);
            }
            CHECK(a.a_basis_integral(0.4, i) == doctest::Approx(simpson(v)).epsilon(1e-10));
        }

        const auto sim = simulate({ScenarioKind::random, 4, 1.5, 0, 8}, 3, 3, 1);
        for (int k = 1; k <= 4; ++k) {
            std::vector<double> uk(4, 0.0);
            uk[static_cast<std::size_t>(k - 1)] = 1.0;
            for (double r : {0.1, 0.6}) {
                double expected = 0.0;
                for (int i = 1; i <= 4; ++i) expected += 1.5 * sim.oracle.lambda()(i - 1, k - 1) * cosine_basis(i, r);
                CHECK(oracle_response(sim.oracle, uk, none)(r) == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("sampled oracle response agrees with the basis form")
    {
        const auto sim = simulate({ScenarioKind::exponential, 5, 1.0, 2, 3}, 5, 5, 2);
        const auto coeffs = sim.basis_coefficients.col(0);
        std::vector<double> c(coeffs.data(), coeffs.data() + coeffs.size());
        std::vector<double> curve(simpson_nodes);
        for (int k = 0; k < simpson_nodes; ++k) {
            const double s = k / (simpson_nodes - 1.0);
            double v = 0.0;
            for (int i = 1; i <= 5; ++i) v += c[static_cast<std::size_t>(i - 1)] * cosine_basis(i, s);
            curve[static_cast<std::size_t>(k)] = v;
        }
        const std::vector<double> z{sim.data.z(0, 0), sim.data.z(1, 0)};
        for (double r : {0.0, 0.5, 1.0})
            CHECK(oracle_response_sampled(sim.oracle, curve, z)(r) ==
                  doctest::Approx(oracle_response(sim.oracle, c, z)(r)).epsilon(1e-10));
    }

    TEST_CASE("observed responses are oracle plus bounded noise")
    {
        const auto sim = simulate({ScenarioKind::exponential, 5, 1.0, 1, 2}, 5, 5, 30);
        for (Eigen::Index t = 0; t < 30; ++t) {
            const auto col = sim.basis_coefficients.col(t);
            std::vector<double> c(col.data(), col.data() + col.size());
            const std::vector<double> z{sim.data.z(0, t)};
            const auto f = oracle_response(sim.oracle, c, z);
            for (std::size_t j = 0; j < 5; ++j) {
                const double noise = sim.data.y(static_cast<Eigen::Index>(j), t) - f(sim.data.y_grid.point(j));
                // |sum_i e_i u_i| <= sum_i (0.2 / i) sqrt(2)
                CHECK(std::abs(noise) <= 0.2 * std::sqrt(2.0) * (1 + 1.0 / 2 + 1.0 / 3 + 1.0 / 4 + 1.0 / 5));
            }
        }
    }
}

TEST_SUITE("dataset csv")
{
    TEST_CASE("round trip")
    {
        for (int p : {0, 3}) {
            const auto sim = simulate({ScenarioKind::random, 5, 1.0, p, 17}, 4, 6, 7);
            std::stringstream ss;
            write_csv(ss, sim.data);
            const FunctionalDataset back = read_csv(ss);
            CHECK(back.covariates() == static_cast<std::size_t>(p));
            CHECK(back.x_grid == sim.data.x_grid);
            CHECK(back.y_grid == sim.data.y_grid);
            CHECK((back.x - sim.data.x).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((back.y - sim.data.y).cwiseAbs().maxCoeff() <= 1e-12);
            if (p > 0) CHECK((back.z - sim.data.z).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }

    TEST_CASE("parse errors name the problem")
    {
        const auto parse = [](const std::string& text) {
            std::istringstream is(text);
            return read_csv(is);
        };
        try {
            parse("#x_grid: 0.5,1.5\n#y_grid: 0.5\n#p: 0\n1,2,3\n");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::parse);
            CHECK(std::string(e.what()).find("1.5") != std::string::npos);
        }
        CHECK(kind_of([&] { parse("#x_grid: 0.5\n#y_grid: 0.5\n#p: 0\n1,2,3\n"); }) == ErrorKind::parse);
        CHECK(kind_of([&] { parse("#x_grid: 0.5\n#y_grid: 0.5\n#p: 0\n1,abc\n"); }) == ErrorKind::parse);
        CHECK(kind_of([&] { parse("1,2\n"); }) == ErrorKind::parse);
        const auto ok = parse("#x_grid: 0.5\n#y_grid: 0.25,0.5\n#p: 0\n1,2,3\n4,5,6\n");
        CHECK(ok.subjects() == 2);
        CHECK(ok.y(1, 1) == 6.0);
    }

    TEST_CASE("load errors carry the path")
    {
        try {
            load_csv("/nonexistent/data.csv");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::io);
            CHECK(std::string(e.what()).find("/nonexistent/data.csv") != std::string::npos);
        }
    }

    TEST_CASE("dataset shape validation")
    {
        CHECK(kind_of([] {
                  make_dataset(equispaced_grid(3), equispaced_grid(2), Matrix::Zero(3, 4), Matrix::Zero(2, 5),
                               Matrix::Zero(0, 4));
              }) == ErrorKind::shape);
        CHECK(kind_of([] {
                  make_dataset(equispaced_grid(3), equispaced_grid(2), Matrix::Zero(2, 4), Matrix::Zero(2, 4),
                               Matrix::Zero(0, 4));
              }) == ErrorKind::shape);
    }
}
