#include <doctest.h>

#include <cmath>
#include <vector>

#include "funreg/error.hpp"
#include "funreg/kernel.hpp"
#include "oracles.hpp"

using namespace funreg;

TEST_SUITE("kernel")
{
    TEST_CASE("kernel values at reference points")
    {
        const KernelSpec k;
        // 1 + 1/4 + 1/144 + 1/720 and 1 + 1/576 + 1/720.
        CHECK(kernel_eval(k, 0.0, 0.0) == doctest::Approx(1.0 + 0.25 + 1.0 / 144.0 + 1.0 / 720.0).epsilon(1e-15));
        CHECK(kernel_eval(k, 0.5, 0.5) == doctest::Approx(1.003125).epsilon(1e-15));
        CHECK(kernel_eval(k, 0.0, 0.0) == doctest::Approx(static_cast<double>(oracle::kernel(0.0L, 0.0L))).epsilon(1e-15));
    }

    TEST_CASE("kernel matches long double evaluation and is symmetric")
    {
        oracle::Random rng(7);
        const KernelSpec k;
        for (int i = 0; i < 200; ++i) {
            const double x = rng.uniform(0.0, 1.0), y = rng.uniform(0.0, 1.0);
            CHECK(kernel_eval(k, x, y) == kernel_eval(k, y, x));
            CHECK(std::abs(kernel_eval(k, x, y) - static_cast<double>(oracle::kernel(x, y))) < 1e-14);
        }
        CHECK(kernel_eval(k, 1.0, 0.0) == kernel_eval(k, 0.0, 1.0));
    }

    TEST_CASE("kernel rejects points outside the unit interval")
    {
        const KernelSpec k;
        CHECK_THROWS_AS(kernel_eval(k, -0.1, 0.5), Error);
        try {
            kernel_eval(k, 0.5, 1.5);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::domain);
        }
    }

    TEST_CASE("kernel names round-trip")
    {
        CHECK(kernel_from_name(kernel_name(KernelKind::bernoulli_w22)) == KernelKind::bernoulli_w22);
        CHECK_THROWS_AS(kernel_from_name("gaussian"), Error);
    }

    TEST_CASE("gram matrix")
    {
        const KernelSpec k;
        const std::vector<double> single{0.5};
        const Matrix g1 = gram_matrix(k, single);
        REQUIRE(g1.rows() == 1);
        CHECK(g1(0, 0) == doctest::Approx(1.003125).epsilon(1e-15));

        CHECK_THROWS_AS(gram_matrix(k, std::vector<double>{}), Error);

        oracle::Random rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            const auto pts = rng.grid(rng.integer(1, 30), true);
            const Matrix g = gram_matrix(k, pts);
            CHECK((g - g.transpose()).norm() == 0.0);
            CHECK((g - oracle::gram(pts, pts)).cwiseAbs().maxCoeff() < 1e-13);
            Eigen::SelfAdjointEigenSolver<Matrix> es(g);
            CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
        }
    }

    TEST_CASE("gram matrix with duplicated points is PSD and rank deficient")
    {
        const std::vector<double> pts{0.2, 0.2, 0.7};
        const Matrix g = gram_matrix(KernelSpec{}, pts);
        CHECK(g.row(0) == g.row(1));
        Eigen::SelfAdjointEigenSolver<Matrix> es(g);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12);
        CHECK(es.eigenvalues().minCoeff() < 1e-12);
    }

    TEST_CASE("cross gram and kernel section")
    {
        const KernelSpec k;
        const std::vector<double> a{0.1, 0.4}, b{0.3, 0.6, 0.9};
        const Matrix c = cross_gram(k, a, b);
        CHECK((c - oracle::gram(a, b)).cwiseAbs().maxCoeff() < 1e-14);
        const Vector s = kernel_section(k, 0.4, b);
        CHECK((s.transpose() - c.row(1)).norm() == 0.0);
    }

    TEST_CASE("sym_eig")
    {
        SUBCASE("identity")
        {
            const auto spec = sym_eig(Matrix::Identity(3, 3));
            CHECK((spec.eigenvalues - Vector::Ones(3)).norm() < 1e-15);
            CHECK((spec.eigenvectors.transpose() * spec.eigenvectors - Matrix::Identity(3, 3)).norm() < 1e-14);
        }
        SUBCASE("diagonal sorted descending")
        {
            Matrix d = Matrix::Zero(3, 3);
            d.diagonal() << 3.0, 1.0, 2.0;
            const auto spec = sym_eig(d);
            CHECK(spec.eigenvalues[0] == doctest::Approx(3.0));
            CHECK(spec.eigenvalues[1] == doctest::Approx(2.0));
            CHECK(spec.eigenvalues[2] == doctest::Approx(1.0));
        }
        SUBCASE("random symmetric reconstruction")
        {
            oracle::Random rng(11);
            for (int i = 0; i < 10; ++i) {
                const Matrix a = rng.matrix(5, 5);
                const Matrix m = a + a.transpose();
                CHECK((sym_eig(m).reconstruct() - m).norm() < 1e-10);
            }
        }
        SUBCASE("errors")
        {
            CHECK_THROWS_AS(sym_eig(Matrix::Zero(2, 3)), Error);
            Matrix m = Matrix::Identity(2, 2);
            m(0, 1) = 1.0;
            try {
                sym_eig(m);
                FAIL("expected an error");
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::shape);
            }
        }
    }

    TEST_CASE("spectral_power")
    {
        CHECK((spectral_power(Matrix::Identity(4, 4), 0.5) - Matrix::Identity(4, 4)).norm() < 1e-14);
        CHECK((spectral_power(Matrix::Identity(4, 4), -1.0) - Matrix::Identity(4, 4)).norm() < 1e-14);

        Matrix d = Matrix::Zero(2, 2);
        d.diagonal() << 4.0, 9.0;
        const Matrix h = spectral_power(d, 0.5);
        CHECK(h(0, 0) == doctest::Approx(2.0));
        CHECK(h(1, 1) == doctest::Approx(3.0));
        CHECK(std::abs(h(0, 1)) < 1e-14);

        const auto pts = oracle::Random(1).grid(5, false);
        const Matrix g = gram_matrix(KernelSpec{}, pts);
        const Matrix inv_half = spectral_power(g, -0.5);
        CHECK((inv_half * inv_half * g - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((spectral_power(g, -1.0) * g - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-6);

        CHECK_THROWS_AS(spectral_power(g, 2.0), Error);
        Matrix neg = Matrix::Identity(2, 2);
        neg(1, 1) = -1.0;
        try {
            spectral_power(neg, 0.5);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::not_psd);
        }
    }
}
