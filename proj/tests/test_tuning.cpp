#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "funreg/error.hpp"
#include "funreg/evaluation.hpp"
#include "funreg/simulate.hpp"
#include "funreg/tuning.hpp"
#include "oracles.hpp"

using namespace funreg;

namespace {

std::vector<std::size_t> sizes(const std::vector<Fold>& folds)
{
    std::vector<std::size_t> out;
    for (const auto& f : folds) out.push_back(f.size());
    return out;
}

} // namespace

TEST_SUITE("folds")
{
    TEST_CASE("fold sizes")
    {
        CHECK(sizes(kfold_split(10, 5, 1)) == std::vector<std::size_t>{2, 2, 2, 2, 2});
        CHECK(sizes(kfold_split(7, 5, 1)) == std::vector<std::size_t>{2, 2, 1, 1, 1});
    }

    TEST_CASE("folds partition the subjects")
    {
        for (std::uint64_t seed : {1u, 2u, 99u}) {
            const auto folds = kfold_split(23, 4, seed);
            std::set<std::size_t> seen;
            for (const auto& f : folds)
                for (std::size_t t : f) CHECK(seen.insert(t).second);
            CHECK(seen.size() == 23);
            CHECK(*seen.rbegin() == 22);
        }
    }

    TEST_CASE("folds are deterministic in the seed")
    {
        CHECK(kfold_split(30, 5, 4) == kfold_split(30, 5, 4));
        CHECK(kfold_split(30, 5, 4) != kfold_split(30, 5, 5));
    }

    TEST_CASE("invalid fold counts")
    {
        CHECK_THROWS_AS(kfold_split(3, 5, 1), Error);
        CHECK_THROWS_AS(kfold_split(10, 1, 1), Error);
    }

    TEST_CASE("log10 ranges")
    {
        const auto fof = log10_range(-15.0, 0.5, 2.0);
        CHECK(fof.size() == 35);
        CHECK(fof.front() == doctest::Approx(1e-15));
        CHECK(fof.back() == doctest::Approx(100.0));
        CHECK(log10_range(-18.0, 1.0, -1.0).size() == 18);
    }
}

TEST_SUITE("cv score")
{
    TEST_CASE("huge lambda1 scores the held-out response energy")
    {
        oracle::Random rng(31);
        const auto d = rng.dataset(4, 5, 10, 0);
        const auto folds = kfold_split(10, 5, 3);
        const double score = cv_score(d, KernelSpec{}, PenaltyConfig{1e12}, folds);
        const Vector w = d.y_grid.weight_vector();
        double energy = 0.0;
        for (const auto& f : folds) {
            double fold = 0.0;
            for (std::size_t t : f) fold += (w.asDiagonal() * d.y.col(static_cast<Eigen::Index>(t)).cwiseAbs2()).sum();
            energy += fold / (static_cast<double>(f.size()) * 5.0);
        }
        energy /= 5.0;
        CHECK(score == doctest::Approx(energy).epsilon(1e-6));
    }

    TEST_CASE("noiseless well-specified data scores near zero")
    {
        oracle::Random rng(32);
        auto d = rng.dataset(3, 3, 30, 0, false);
        // Y in the model span: Y = (1/n1) K1 R0 K2 X.
        const Matrix r0 = rng.matrix(3, 3);
        const Matrix k1 = oracle::gram(d.y_grid.points(), d.y_grid.points());
        const Matrix k2 = oracle::gram(d.x_grid.points(), d.x_grid.points());
        d.y = k1 * r0 * k2 * d.x / 3.0;
        const double energy = d.y.squaredNorm() / static_cast<double>(d.y.size());
        const double score = cv_score(d, KernelSpec{}, PenaltyConfig{1e-12}, kfold_split(30, 5, 1));
        CHECK(score < 1e-8 * energy);
    }

    TEST_CASE("mean of fold scores")
    {
        oracle::Random rng(33);
        const auto d = rng.dataset(3, 4, 12, 1);
        const auto folds = kfold_split(12, 3, 2);
        const PenaltyConfig cfg{0.01, 0.01, 0.1};
        const auto scores = fold_scores(d, KernelSpec{}, cfg, folds);
        CHECK(scores.size() == 3);
        CHECK(cv_score(d, KernelSpec{}, cfg, folds) ==
              doctest::Approx(std::accumulate(scores.begin(), scores.end(), 0.0) / 3.0).epsilon(1e-15));
    }

    TEST_CASE("duplicated data scores the same in every fold")
    {
        oracle::Random rng(34);
        const auto one = rng.dataset(3, 3, 1, 0);
        FunctionalDataset d = one;
        d.x = one.x.replicate(1, 6);
        d.y = one.y.replicate(1, 6);
        d.z = Matrix(0, 6);
        const auto scores = fold_scores(d, KernelSpec{}, PenaltyConfig{0.1}, kfold_split(6, 3, 1));
        CHECK(scores[1] == doctest::Approx(scores[0]).epsilon(1e-12));
        CHECK(scores[2] == doctest::Approx(scores[0]).epsilon(1e-12));
    }
}

TEST_SUITE("cv select")
{
    TEST_CASE("singleton grid")
    {
        oracle::Random rng(35);
        const auto d = rng.dataset(3, 3, 10, 0);
        CVConfig cv;
        cv.lambda1_grid = {0.3};
        const CVResult r = cv_select(d, KernelSpec{}, cv);
        CHECK(r.table.size() == 1);
        CHECK(r.selected.lambda1 == 0.3);
        CHECK(r.best_score == doctest::Approx(cv_score(d, KernelSpec{}, r.selected, kfold_split(10, 5, cv.seed))));
    }

    TEST_CASE("table layout and mean scores")
    {
        oracle::Random rng(36);
        const auto d = rng.dataset(3, 4, 15, 2);
        CVConfig cv;
        cv.folds = 3;
        cv.lambda1_grid = {1e-3, 1e-1};
        cv.lambda2_grid = {0.0, 1e-2, 1.0};
        cv.lambda3_grid = {0.1, 0.5};
        cv.lambda3_relative = true;
        const CVResult r = cv_select(d, KernelSpec{}, cv);
        REQUIRE(r.table.size() == 12);
        const double ceiling = lambda3_ceiling(d);
        CHECK(r.table[0].lambda1 == 1e-3);
        CHECK(r.table[1].lambda3 == doctest::Approx(0.5 * ceiling));
        CHECK(r.table[2].lambda2 == 1e-2);
        CHECK(r.table[6].lambda1 == 1e-1);
        double best = 1e300;
        for (const ScoreRow& row : r.table) {
            REQUIRE_FALSE(row.failed);
            CHECK(row.fold_scores.size() == 3);
            CHECK(row.mean == doctest::Approx((row.fold_scores[0] + row.fold_scores[1] + row.fold_scores[2]) / 3.0)
                                  .epsilon(1e-15));
            best = std::min(best, row.mean);
        }
        CHECK(r.best_score == best);

        std::ostringstream csv;
        write_score_table(csv, r);
        const std::string text = csv.str();
        CHECK(text.rfind("lambda1,lambda2,lambda3,fold,fold_score,mean_score\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 12 * 3);
    }

    TEST_CASE("ties go to the larger penalty")
    {
        oracle::Random rng(37);
        const auto d = rng.dataset(3, 3, 10, 0);
        CVConfig cv;
        cv.lambda1_grid = {0.5, 0.5};
        CHECK(cv_select(d, KernelSpec{}, cv).table[0].mean == cv_select(d, KernelSpec{}, cv).table[1].mean);
        // With p = 0 lambda2 and lambda3 do not change the fit; the largest wins the tie.
        cv.lambda1_grid = {0.5};
        cv.lambda2_grid = {0.0, 2.0, 1.0};
        const CVResult r = cv_select(d, KernelSpec{}, cv);
        CHECK(r.selected.lambda2 == 2.0);
    }

    TEST_CASE("cv is pure and thread-count independent")
    {
        const auto sim = simulate({ScenarioKind::exponential, 5, 1.0, 2, 4}, 5, 5, 20);
        CVConfig cv = mixed_predictor_preset();
        cv.lambda1_grid = {1e-6, 1e-3, 1e-1};
        cv.lambda2_grid = {1e-6, 1e-2};
        const CVResult a = cv_select(sim.data, KernelSpec{}, cv);
        cv.threads = 3;
        const CVResult b = cv_select(sim.data, KernelSpec{}, cv);
        REQUIRE(a.table.size() == b.table.size());
        for (std::size_t i = 0; i < a.table.size(); ++i) CHECK(a.table[i].fold_scores == b.table[i].fold_scores);
        CHECK(a.selected.lambda1 == b.selected.lambda1);
        CHECK(a.selected.lambda3 == b.selected.lambda3);
    }

    TEST_CASE("selected lambda1 is interior on desk-scale data")
    {
        const CVConfig cv = function_on_function_preset();
        int interior = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto sim = simulate({ScenarioKind::exponential, 5, 1.0, 0, seed}, 20, 20, 100);
            CVConfig tuned = cv;
            tuned.seed = seed;
            const double l1 = cv_select(sim.data, KernelSpec{}, tuned).selected.lambda1;
            if (l1 > cv.lambda1_grid.front() && l1 < cv.lambda1_grid.back()) ++interior;
        }
        CHECK(interior > 5);
    }

    TEST_CASE("invalid configuration")
    {
        oracle::Random rng(38);
        const auto d = rng.dataset(3, 3, 10, 0);
        CVConfig cv;
        cv.lambda1_grid = {};
        CHECK_THROWS_AS(cv_select(d, KernelSpec{}, cv), Error);
        cv.lambda1_grid = {-1.0};
        CHECK_THROWS_AS(cv_select(d, KernelSpec{}, cv), Error);
        cv.lambda1_grid = {1.0};
        cv.folds = 11;
        CHECK_THROWS_AS(cv_select(d, KernelSpec{}, cv), Error);
    }
}
