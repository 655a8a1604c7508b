#include "funreg/tuning.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "funreg/error.hpp"
#include "funreg/evaluation.hpp"
#include "funreg/random.hpp"

namespace funreg {

std::vector<double> log10_range(double from, double step, double to)
{
    if (!(step > 0.0) || to < from) fail(ErrorKind::parameter, "log10_range: need step > 0 and to >= from");
    const auto count = static_cast<int>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = std::pow(10.0, from + k * step);
    return out;
}

void CVConfig::validate() const
{
    if (folds < 2) fail(ErrorKind::parameter, "cv: folds must be >= 2");
    if (lambda1_grid.empty() || lambda2_grid.empty() || lambda3_grid.empty())
        fail(ErrorKind::parameter, "cv: penalty grids must be nonempty");
    for (double v : lambda1_grid)
        if (!(v > 0.0)) fail(ErrorKind::parameter, "cv: lambda1 grid values must be > 0");
    for (double v : lambda2_grid)
        if (!(v >= 0.0)) fail(ErrorKind::parameter, "cv: lambda2 grid values must be >= 0");
    for (double v : lambda3_grid)
        if (!(v >= 0.0)) fail(ErrorKind::parameter, "cv: lambda3 grid values must be >= 0");
    if (threads < 1) fail(ErrorKind::parameter, "cv: threads must be >= 1");
}

CVConfig function_on_function_preset()
{
    CVConfig cv;
    cv.lambda1_grid = log10_range(-15.0, 0.5, 2.0);
    cv.lambda2_grid = {0.0};
    cv.lambda3_grid = {0.0};
    return cv;
}

CVConfig mixed_predictor_preset()
{
    CVConfig cv;
    cv.lambda1_grid = log10_range(-18.0, 1.0, -1.0);
    cv.lambda2_grid = log10_range(-18.0, 1.0, -1.0);
    // Decade steps down from the level that zeroes every group.
    cv.lambda3_grid = log10_range(-3.0, 1.0, 0.0);
    cv.lambda3_relative = true;
    return cv;
}

double lambda3_ceiling(const FunctionalDataset& data)
{
    data.validate();
    const Matrix y_star = data.y_grid.weight_vector().cwiseSqrt().asDiagonal() * data.y;
    double largest = 0.0;
    for (Eigen::Index l = 0; l < data.z.rows(); ++l)
        largest = std::max(largest, (y_star * data.z.row(l).transpose()).norm());
    return 2.0 * std::sqrt(static_cast<double>(data.y_grid.size())) * largest;
}

std::vector<Fold> kfold_split(std::size_t subjects, int folds, std::uint64_t seed)
{
    if (folds < 2) fail(ErrorKind::parameter, "kfold_split: folds must be >= 2");
    if (static_cast<std::size_t>(folds) > subjects)
        fail(ErrorKind::parameter, "kfold_split: more folds (" + std::to_string(folds) + ") than subjects (" +
                                       std::to_string(subjects) + ")");
    std::vector<std::size_t> order(subjects);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = subjects; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    const auto k = static_cast<std::size_t>(folds);
    std::vector<Fold> out(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = subjects / k + (f < subjects % k ? 1 : 0);
        out[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                      order.begin() + static_cast<std::ptrdiff_t>(pos + size));
        pos += size;
    }
    return out;
}

double held_out_error(const FittedModel& model, const FunctionalDataset& held_out)
{
    const Matrix predicted = predict_on_grid(model, held_out.x, held_out.z);
    const Vector w = held_out.y_grid.weight_vector();
    const double total = (w.asDiagonal() * (held_out.y - predicted).cwiseAbs2()).sum();
    return total / (static_cast<double>(held_out.y.rows()) * static_cast<double>(held_out.y.cols()));
}

namespace {

struct PreparedFold
{
    SolverWorkspace train;
    FunctionalDataset held_out;
};

std::vector<PreparedFold> prepare_folds(const FunctionalDataset& data, const KernelSpec& kernel,
                                        const std::vector<Fold>& split)
{
    std::vector<PreparedFold> out;
    out.reserve(split.size());
    std::vector<bool> seen(data.subjects(), false);
    for (std::size_t f = 0; f < split.size(); ++f) {
        std::vector<bool> in_fold(data.subjects(), false);
        for (std::size_t t : split[f]) {
            if (t >= data.subjects()) fail(ErrorKind::index, "fold " + std::to_string(f) + ": subject out of range");
            if (seen[t]) fail(ErrorKind::parameter, "folds overlap at subject " + std::to_string(t));
            seen[t] = in_fold[t] = true;
        }
        if (split[f].empty()) fail(ErrorKind::parameter, "fold " + std::to_string(f) + " is empty");
        Fold train;
        for (std::size_t t = 0; t < data.subjects(); ++t)
            if (!in_fold[t]) train.push_back(t);
        if (train.empty()) fail(ErrorKind::parameter, "fold " + std::to_string(f) + " leaves no training data");
        out.push_back({precompute(data.select(train), kernel), data.select(split[f])});
    }
    return out;
}

std::vector<double> score_folds(const std::vector<PreparedFold>& folds, const PenaltyConfig& cfg)
{
    std::vector<double> scores;
    scores.reserve(folds.size());
    for (std::size_t f = 0; f < folds.size(); ++f) {
        try {
            const CoefficientFit coefficients = fit(folds[f].train, cfg);
            scores.push_back(held_out_error(make_model(folds[f].train, cfg, coefficients), folds[f].held_out));
        } catch (const Error& e) {
            throw Error(e.kind(), "fold " + std::to_string(f) + ": " + e.what());
        }
    }
    return scores;
}

double mean_of(const std::vector<double>& v)
{
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

bool prefer(const ScoreRow& candidate, const ScoreRow& best)
{
    if (candidate.mean != best.mean) return candidate.mean < best.mean;
    if (candidate.lambda1 != best.lambda1) return candidate.lambda1 > best.lambda1;
    if (candidate.lambda2 != best.lambda2) return candidate.lambda2 > best.lambda2;
    return candidate.lambda3 > best.lambda3;
}

} // namespace

std::vector<double> fold_scores(const FunctionalDataset& data, const KernelSpec& kernel, const PenaltyConfig& cfg,
                                const std::vector<Fold>& split)
{
    cfg.validate();
    return score_folds(prepare_folds(data, kernel, split), cfg);
}

double cv_score(const FunctionalDataset& data, const KernelSpec& kernel, const PenaltyConfig& cfg,
                const std::vector<Fold>& split)
{
    return mean_of(fold_scores(data, kernel, cfg, split));
}

CVResult cv_select(const FunctionalDataset& data, const KernelSpec& kernel, const CVConfig& cv)
{
    cv.validate();
    data.validate();
    const auto split = kfold_split(data.subjects(), cv.folds, cv.seed);
    const auto folds = prepare_folds(data, kernel, split);

    const double lambda3_unit = cv.lambda3_relative ? lambda3_ceiling(data) : 1.0;
    CVResult result;
    for (double l1 : cv.lambda1_grid)
        for (double l2 : cv.lambda2_grid)
            for (double l3 : cv.lambda3_grid) {
                ScoreRow row;
                row.lambda1 = l1;
                row.lambda2 = l2;
                row.lambda3 = l3 * lambda3_unit;
                result.table.push_back(row);
            }

    const auto evaluate = [&](std::size_t index) {
        ScoreRow& row = result.table[index];
        PenaltyConfig cfg = cv.base;
        cfg.lambda1 = row.lambda1;
        cfg.lambda2 = row.lambda2;
        cfg.lambda3 = row.lambda3;
        try {
            row.fold_scores = score_folds(folds, cfg);
            row.mean = mean_of(row.fold_scores);
            if (!std::isfinite(row.mean)) fail(ErrorKind::numeric, "non-finite score");
        } catch (const Error& e) {
            row.failed = true;
            row.error = e.what();
            row.mean = std::numeric_limits<double>::quiet_NaN();
        }
    };

    const std::size_t total = result.table.size();
    const auto workers = static_cast<std::size_t>(std::min<long>(cv.threads, static_cast<long>(total)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < total; ++i) evaluate(i);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < total; i += workers) evaluate(i);
            });
        for (auto& th : pool) th.join();
    }

    const ScoreRow* best = nullptr;
    for (const ScoreRow& row : result.table)
        if (!row.failed && (!best || prefer(row, *best))) best = &row;
    if (!best) {
        const std::string first = total ? result.table.front().error : std::string("empty grid");
        fail(ErrorKind::numeric, "cv: every grid point failed (first error: " + first + ")");
    }
    result.selected = cv.base;
    result.selected.lambda1 = best->lambda1;
    result.selected.lambda2 = best->lambda2;
    result.selected.lambda3 = best->lambda3;
    result.best_score = best->mean;
    return result;
}

void write_score_table(std::ostream& os, const CVResult& result)
{
    char buf[256];
    os << "lambda1,lambda2,lambda3,fold,fold_score,mean_score\n";
    for (const ScoreRow& row : result.table) {
        if (row.failed) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,NA,NA,NA\n", row.lambda1, row.lambda2, row.lambda3);
            os << buf;
            continue;
        }
        for (std::size_t f = 0; f < row.fold_scores.size(); ++f) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu,%.17g,%.17g\n", row.lambda1, row.lambda2,
                          row.lambda3, f, row.fold_scores[f], row.mean);
            os << buf;
        }
    }
}

} // namespace funreg
