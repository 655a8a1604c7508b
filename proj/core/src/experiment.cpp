#include "funreg/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "funreg/error.hpp"
#include "funreg/evaluation.hpp"

namespace funreg {

int test_subjects(int subjects)
{
    return std::max(1, subjects / 2);
}

ReplicateResult run_replicate(const BenchCell& cell, std::uint64_t seed, const CVConfig& cv)
{
    const auto start = std::chrono::steady_clock::now();

    SimulationScenario scenario;
    scenario.kind = cell.scenario;
    scenario.q = cell.q;
    scenario.kappa = cell.kappa;
    scenario.p = cell.p;
    scenario.seed = seed;
    const int n_test = test_subjects(cell.subjects);
    const SimulatedData all = simulate(scenario, cell.n, cell.n, cell.subjects + n_test);
    const SimulatedData train = all.slice(0, static_cast<std::size_t>(cell.subjects));
    const SimulatedData test = all.slice(static_cast<std::size_t>(cell.subjects), static_cast<std::size_t>(n_test));

    CVConfig tuned = cv;
    tuned.seed = seed;
    const KernelSpec kernel;
    const CVResult selection = cv_select(train.data, kernel, tuned);

    const SolverWorkspace ws = precompute(train.data, kernel);
    const FittedModel model = make_model(ws, selection.selected, fit(ws, selection.selected));

    const Matrix predicted = predict_on_grid(model, test.data.x, test.data.z);
    const Matrix oracle = oracle_on_grid(test, test.data.y_grid);

    ReplicateResult out;
    out.seed = seed;
    out.rmise = rmise(predicted, oracle, test.data.y_grid);
    out.selected = selection.selected;
    out.converged = model.coefficients.converged;
    for (Eigen::Index l = 0; l < model.covariates(); ++l)
        out.active_groups.push_back(!model.coefficients.b.col(l).isZero(0.0));
    out.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::vector<ReplicateResult> run_bench(const BenchConfig& config)
{
    if (config.replicates < 1) fail(ErrorKind::parameter, "bench: replicates must be >= 1");
    if (config.threads < 1) fail(ErrorKind::parameter, "bench: threads must be >= 1");
    const auto count = static_cast<std::size_t>(config.replicates);
    std::vector<ReplicateResult> results(count);
    std::vector<std::exception_ptr> errors(count);

    const auto run = [&](std::size_t i) {
        try {
            results[i] = run_replicate(config.cell, config.seed_base + i, config.cv);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) run(i);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < count; i += workers) run(i);
            });
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::sort(results.begin(), results.end(),
              [](const ReplicateResult& a, const ReplicateResult& b) { return a.seed < b.seed; });
    return results;
}

double mean_rmise(const std::vector<ReplicateResult>& results)
{
    if (results.empty()) fail(ErrorKind::parameter, "mean_rmise: no results");
    double sum = 0.0;
    for (const auto& r : results) sum += r.rmise;
    return sum / static_cast<double>(results.size());
}

namespace {

struct ReferenceRow
{
    ScenarioKind scenario;
    int n, subjects, q, p;
    double kappa;
    double rmise_x100;
};

// Reference RMISE x 100 of this estimator for the function-on-function (p = 0) and mixed-predictor (p = 3) cells.
constexpr ReferenceRow reference_rows[] = {
    {ScenarioKind::exponential, 5, 50, 5, 0, 0.5, 15.98},
    {ScenarioKind::exponential, 5, 50, 5, 0, 1.0, 9.14},
    {ScenarioKind::exponential, 5, 50, 5, 0, 2.0, 4.99},
    {ScenarioKind::random, 5, 50, 5, 0, 0.5, 20.86},
    {ScenarioKind::random, 5, 50, 5, 0, 1.0, 10.42},
    {ScenarioKind::random, 5, 50, 5, 0, 2.0, 5.21},
    {ScenarioKind::exponential, 20, 100, 20, 0, 0.5, 10.61},
    {ScenarioKind::exponential, 20, 100, 20, 0, 1.0, 5.89},
    {ScenarioKind::exponential, 20, 100, 20, 0, 2.0, 3.60},
    {ScenarioKind::random, 20, 100, 20, 0, 0.5, 37.41},
    {ScenarioKind::random, 20, 100, 20, 0, 1.0, 18.39},
    {ScenarioKind::random, 20, 100, 20, 0, 2.0, 9.19},
    {ScenarioKind::exponential, 40, 200, 50, 0, 0.5, 7.37},
    {ScenarioKind::exponential, 40, 200, 50, 0, 1.0, 3.98},
    {ScenarioKind::exponential, 40, 200, 50, 0, 2.0, 2.34},
    {ScenarioKind::random, 40, 200, 50, 0, 0.5, 39.22},
    {ScenarioKind::random, 40, 200, 50, 0, 1.0, 20.75},
    {ScenarioKind::random, 40, 200, 50, 0, 2.0, 12.59},
    {ScenarioKind::exponential, 5, 50, 5, 3, 0.5, 17.16},
    {ScenarioKind::exponential, 5, 50, 5, 3, 1.0, 9.43},
    {ScenarioKind::exponential, 5, 50, 5, 3, 2.0, 5.03},
    {ScenarioKind::random, 5, 50, 5, 3, 0.5, 14.81},
    {ScenarioKind::random, 5, 50, 5, 3, 1.0, 7.42},
    {ScenarioKind::random, 5, 50, 5, 3, 2.0, 3.72},
    {ScenarioKind::exponential, 20, 100, 20, 3, 0.5, 11.25},
    {ScenarioKind::exponential, 20, 100, 20, 3, 1.0, 5.95},
    {ScenarioKind::exponential, 20, 100, 20, 3, 2.0, 3.38},
    {ScenarioKind::random, 20, 100, 20, 3, 0.5, 23.95},
    {ScenarioKind::random, 20, 100, 20, 3, 1.0, 11.83},
    {ScenarioKind::random, 20, 100, 20, 3, 2.0, 5.92},
    {ScenarioKind::exponential, 40, 200, 50, 3, 0.5, 8.50},
    {ScenarioKind::exponential, 40, 200, 50, 3, 1.0, 4.36},
    {ScenarioKind::exponential, 40, 200, 50, 3, 2.0, 2.33},
    {ScenarioKind::random, 40, 200, 50, 3, 0.5, 27.52},
    {ScenarioKind::random, 40, 200, 50, 3, 1.0, 14.23},
    {ScenarioKind::random, 40, 200, 50, 3, 2.0, 8.20},
};

} // namespace

std::optional<double> reference_rmise_x100(const BenchCell& cell)
{
    for (const auto& row : reference_rows)
        if (row.scenario == cell.scenario && row.n == cell.n && row.subjects == cell.subjects && row.q == cell.q &&
            row.p == cell.p && row.kappa == cell.kappa)
            return row.rmise_x100;
    return std::nullopt;
}

void write_bench_csv(std::ostream& os, const BenchCell& cell, const std::vector<ReplicateResult>& results,
                     bool timing)
{
    const char* scenario = cell.scenario == ScenarioKind::exponential ? "A" : "B";
    char prefix[128];
    std::snprintf(prefix, sizeof prefix, "%s,%d,%d,%d,%d,%.17g", scenario, cell.n, cell.subjects, cell.q, cell.p,
                  cell.kappa);
    char buf[256];
    os << "scenario,n,T,q,p,kappa,seed,rmise_x100,runtime_ms\n";
    double total_ms = 0.0;
    for (const auto& r : results) {
        const double ms = timing ? r.runtime_ms : 0.0;
        total_ms += ms;
        std::snprintf(buf, sizeof buf, "%s,%llu,%.17g,%.3f\n", prefix, static_cast<unsigned long long>(r.seed),
                      100.0 * r.rmise, ms);
        os << buf;
    }
    if (!results.empty()) {
        std::snprintf(buf, sizeof buf, "%s,avg,%.17g,%.3f\n", prefix, 100.0 * mean_rmise(results),
                      total_ms / static_cast<double>(results.size()));
        os << buf;
    }
}

} // namespace funreg
