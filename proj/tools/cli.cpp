#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "funreg/error.hpp"
#include "funreg/evaluation.hpp"
#include "funreg/experiment.hpp"
#include "funreg/model_io.hpp"
#include "funreg/simulate.hpp"
#include "funreg/tuning.hpp"

namespace funreg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Keys accepted in a --config file; each has a flag of the same name with '_' -> '-'.
const std::set<std::string> known_keys = {
    "scenario", "n", "n1", "n2", "subjects", "q", "kappa", "p", "seed", "out",
    "train", "input", "model", "points", "lambda1", "lambda2", "lambda3", "epsilon",
    "max_iterations", "max_group_passes", "max_coordinate_sweeps", "preset", "folds",
    "lambda1_grid", "lambda2_grid", "lambda3_grid", "lambda3_relative", "threads",
    "replicates", "seed_base", "timing",
};

json load_config(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::io, "cannot open config '" + path.string() + "'");
    json doc;
    try {
        is >> doc;
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, path.string() + ": " + e.what());
    }
    if (!doc.is_object()) fail(ErrorKind::parse, path.string() + ": config must be a JSON object");
    for (const auto& item : doc.items())
        if (!known_keys.count(item.key())) fail(ErrorKind::parse, path.string() + ": unknown key '" + item.key() + "'");
    return doc;
}

// Merged view of config file and flags.
class Settings
{
public:
    explicit Settings(json values) : values_(std::move(values)) {}

    bool has(const std::string& key) const { return values_.contains(key); }

    template <class T>
    T get(const std::string& key, T fallback) const
    {
        if (!has(key)) return fallback;
        try {
            return values_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(ErrorKind::parse, "setting '" + key + "' has the wrong type");
        }
    }

    template <class T>
    T require(const std::string& key) const
    {
        if (!has(key)) fail(ErrorKind::parameter, "missing required setting '" + key + "'");
        return get<T>(key, T{});
    }

private:
    json values_;
};

void write_line(std::ostream& os, const json& doc)
{
    os << doc.dump() << "\n";
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    os << text;
    if (!os) fail(ErrorKind::io, "write failed for '" + path.string() + "'");
}

fs::path output_dir(const Settings& s)
{
    const fs::path dir = s.get<std::string>("out", ".");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) fail(ErrorKind::io, "cannot create output directory '" + dir.string() + "'");
    return dir;
}

ScenarioKind scenario_kind(const Settings& s)
{
    const auto name = s.get<std::string>("scenario", "A");
    if (name == "A") return ScenarioKind::exponential;
    if (name == "B") return ScenarioKind::random;
    fail(ErrorKind::parameter, "scenario must be A or B, got '" + name + "'");
}

PenaltyConfig penalty_settings(const Settings& s)
{
    PenaltyConfig cfg;
    cfg.lambda1 = s.get("lambda1", cfg.lambda1);
    cfg.lambda2 = s.get("lambda2", cfg.lambda2);
    cfg.lambda3 = s.get("lambda3", cfg.lambda3);
    cfg.epsilon = s.get("epsilon", cfg.epsilon);
    cfg.max_iterations = s.get("max_iterations", cfg.max_iterations);
    cfg.max_group_passes = s.get("max_group_passes", cfg.max_group_passes);
    cfg.max_coordinate_sweeps = s.get("max_coordinate_sweeps", cfg.max_coordinate_sweeps);
    return cfg;
}

CVConfig cv_settings(const Settings& s, int p)
{
    const auto preset = s.get<std::string>("preset", p == 0 ? "fof" : "mixed");
    CVConfig cv;
    if (preset == "fof")
        cv = function_on_function_preset();
    else if (preset == "mixed")
        cv = mixed_predictor_preset();
    else
        fail(ErrorKind::parameter, "preset must be fof or mixed, got '" + preset + "'");
    cv.folds = s.get("folds", cv.folds);
    cv.lambda1_grid = s.get("lambda1_grid", cv.lambda1_grid);
    cv.lambda2_grid = s.get("lambda2_grid", cv.lambda2_grid);
    if (s.has("lambda3_grid")) {
        cv.lambda3_grid = s.get("lambda3_grid", cv.lambda3_grid);
        cv.lambda3_relative = false;
    }
    cv.lambda3_relative = s.get("lambda3_relative", cv.lambda3_relative);
    cv.seed = s.get<std::uint64_t>("seed", cv.seed);
    cv.threads = s.get("threads", cv.threads);
    cv.base = penalty_settings(s);
    cv.validate();
    return cv;
}

json penalty_json(const PenaltyConfig& p)
{
    return {{"lambda1", p.lambda1}, {"lambda2", p.lambda2}, {"lambda3", p.lambda3}};
}

void add_convergence(json& summary, const CoefficientFit& fit)
{
    summary["converged"] = fit.converged;
    summary["iterations"] = fit.iterations;
    summary["objective"] = fit.objective_trace.empty() ? 0.0 : fit.objective_trace.back();
    if (!fit.converged)
        summary["warning"] = "coordinate descent stopped at max_iterations before the objective decrease fell below epsilon";
}

void cmd_simulate(const Settings& s, std::ostream& out)
{
    SimulationScenario scenario;
    scenario.kind = scenario_kind(s);
    scenario.q = s.get("q", scenario.q);
    scenario.kappa = s.get("kappa", scenario.kappa);
    scenario.p = s.get("p", scenario.p);
    scenario.seed = s.get<std::uint64_t>("seed", scenario.seed);
    const int n = s.get("n", 5);
    const int n1 = s.get("n1", n);
    const int n2 = s.get("n2", n);
    const int subjects = s.get("subjects", 50);
    if (subjects < 1) fail(ErrorKind::parameter, "subjects must be >= 1");
    const int n_test = test_subjects(subjects);

    const SimulatedData all = simulate(scenario, n1, n2, subjects + n_test);
    const SimulatedData train = all.slice(0, static_cast<std::size_t>(subjects));
    const SimulatedData test = all.slice(static_cast<std::size_t>(subjects), static_cast<std::size_t>(n_test));

    const fs::path dir = output_dir(s);
    save_csv(train.data, dir / "train.csv");
    save_csv(test.data, dir / "test.csv");
    save_oracle({scenario, all.oracle, train.basis_coefficients, test.basis_coefficients}, dir / "oracle.json");
    write_line(out, {{"command", "simulate"},
                     {"train", (dir / "train.csv").string()},
                     {"test", (dir / "test.csv").string()},
                     {"oracle", (dir / "oracle.json").string()},
                     {"train_subjects", subjects},
                     {"test_subjects", n_test}});
}

void cmd_fit(const Settings& s, std::ostream& out)
{
    const FunctionalDataset data = load_csv(s.require<std::string>("train"));
    const PenaltyConfig cfg = penalty_settings(s);
    const SolverWorkspace ws = precompute(data, KernelSpec{});
    const FittedModel model = make_model(ws, cfg, fit(ws, cfg));
    const fs::path dir = output_dir(s);
    save_model(model, dir / "model.json");
    json summary{{"command", "fit"}, {"model", (dir / "model.json").string()}, {"penalty", penalty_json(cfg)}};
    add_convergence(summary, model.coefficients);
    write_line(out, summary);
}

void cmd_predict(const Settings& s, std::ostream& out)
{
    const FittedModel model = load_model(s.require<std::string>("model"));
    const FunctionalDataset input = load_csv(s.require<std::string>("input"));
    if (!(input.x_grid == model.x_grid))
        fail(ErrorKind::grid, "input x_grid differs from the grid the model was fit on");
    PredictionRequest request{input.x, input.z, s.get("points", model.y_grid.points())};
    const Matrix predicted = predict(model, request);

    std::ostringstream csv;
    csv << "subject,r,prediction\n";
    char buf[128];
    for (Eigen::Index t = 0; t < predicted.cols(); ++t)
        for (Eigen::Index j = 0; j < predicted.rows(); ++j) {
            std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n", static_cast<long long>(t),
                          request.target_points[static_cast<std::size_t>(j)], predicted(j, t));
            csv << buf;
        }
    const fs::path dir = output_dir(s);
    write_text(dir / "predictions.csv", csv.str());
    write_line(out, {{"command", "predict"},
                     {"predictions", (dir / "predictions.csv").string()},
                     {"subjects", predicted.cols()},
                     {"points", predicted.rows()}});
}

void cmd_cv(const Settings& s, std::ostream& out)
{
    const FunctionalDataset data = load_csv(s.require<std::string>("train"));
    const CVConfig cv = cv_settings(s, static_cast<int>(data.covariates()));
    const KernelSpec kernel;
    const CVResult result = cv_select(data, kernel, cv);

    const SolverWorkspace ws = precompute(data, kernel);
    const FittedModel model = make_model(ws, result.selected, fit(ws, result.selected));

    const fs::path dir = output_dir(s);
    std::ostringstream table;
    write_score_table(table, result);
    write_text(dir / "cv_scores.csv", table.str());
    json selected = penalty_json(result.selected);
    selected["score"] = result.best_score;
    selected["folds"] = cv.folds;
    selected["seed"] = cv.seed;
    selected["grid_points"] = result.table.size();
    write_text(dir / "selected.json", selected.dump(2) + "\n");
    save_model(model, dir / "model.json");

    json summary{{"command", "cv"},
                 {"scores", (dir / "cv_scores.csv").string()},
                 {"selected", penalty_json(result.selected)},
                 {"score", result.best_score},
                 {"model", (dir / "model.json").string()}};
    add_convergence(summary, model.coefficients);
    write_line(out, summary);
}

void cmd_bench(const Settings& s, std::ostream& out)
{
    BenchConfig cfg;
    cfg.cell.scenario = scenario_kind(s);
    cfg.cell.n = s.get("n", cfg.cell.n);
    cfg.cell.subjects = s.get("subjects", cfg.cell.subjects);
    cfg.cell.q = s.get("q", cfg.cell.q);
    cfg.cell.p = s.get("p", cfg.cell.p);
    cfg.cell.kappa = s.get("kappa", cfg.cell.kappa);
    cfg.replicates = s.get("replicates", 1);
    cfg.seed_base = s.get<std::uint64_t>("seed_base", s.get<std::uint64_t>("seed", cfg.seed_base));
    cfg.threads = s.get("threads", 1);
    cfg.cv = cv_settings(s, cfg.cell.p);
    // Replicates already run in parallel when requested; folds stay sequential.
    cfg.cv.threads = 1;
    const bool timing = s.get("timing", false);

    const auto results = run_bench(cfg);
    const fs::path dir = output_dir(s);
    std::ostringstream csv;
    write_bench_csv(csv, cfg.cell, results, timing);
    write_text(dir / "bench.csv", csv.str());

    int unconverged = 0;
    for (const auto& r : results) unconverged += r.converged ? 0 : 1;
    json summary{{"command", "bench"},
                 {"bench", (dir / "bench.csv").string()},
                 {"replicates", cfg.replicates},
                 {"rmise_x100_avg", 100.0 * mean_rmise(results)}};
    const auto reference = reference_rmise_x100(cfg.cell);
    summary["reference_rmise_x100"] = reference ? json(*reference) : json(nullptr);
    if (unconverged > 0)
        summary["warning"] = std::to_string(unconverged) + " replicate fits stopped at max_iterations";
    write_line(out, summary);
}

std::string flag_name(const std::string& key)
{
    std::string flag = "--" + key;
    for (char& c : flag)
        if (c == '_') c = '-';
    return flag;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Functional linear regression in a reproducing kernel Hilbert space", "funreg"};
    app.require_subcommand(1, 1);

    std::string config_path;
    json overrides = json::object();

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON file with settings; flags override it");
        cmd->add_option_function<std::uint64_t>(flag_name("seed"), [&](const std::uint64_t& v) { overrides["seed"] = v; },
                                                "Random seed");
        cmd->add_option_function<std::string>(flag_name("out"), [&](const std::string& v) { overrides["out"] = v; },
                                              "Output directory (created if missing)");
    };
    const auto add_string = [&](CLI::App* cmd, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(flag_name(key), [&, key](const std::string& v) { overrides[key] = v; },
                                              help);
    };
    const auto add_int = [&](CLI::App* cmd, const std::string& key, const std::string& help) {
        cmd->add_option_function<int>(flag_name(key), [&, key](const int& v) { overrides[key] = v; }, help);
    };
    const auto add_real = [&](CLI::App* cmd, const std::string& key, const std::string& help) {
        cmd->add_option_function<double>(flag_name(key), [&, key](const double& v) { overrides[key] = v; }, help);
    };
    const auto add_reals = [&](CLI::App* cmd, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::vector<double>>(
               flag_name(key), [&, key](const std::vector<double>& v) { overrides[key] = v; }, help)
            ->delimiter(',');
    };
    const auto add_penalties = [&](CLI::App* cmd) {
        add_real(cmd, "lambda1", "Penalty on the Hilbert-Schmidt norm of A");
        add_real(cmd, "lambda2", "Penalty on the RKHS norms of the beta_l");
        add_real(cmd, "lambda3", "Group penalty on the beta_l");
        add_real(cmd, "epsilon", "Objective-decrease tolerance");
        add_int(cmd, "max_iterations", "Outer iteration cap");
        add_int(cmd, "max_group_passes", "Group pass cap per B update");
        add_int(cmd, "max_coordinate_sweeps", "Coordinate sweep cap per group");
    };
    const auto add_cv = [&](CLI::App* cmd) {
        add_string(cmd, "preset", "Penalty grids: fof or mixed (default by p)");
        add_int(cmd, "folds", "Number of folds");
        add_reals(cmd, "lambda1_grid", "Comma-separated lambda1 values");
        add_reals(cmd, "lambda2_grid", "Comma-separated lambda2 values");
        add_reals(cmd, "lambda3_grid", "Comma-separated lambda3 values (absolute unless --lambda3-relative)");
        cmd->add_flag_function("--lambda3-relative", [&](std::int64_t) { overrides["lambda3_relative"] = true; },
                               "Read lambda3 values as fractions of the level that zeroes every group");
        add_int(cmd, "threads", "Worker threads");
    };
    const auto add_scenario = [&](CLI::App* cmd) {
        add_string(cmd, "scenario", "A (exponential) or B (random)");
        add_int(cmd, "n", "Grid size for X and Y");
        add_int(cmd, "subjects", "Training subjects T");
        add_int(cmd, "q", "Basis size");
        add_real(cmd, "kappa", "Signal scale");
        add_int(cmd, "p", "Number of scalar covariates");
    };

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Write train.csv, test.csv and oracle.json");
    add_common(simulate_cmd);
    add_scenario(simulate_cmd);
    add_int(simulate_cmd, "n1", "Grid size for X");
    add_int(simulate_cmd, "n2", "Grid size for Y");

    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit at fixed penalties and write model.json");
    add_common(fit_cmd);
    add_string(fit_cmd, "train", "Training dataset CSV");
    add_penalties(fit_cmd);

    CLI::App* predict_cmd = app.add_subcommand("predict", "Predict responses and write predictions.csv");
    add_common(predict_cmd);
    add_string(predict_cmd, "model", "Model file from fit or cv");
    add_string(predict_cmd, "input", "Dataset CSV with X and Z (its Y values are ignored)");
    add_reals(predict_cmd, "points", "Comma-separated response points (default: the model's y grid)");

    CLI::App* cv_cmd = app.add_subcommand("cv", "Select penalties by k-fold CV; write cv_scores.csv, selected.json, model.json");
    add_common(cv_cmd);
    add_string(cv_cmd, "train", "Training dataset CSV");
    add_penalties(cv_cmd);
    add_cv(cv_cmd);

    CLI::App* bench_cmd = app.add_subcommand("bench", "Replicated simulation study; write bench.csv");
    add_common(bench_cmd);
    add_scenario(bench_cmd);
    add_int(bench_cmd, "replicates", "Number of replicates");
    add_int(bench_cmd, "seed_base", "Seed of the first replicate (default: --seed)");
    add_cv(bench_cmd);
    bench_cmd->add_flag_function("--timing", [&](std::int64_t) { overrides["timing"] = true; },
                                 "Record wall-clock runtime_ms (otherwise 0, keeping output reproducible)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        write_line(err, {{"error", "usage"}, {"message", e.what()}});
        return 2;
    }

    try {
        json merged = config_path.empty() ? json::object() : load_config(config_path);
        merged.merge_patch(overrides);
        const Settings settings(std::move(merged));
        if (simulate_cmd->parsed())
            cmd_simulate(settings, out);
        else if (fit_cmd->parsed())
            cmd_fit(settings, out);
        else if (predict_cmd->parsed())
            cmd_predict(settings, out);
        else if (cv_cmd->parsed())
            cmd_cv(settings, out);
        else
            cmd_bench(settings, out);
    } catch (const Error& e) {
        write_line(err, {{"error", error_kind_name(e.kind())}, {"message", e.what()}});
        return 1;
    } catch (const std::exception& e) {
        write_line(err, {{"error", "internal"}, {"message", e.what()}});
        return 1;
    }
    return 0;
}

} // namespace funreg::cli
