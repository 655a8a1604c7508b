#include "funreg/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "funreg/error.hpp"

namespace funreg {

using nlohmann::json;

namespace {

constexpr const char* model_format = "funreg.model";
constexpr const char* oracle_format = "funreg.oracle";
constexpr int format_version = 1;

json matrix_to_json(const Matrix& m)
{
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) values.push_back(m(i, j));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", values}};
}

Matrix matrix_from_json(const json& j, const char* name)
{
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto values = j.at("values").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != values.size())
        fail(ErrorKind::parse, std::string(name) + ": value count does not match rows x cols");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = values[static_cast<std::size_t>(i * cols + j2)];
    return m;
}

std::string scenario_name(ScenarioKind kind)
{
    return kind == ScenarioKind::exponential ? "A" : "B";
}

ScenarioKind scenario_from_name(const std::string& name)
{
    if (name == "A") return ScenarioKind::exponential;
    if (name == "B") return ScenarioKind::random;
    fail(ErrorKind::parse, "unknown scenario '" + name + "'");
}

json parse_document(std::istream& is, const char* expected_format)
{
    json doc;
    try {
        is >> doc;
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.value("format", "") != expected_format)
        fail(ErrorKind::parse, std::string("expected a '") + expected_format + "' document");
    if (doc.value("version", 0) != format_version)
        fail(ErrorKind::parse, "unsupported format version");
    return doc;
}

template <class Fn>
auto guarded(Fn&& fn)
{
    try {
        return fn();
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, std::string("invalid document: ") + e.what());
    }
}

} // namespace

void write_model(std::ostream& os, const FittedModel& model)
{
    const PenaltyConfig& p = model.penalty;
    const CoefficientFit& c = model.coefficients;
    json doc{
        {"format", model_format},
        {"version", format_version},
        {"kernel", std::string(kernel_name(model.kernel.kind))},
        {"x_grid", model.x_grid.points()},
        {"y_grid", model.y_grid.points()},
        {"R", matrix_to_json(c.r)},
        {"B", matrix_to_json(c.b)},
        {"penalty",
         {{"lambda1", p.lambda1},
          {"lambda2", p.lambda2},
          {"lambda3", p.lambda3},
          {"epsilon", p.epsilon},
          {"max_iterations", p.max_iterations},
          {"max_group_passes", p.max_group_passes},
          {"max_coordinate_sweeps", p.max_coordinate_sweeps}}},
        {"converged", c.converged},
        {"iterations", c.iterations},
        {"objective", c.objective_trace.empty() ? 0.0 : c.objective_trace.back()},
    };
    os << doc.dump(2) << "\n";
}

FittedModel read_model(std::istream& is)
{
    const json doc = parse_document(is, model_format);
    return guarded([&] {
        FittedModel model;
        model.kernel.kind = kernel_from_name(doc.at("kernel").get<std::string>());
        try {
            model.x_grid = make_grid(doc.at("x_grid").get<std::vector<double>>());
            model.y_grid = make_grid(doc.at("y_grid").get<std::vector<double>>());
        } catch (const Error& e) {
            fail(ErrorKind::parse, std::string("model grid: ") + e.what());
        }
        const json& p = doc.at("penalty");
        model.penalty.lambda1 = p.at("lambda1").get<double>();
        model.penalty.lambda2 = p.at("lambda2").get<double>();
        model.penalty.lambda3 = p.at("lambda3").get<double>();
        model.penalty.epsilon = p.at("epsilon").get<double>();
        model.penalty.max_iterations = p.at("max_iterations").get<int>();
        model.penalty.max_group_passes = p.at("max_group_passes").get<int>();
        model.penalty.max_coordinate_sweeps = p.at("max_coordinate_sweeps").get<int>();
        CoefficientFit& c = model.coefficients;
        c.r = matrix_from_json(doc.at("R"), "R");
        c.b = matrix_from_json(doc.at("B"), "B");
        c.converged = doc.at("converged").get<bool>();
        c.iterations = doc.at("iterations").get<int>();
        c.objective_trace = {doc.at("objective").get<double>()};
        const auto n1 = static_cast<Eigen::Index>(model.x_grid.size());
        const auto n2 = static_cast<Eigen::Index>(model.y_grid.size());
        if (c.r.rows() != n2 || c.r.cols() != n1) fail(ErrorKind::parse, "R does not match the grids");
        if (c.b.rows() != n2 && !(c.b.cols() == 0)) fail(ErrorKind::parse, "B does not match the y_grid");
        if (c.b.cols() == 0) c.b.resize(n2, 0);
        return model;
    });
}

void save_model(const FittedModel& model, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    write_model(os, model);
    if (!os) fail(ErrorKind::io, "write failed for '" + path.string() + "'");
}

FittedModel load_model(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    try {
        return read_model(is);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void write_oracle(std::ostream& os, const OracleRecord& record)
{
    const OracleModel& o = record.oracle;
    json doc{
        {"format", oracle_format},
        {"version", format_version},
        {"scenario", scenario_name(o.kind())},
        {"kappa", o.kappa()},
        {"q", o.q()},
        {"p", o.p()},
        {"seed", record.scenario.seed},
        {"lambda", matrix_to_json(o.lambda())},
        {"b", std::vector<double>(o.b().data(), o.b().data() + o.b().size())},
        {"train_coefficients", matrix_to_json(record.train_coefficients)},
        {"test_coefficients", matrix_to_json(record.test_coefficients)},
    };
    os << doc.dump(2) << "\n";
}

OracleRecord read_oracle(std::istream& is)
{
    const json doc = parse_document(is, oracle_format);
    return guarded([&] {
        OracleRecord record;
        record.scenario.kind = scenario_from_name(doc.at("scenario").get<std::string>());
        record.scenario.kappa = doc.at("kappa").get<double>();
        record.scenario.q = doc.at("q").get<int>();
        record.scenario.p = doc.at("p").get<int>();
        record.scenario.seed = doc.at("seed").get<std::uint64_t>();
        Matrix lambda = matrix_from_json(doc.at("lambda"), "lambda");
        const auto b_values = doc.at("b").get<std::vector<double>>();
        Vector b = Eigen::Map<const Vector>(b_values.data(), static_cast<Eigen::Index>(b_values.size()));
        record.oracle = OracleModel(record.scenario.kind, record.scenario.kappa, record.scenario.q,
                                    record.scenario.p, std::move(lambda), std::move(b));
        record.train_coefficients = matrix_from_json(doc.at("train_coefficients"), "train_coefficients");
        record.test_coefficients = matrix_from_json(doc.at("test_coefficients"), "test_coefficients");
        return record;
    });
}

void save_oracle(const OracleRecord& record, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    write_oracle(os, record);
    if (!os) fail(ErrorKind::io, "write failed for '" + path.string() + "'");
}

OracleRecord load_oracle(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    try {
        return read_oracle(is);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

} // namespace funreg
