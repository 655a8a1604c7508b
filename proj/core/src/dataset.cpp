#include "funreg/dataset.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>

#include "funreg/error.hpp"

namespace funreg {

namespace {

std::string format_real(double v)
{
    char buf[40];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what)
{
    fail(ErrorKind::parse, "line " + std::to_string(line) + ": " + what);
}

double parse_real(std::string_view token, std::size_t line)
{
    token = trim(token);
    double value = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (token.empty() || ec != std::errc() || ptr != end)
        parse_error(line, "invalid number '" + std::string(token) + "'");
    return value;
}

std::vector<double> parse_list(std::string_view body, std::size_t line)
{
    std::vector<double> out;
    if (trim(body).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = body.find(',', start);
        out.push_back(parse_real(body.substr(start, comma - start), line));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view header_body(std::string_view line, std::string_view key, std::size_t line_no)
{
    const std::string prefix = "#" + std::string(key) + ":";
    if (line.substr(0, prefix.size()) != prefix)
        parse_error(line_no, "expected header '" + prefix + "'");
    return line.substr(prefix.size());
}

SampleGrid parse_grid(std::string_view body, std::size_t line_no)
{
    auto points = parse_list(body, line_no);
    if (points.empty()) parse_error(line_no, "empty grid");
    for (double v : points)
        if (!(v >= 0.0 && v <= 1.0)) parse_error(line_no, "grid point " + format_real(v) + " outside [0,1]");
    try {
        return make_grid(std::move(points));
    } catch (const Error& e) {
        parse_error(line_no, e.what());
    }
}

} // namespace

Vector SampleGrid::weight_vector() const
{
    return Eigen::Map<const Vector>(weights_.data(), static_cast<Eigen::Index>(weights_.size()));
}

double SampleGrid::integrate(std::span<const double> values) const
{
    if (values.size() != size()) fail(ErrorKind::shape, "integrate: value count does not match grid");
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += weights_[i] * values[i];
    return sum / static_cast<double>(size());
}

double SampleGrid::integrate(const Vector& values) const
{
    return integrate(std::span<const double>(values.data(), static_cast<std::size_t>(values.size())));
}

SampleGrid make_grid(std::vector<double> points)
{
    if (points.empty()) fail(ErrorKind::grid, "grid must contain at least one point");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i] >= 0.0 && points[i] <= 1.0))
            fail(ErrorKind::grid, "grid point " + format_real(points[i]) + " outside [0,1]");
        if (i > 0 && !(points[i] > points[i - 1]))
            fail(ErrorKind::grid, "grid points must be strictly increasing (index " + std::to_string(i) + ")");
    }
    // A leading point at 0 would get weight 0; the weights must stay positive.
    if (points.front() == 0.0) fail(ErrorKind::grid, "first grid point must be > 0 (its weight would vanish)");

    const double scale = static_cast<double>(points.size() + 1);
    SampleGrid grid;
    grid.weights_.resize(points.size());
    double previous = 0.0;
    bool canonical = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        grid.weights_[i] = scale * (points[i] - previous);
        previous = points[i];
        canonical = canonical && points[i] == static_cast<double>(i + 1) / scale;
    }
    // (n+1)(s_i - s_{i-1}) is 1 only up to rounding on the canonical grid; pin it exactly.
    if (canonical) grid.weights_.assign(points.size(), 1.0);
    grid.points_ = std::move(points);
    return grid;
}

SampleGrid equispaced_grid(std::size_t n)
{
    if (n == 0) fail(ErrorKind::grid, "grid must contain at least one point");
    std::vector<double> points(n);
    for (std::size_t i = 0; i < n; ++i)
        points[i] = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    return make_grid(std::move(points));
}

void FunctionalDataset::validate() const
{
    const auto t = x.cols();
    if (t < 1) fail(ErrorKind::shape, "dataset needs at least one subject");
    if (y.cols() != t || z.cols() != t) fail(ErrorKind::shape, "X, Y and Z must have the same number of subjects");
    if (static_cast<std::size_t>(x.rows()) != x_grid.size()) fail(ErrorKind::shape, "X rows do not match x_grid");
    if (static_cast<std::size_t>(y.rows()) != y_grid.size()) fail(ErrorKind::shape, "Y rows do not match y_grid");
}

FunctionalDataset FunctionalDataset::select(std::span<const std::size_t> subjects) const
{
    FunctionalDataset out;
    out.x_grid = x_grid;
    out.y_grid = y_grid;
    const auto m = static_cast<Eigen::Index>(subjects.size());
    out.x.resize(x.rows(), m);
    out.y.resize(y.rows(), m);
    out.z.resize(z.rows(), m);
    for (Eigen::Index c = 0; c < m; ++c) {
        const auto t = static_cast<Eigen::Index>(subjects[static_cast<std::size_t>(c)]);
        if (t >= x.cols()) fail(ErrorKind::index, "select: subject index out of range");
        out.x.col(c) = x.col(t);
        out.y.col(c) = y.col(t);
        out.z.col(c) = z.col(t);
    }
    return out;
}

FunctionalDataset make_dataset(SampleGrid x_grid, SampleGrid y_grid, Matrix x, Matrix y, Matrix z)
{
    FunctionalDataset d{std::move(x_grid), std::move(y_grid), std::move(x), std::move(y), std::move(z)};
    d.validate();
    return d;
}

void write_csv(std::ostream& os, const FunctionalDataset& data)
{
    data.validate();
    auto write_list = [&os](const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << format_real(v[i]);
    };
    os << "#x_grid: ";
    write_list(data.x_grid.points());
    os << "\n#y_grid: ";
    write_list(data.y_grid.points());
    os << "\n#p: " << data.covariates() << "\n";
    for (Eigen::Index t = 0; t < data.x.cols(); ++t) {
        bool first = true;
        auto put = [&](double v) {
            os << (first ? "" : ",") << format_real(v);
            first = false;
        };
        for (Eigen::Index i = 0; i < data.x.rows(); ++i) put(data.x(i, t));
        for (Eigen::Index j = 0; j < data.y.rows(); ++j) put(data.y(j, t));
        for (Eigen::Index l = 0; l < data.z.rows(); ++l) put(data.z(l, t));
        os << "\n";
    }
}

FunctionalDataset read_csv(std::istream& is)
{
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++line_no;
            if (!trim(line).empty()) return true;
        }
        return false;
    };

    if (!next_line()) parse_error(line_no + 1, "missing #x_grid header");
    SampleGrid x_grid = parse_grid(header_body(line, "x_grid", line_no), line_no);
    if (!next_line()) parse_error(line_no + 1, "missing #y_grid header");
    SampleGrid y_grid = parse_grid(header_body(line, "y_grid", line_no), line_no);
    if (!next_line()) parse_error(line_no + 1, "missing #p header");
    const auto p_body = trim(header_body(line, "p", line_no));
    long p = -1;
    {
        const auto [ptr, ec] = std::from_chars(p_body.data(), p_body.data() + p_body.size(), p);
        if (ec != std::errc() || ptr != p_body.data() + p_body.size() || p < 0)
            parse_error(line_no, "invalid covariate count '" + std::string(p_body) + "'");
    }

    const std::size_t n1 = x_grid.size();
    const std::size_t n2 = y_grid.size();
    const std::size_t width = n1 + n2 + static_cast<std::size_t>(p);
    std::vector<std::vector<double>> rows;
    while (next_line()) {
        if (trim(line).front() == '#') parse_error(line_no, "unexpected header line after data");
        auto values = parse_list(line, line_no);
        if (values.size() != width)
            parse_error(line_no, "ragged row: expected " + std::to_string(width) + " values, got " +
                                     std::to_string(values.size()));
        rows.push_back(std::move(values));
    }
    if (rows.empty()) parse_error(line_no + 1, "no data rows");

    const auto t = static_cast<Eigen::Index>(rows.size());
    Matrix x(static_cast<Eigen::Index>(n1), t);
    Matrix y(static_cast<Eigen::Index>(n2), t);
    Matrix z(static_cast<Eigen::Index>(p), t);
    for (Eigen::Index c = 0; c < t; ++c) {
        const auto& r = rows[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < n1; ++i) x(static_cast<Eigen::Index>(i), c) = r[i];
        for (std::size_t j = 0; j < n2; ++j) y(static_cast<Eigen::Index>(j), c) = r[n1 + j];
        for (long l = 0; l < p; ++l) z(l, c) = r[n1 + n2 + static_cast<std::size_t>(l)];
    }
    return make_dataset(std::move(x_grid), std::move(y_grid), std::move(x), std::move(y), std::move(z));
}

void save_csv(const FunctionalDataset& data, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    write_csv(os, data);
    if (!os) fail(ErrorKind::io, "write failed for '" + path.string() + "'");
}

FunctionalDataset load_csv(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    try {
        return read_csv(is);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

} // namespace funreg
