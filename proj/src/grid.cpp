#include "spectral3/grid.hpp"

#include "spectral3/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace spectral3 {

Grid::Grid(int intervals) : m_(intervals) {
    if (intervals < 1) fail(ErrorKind::InvalidArgument, "grid needs at least one interval");
}

GridFunction::GridFunction(Grid grid, std::vector<cplx> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.nodes())
        fail(ErrorKind::InvalidArgument, "grid function has " + std::to_string(values_.size()) +
                                             " values for " + std::to_string(grid_.nodes()) + " nodes");
    for (std::size_t m = 0; m < values_.size(); ++m)
        if (!std::isfinite(values_[m].real()) || !std::isfinite(values_[m].imag()))
            fail(ErrorKind::NonFinite, "grid function value at node " + std::to_string(m));
}

GridFunction GridFunction::constant(Grid grid, cplx value) {
    return GridFunction(grid, std::vector<cplx>(grid.nodes(), value));
}

GridFunction GridFunction::sample(Grid grid, const std::function<cplx(double)>& f) {
    std::vector<cplx> v(grid.nodes());
    for (int m = 0; m <= grid.intervals(); ++m) v[m] = f(grid.x(m));
    return GridFunction(grid, std::move(v));
}

cplx GridFunction::at(double x) const {
    const int M = grid_.intervals();
    if (M < 3) fail(ErrorKind::InvalidArgument, "cubic interpolation needs at least three intervals");
    const double t = x * M;
    const int first = std::clamp(static_cast<int>(std::floor(t)) - 1, 0, M - 3);
    cplx result = 0.0;
    for (int i = 0; i < 4; ++i) {
        double w = 1.0;
        for (int j = 0; j < 4; ++j)
            if (j != i) w *= (t - (first + j)) / static_cast<double>(i - j);
        result += w * values_[first + i];
    }
    return result;
}

cplx GridFunction::midpoint(int m) const {
    const int M = grid_.intervals();
    const auto& f = values_;
    if (M < 3) fail(ErrorKind::InvalidArgument, "cubic interpolation needs at least three intervals");
    if (m == 0) return (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0;
    if (m == M - 1) return (f[M - 3] - 5.0 * f[M - 2] + 15.0 * f[M - 1] + 5.0 * f[M]) / 16.0;
    return (-f[m - 1] + 9.0 * f[m] + 9.0 * f[m + 1] - f[m + 2]) / 16.0;
}

namespace {
void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid() == b.grid())) fail(ErrorKind::InvalidArgument, "grid mismatch");
}
}  // namespace

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t m = 0; m < values_.size(); ++m) values_[m] += other.values_[m];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t m = 0; m < values_.size(); ++m) values_[m] -= other.values_[m];
    return *this;
}

GridFunction& GridFunction::operator*=(const GridFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t m = 0; m < values_.size(); ++m) values_[m] *= other.values_[m];
    return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
    for (auto& v : values_) v *= s;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
GridFunction operator*(cplx s, GridFunction a) { return a *= s; }
GridFunction operator+(GridFunction a, cplx c) {
    for (auto& v : a.values()) v += c;
    return a;
}

cplx integrate(const GridFunction& f) {
    const int M = f.grid().intervals();
    if (M % 2 != 0) fail(ErrorKind::InvalidArgument, "Simpson quadrature needs an even number of intervals");
    const auto v = f.values();
    cplx odd = 0.0, even = 0.0;
    for (int m = 1; m < M; m += 2) odd += v[m];
    for (int m = 2; m < M; m += 2) even += v[m];
    return f.grid().step() / 3.0 * (v[0] + v[M] + 4.0 * odd + 2.0 * even);
}

GridFunction cumulative(const GridFunction& f) {
    const int M = f.grid().intervals();
    const double h = f.grid().step();
    const auto v = f.values();
    std::vector<cplx> out(v.size(), 0.0);
    for (int m = 2; m <= M; m += 2) out[m] = out[m - 2] + h / 3.0 * (v[m - 2] + 4.0 * v[m - 1] + v[m]);
    // Odd nodes: one interval beyond the preceding even node, integrating the cubic through four nodes.
    for (int m = 1; m <= M; m += 2) {
        if (m + 2 <= M)
            out[m] = out[m - 1] + h / 24.0 * (9.0 * v[m - 1] + 19.0 * v[m] - 5.0 * v[m + 1] + v[m + 2]);
        else if (m >= 2 && m + 1 <= M)
            out[m] = out[m - 1] + h / 24.0 * (-v[m - 2] + 13.0 * v[m - 1] + 13.0 * v[m] - v[m + 1]);
        else if (m >= 3)
            out[m] = out[m - 1] + h / 24.0 * (v[m - 3] - 5.0 * v[m - 2] + 19.0 * v[m - 1] + 9.0 * v[m]);
        else if (m + 1 <= M)
            out[m] = out[m - 1] + h / 12.0 * (5.0 * v[m - 1] + 8.0 * v[m] - v[m + 1]);
        else
            out[m] = h / 2.0 * (v[0] + v[1]);
    }
    return GridFunction(f.grid(), std::move(out));
}

GridFunction differentiate(const GridFunction& f) {
    const int M = f.grid().intervals();
    if (M < 5) fail(ErrorKind::InvalidArgument, "fourth-order differentiation needs at least five intervals");
    const double c = 1.0 / (12.0 * f.grid().step());
    const auto v = f.values();
    std::vector<cplx> d(v.size());
    d[0] = c * (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]);
    d[1] = c * (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]);
    for (int m = 2; m <= M - 2; ++m) d[m] = c * (v[m - 2] - 8.0 * v[m - 1] + 8.0 * v[m + 1] - v[m + 2]);
    d[M - 1] = c * (3.0 * v[M] + 10.0 * v[M - 1] - 18.0 * v[M - 2] + 6.0 * v[M - 3] - v[M - 4]);
    d[M] = c * (25.0 * v[M] - 48.0 * v[M - 1] + 36.0 * v[M - 2] - 16.0 * v[M - 3] + 3.0 * v[M - 4]);
    return GridFunction(f.grid(), std::move(d));
}

double l2_norm(const GridFunction& f) {
    std::vector<cplx> sq(f.values().size());
    std::transform(f.values().begin(), f.values().end(), sq.begin(), [](cplx z) { return cplx(std::norm(z)); });
    return std::sqrt(std::max(0.0, integrate(GridFunction(f.grid(), std::move(sq))).real()));
}

double max_norm(const GridFunction& f) {
    double r = 0.0;
    for (cplx z : f.values()) r = std::max(r, std::abs(z));
    return r;
}

double w2m1_distance(const GridFunction& s1, const GridFunction& s2) {
    GridFunction d = s1 - s2;
    const cplx c = integrate(d);
    return l2_norm(d + (-c));
}

CoefficientPair::CoefficientPair(GridFunction tau1, GridFunction sigma0)
    : tau1_(std::move(tau1)), sigma0_(std::move(sigma0)) {
    if (!(tau1_.grid() == sigma0_.grid())) fail(ErrorKind::InvalidArgument, "coefficient grids differ");
}

namespace {
constexpr const char* kCsvHeader = "x,tau1_re,tau1_im,sigma0_re,sigma0_im";

double parse_double(std::string_view field, std::size_t row) {
    double value = 0.0;
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        fail(ErrorKind::Parse, "row " + std::to_string(row) + ": cannot parse number '" + std::string(field) + "'");
    return value;
}
}  // namespace

CoefficientPair read_coefficients_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) fail(ErrorKind::Parse, path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) fail(ErrorKind::Parse, path.string() + ": expected header '" + kCsvHeader + "'");

    std::vector<double> xs;
    std::vector<cplx> tau, sigma;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
            fields.push_back(rest.substr(0, pos));
        fields.push_back(rest);
        if (fields.size() != 5)
            fail(ErrorKind::Parse, "row " + std::to_string(row) + ": expected 5 fields, found " +
                                       std::to_string(fields.size()));
        xs.push_back(parse_double(fields[0], row));
        tau.emplace_back(parse_double(fields[1], row), parse_double(fields[2], row));
        sigma.emplace_back(parse_double(fields[3], row), parse_double(fields[4], row));
    }
    if (xs.size() < 2) fail(ErrorKind::Parse, path.string() + ": need at least two data rows");
    const Grid grid(static_cast<int>(xs.size()) - 1);
    for (int m = 0; m <= grid.intervals(); ++m)
        if (std::abs(xs[m] - grid.x(m)) > 1e-9)
            fail(ErrorKind::Parse, "row " + std::to_string(m + 2) + ": x is not on the uniform grid of [0,1]");
    return CoefficientPair(GridFunction(grid, std::move(tau)), GridFunction(grid, std::move(sigma)));
}

void write_coefficients_csv(const std::filesystem::path& path, const CoefficientPair& coeffs) {
    std::ofstream out(path);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << kCsvHeader << '\n';
    char buf[160];
    const Grid& g = coeffs.grid();
    for (int m = 0; m <= g.intervals(); ++m) {
        const cplx t = coeffs.tau1()[m], s = coeffs.sigma0()[m];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", g.x(m), t.real(), t.imag(), s.real(),
                      s.imag());
        out << buf;
    }
    if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace spectral3
