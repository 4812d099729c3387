#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace spectral3 {

using cplx = std::complex<double>;

// Uniform partition of [0,1] into M subintervals.
class Grid {
public:
    explicit Grid(int intervals);

    int intervals() const noexcept { return m_; }
    std::size_t nodes() const noexcept { return static_cast<std::size_t>(m_) + 1; }
    double step() const noexcept { return 1.0 / m_; }
    double x(int m) const noexcept { return static_cast<double>(m) / m_; }

    bool operator==(const Grid&) const = default;

private:
    int m_;
};

class GridFunction {
public:
    GridFunction(Grid grid, std::vector<cplx> values);
    static GridFunction constant(Grid grid, cplx value);
    static GridFunction sample(Grid grid, const std::function<cplx(double)>& f);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const cplx> values() const noexcept { return values_; }
    std::span<cplx> values() noexcept { return values_; }
    cplx operator[](std::size_t m) const noexcept { return values_[m]; }
    cplx& operator[](std::size_t m) noexcept { return values_[m]; }

    // Cubic Lagrange interpolation through the four nodes nearest to x.
    cplx at(double x) const;
    // Cubic value at the midpoint of subinterval [x_m, x_{m+1}].
    cplx midpoint(int m) const;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(const GridFunction& other);
    GridFunction& operator*=(cplx s);

private:
    Grid grid_;
    std::vector<cplx> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx s, GridFunction a);
GridFunction operator+(GridFunction a, cplx c);

// Composite Simpson rule on [0,1]; requires an even number of intervals.
cplx integrate(const GridFunction& f);
// Running integral from 0 to every node.
GridFunction cumulative(const GridFunction& f);
// Fourth-order finite-difference derivative; requires at least five intervals.
GridFunction differentiate(const GridFunction& f);

double l2_norm(const GridFunction& f);
double max_norm(const GridFunction& f);
// L2 distance modulo an additive constant, i.e. the W2^{-1} distance between s1' and s2'.
double w2m1_distance(const GridFunction& s1, const GridFunction& s2);

// The coefficient pair (sigma0, tau1) of the third-order expression, with tau0 = sigma0'.
class CoefficientPair {
public:
    CoefficientPair(GridFunction tau1, GridFunction sigma0);

    const Grid& grid() const noexcept { return tau1_.grid(); }
    const GridFunction& tau1() const noexcept { return tau1_; }
    const GridFunction& sigma0() const noexcept { return sigma0_; }

private:
    GridFunction tau1_;
    GridFunction sigma0_;
};

CoefficientPair read_coefficients_csv(const std::filesystem::path& path);
void write_coefficients_csv(const std::filesystem::path& path, const CoefficientPair& coeffs);

}  // namespace spectral3
