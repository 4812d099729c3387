#include "fixtures.hpp"

#include <cmath>
#include <numbers>

namespace fixtures {

using spectral3::Grid;
using spectral3::GridFunction;
constexpr double pi = std::numbers::pi;

CoefficientPair zero(int M) { return constant(0.0, 0.0, M); }

CoefficientPair constant(cplx tau1, cplx sigma0, int M) {
    const Grid g(M);
    return {GridFunction::constant(g, tau1), GridFunction::constant(g, sigma0)};
}

CoefficientPair smooth(double shift, int M) {
    const Grid g(M);
    return {GridFunction::sample(g, [=](double x) { return cplx(std::cos(2 * pi * x) + shift); }),
            GridFunction::sample(g, [](double x) { return cplx(0.0, 0.3 * std::sin(pi * x)); })};
}

CoefficientPair generic(int M) {
    const Grid g(M);
    return {GridFunction::sample(g, [](double x) { return cplx(0.5 * std::sin(2 * pi * x), 0.2 * x); }),
            GridFunction::sample(g, [](double x) { return cplx(0.4 * x * x, 0.3 * std::cos(pi * x)); })};
}

}  // namespace fixtures
