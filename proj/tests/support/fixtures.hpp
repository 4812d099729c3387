#pragma once

#include <spectral3/grid.hpp>

namespace fixtures {

using spectral3::CoefficientPair;
using spectral3::cplx;

CoefficientPair zero(int M = 512);
CoefficientPair constant(cplx tau1, cplx sigma0, int M = 512);
// tau1 = cos 2 pi x + shift, sigma0 = 0.3 i sin pi x
CoefficientPair smooth(double shift = 0.0, int M = 512);
// A non-self-adjoint pair with complex tau1 and complex sigma0.
CoefficientPair generic(int M = 512);

}  // namespace fixtures
