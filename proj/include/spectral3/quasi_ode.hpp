#pragma once

#include "spectral3/grid.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace spectral3 {

using Mat3 = Eigen::Matrix3cd;
using Vec3 = Eigen::Vector3cd;

// DIRECT solves l(y) = lambda*y, STAR solves l*(z) = -z^[3] = lambda*z,
// DAGGER is the direct problem for the coefficient pair (-conj sigma0, conj tau1).
enum class Variant { Direct, Star, Dagger };

// (y, y^[1], y^[2]) with y^[1] = y'.
struct StateVector {
    cplx y{};
    cplx y1{};
    cplx y2{};

    Vec3 vec() const { return Vec3(y, y1, y2); }
    static StateVector from(const Vec3& v) { return {v(0), v(1), v(2)}; }
};

struct Trajectory {
    Grid grid;
    Variant variant;
    cplx lambda;
    std::vector<StateVector> states;
    std::optional<std::vector<StateVector>> dstates;

    const StateVector& at_end() const { return states.back(); }
};

Mat3 system_matrix(const CoefficientPair& coeffs, Variant variant, cplx lambda, double x);

// Sign of lambda in entry (3,1) of the system matrix, which is also dA/dlambda there.
int lambda_sign(Variant variant);

// Throws ResolutionLimit when |lambda|^{1/3} exceeds 0.6*M.
void check_resolution(const Grid& grid, cplx lambda);

// One-step RK4 propagators: T[m] maps the state at x_m to the state at x_{m+1}.
// dT[m] is the exact lambda-derivative of T[m] when requested.
struct StepMaps {
    Grid grid;
    Variant variant;
    cplx lambda;
    std::vector<Mat3> T;
    std::vector<Mat3> dT;

    bool has_derivative() const { return !dT.empty(); }
};

StepMaps step_maps(const CoefficientPair& coeffs, Variant variant, cplx lambda, bool with_dlambda);

Trajectory propagate(const StepMaps& maps, const StateVector& init);

Trajectory integrate_ivp(const CoefficientPair& coeffs, Variant variant, cplx lambda, const StateVector& init,
                         bool with_dlambda);

// Solutions with C_k^{[j-1]}(0) = delta_{kj}.
std::array<Trajectory, 3> fundamental_solutions(const CoefficientPair& coeffs, Variant variant, cplx lambda,
                                                bool with_dlambda);

// Cofactor matrix det(T)*T^{-T}; for the trace-free systems here it propagates cross products of solutions.
Mat3 cofactor(const Mat3& T);
// Derivative of cofactor(T) along dT.
Mat3 cofactor_derivative(const Mat3& T, const Mat3& dT);

}  // namespace spectral3
