#include "spectral3/quasi_ode.hpp"

#include "spectral3/error.hpp"

#include <cmath>

namespace spectral3 {

namespace {

// Entries (2,1) and (3,2) of the system matrix for a given variant.
struct Couplings {
    cplx lower;  // entry (2,1)
    cplx upper;  // entry (3,2)
};

Couplings couplings(Variant variant, cplx sigma0, cplx tau1) {
    switch (variant) {
        case Variant::Direct: return {-(sigma0 + tau1), sigma0 - tau1};
        case Variant::Star: return {sigma0 - tau1, -(sigma0 + tau1)};
        case Variant::Dagger: return {std::conj(sigma0) - std::conj(tau1), -(std::conj(sigma0) + std::conj(tau1))};
    }
    return {};
}

Mat3 assemble(const Couplings& c, cplx lambda, int sign) {
    Mat3 A = Mat3::Zero();
    A(0, 1) = 1.0;
    A(1, 2) = 1.0;
    A(1, 0) = c.lower;
    A(2, 1) = c.upper;
    A(2, 0) = static_cast<double>(sign) * lambda;
    return A;
}

bool finite(const Vec3& v) {
    for (int i = 0; i < 3; ++i)
        if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
    return true;
}

}  // namespace

int lambda_sign(Variant variant) { return variant == Variant::Star ? -1 : 1; }

Mat3 system_matrix(const CoefficientPair& coeffs, Variant variant, cplx lambda, double x) {
    return assemble(couplings(variant, coeffs.sigma0().at(x), coeffs.tau1().at(x)), lambda, lambda_sign(variant));
}

void check_resolution(const Grid& grid, cplx lambda) {
    if (std::cbrt(std::abs(lambda)) > 0.6 * grid.intervals())
        fail(ErrorKind::ResolutionLimit, "|lambda|^(1/3) = " + std::to_string(std::cbrt(std::abs(lambda))) +
                                             " exceeds 0.6*M for M = " + std::to_string(grid.intervals()));
}

StepMaps step_maps(const CoefficientPair& coeffs, Variant variant, cplx lambda, bool with_dlambda) {
    const Grid& grid = coeffs.grid();
    const int M = grid.intervals();
    if (M < 8) fail(ErrorKind::InvalidArgument, "integration grid needs M >= 8");
    check_resolution(grid, lambda);

    const int sign = lambda_sign(variant);
    const double h = grid.step();
    const Mat3 I = Mat3::Identity();
    Mat3 E = Mat3::Zero();
    E(2, 0) = static_cast<double>(sign);

    const auto& s = coeffs.sigma0();
    const auto& t = coeffs.tau1();

    StepMaps out{grid, variant, lambda, {}, {}};
    out.T.resize(M);
    if (with_dlambda) out.dT.resize(M);

    Mat3 A0 = assemble(couplings(variant, s[0], t[0]), lambda, sign);
    for (int m = 0; m < M; ++m) {
        const Mat3 Ah = assemble(couplings(variant, s.midpoint(m), t.midpoint(m)), lambda, sign);
        const Mat3 A1 = assemble(couplings(variant, s[m + 1], t[m + 1]), lambda, sign);
        const Mat3& K1 = A0;
        const Mat3 S1 = I + (h / 2) * K1;
        const Mat3 K2 = Ah * S1;
        const Mat3 S2 = I + (h / 2) * K2;
        const Mat3 K3 = Ah * S2;
        const Mat3 S3 = I + h * K3;
        const Mat3 K4 = A1 * S3;
        out.T[m] = I + (h / 6) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
        if (with_dlambda) {
            const Mat3& dK1 = E;
            const Mat3 dK2 = E * S1 + (h / 2) * Ah * dK1;
            const Mat3 dK3 = E * S2 + (h / 2) * Ah * dK2;
            const Mat3 dK4 = E * S3 + h * A1 * dK3;
            out.dT[m] = (h / 6) * (dK1 + 2.0 * dK2 + 2.0 * dK3 + dK4);
        }
        A0 = A1;
    }
    return out;
}

Trajectory propagate(const StepMaps& maps, const StateVector& init) {
    const int M = maps.grid.intervals();
    Trajectory tr{maps.grid, maps.variant, maps.lambda, {}, std::nullopt};
    tr.states.resize(M + 1);
    Vec3 v = init.vec();
    tr.states[0] = init;
    Vec3 dv = Vec3::Zero();
    if (maps.has_derivative()) tr.dstates.emplace(M + 1);
    if (tr.dstates) (*tr.dstates)[0] = StateVector{};
    for (int m = 0; m < M; ++m) {
        if (maps.has_derivative()) {
            dv = maps.dT[m] * v + maps.T[m] * dv;
            (*tr.dstates)[m + 1] = StateVector::from(dv);
        }
        v = maps.T[m] * v;
        if (!finite(v) || !finite(dv))
            fail(ErrorKind::NonFinite, "solution overflow at node " + std::to_string(m + 1) + " for lambda = (" +
                                           std::to_string(maps.lambda.real()) + "," +
                                           std::to_string(maps.lambda.imag()) + ")");
        tr.states[m + 1] = StateVector::from(v);
    }
    return tr;
}

Trajectory integrate_ivp(const CoefficientPair& coeffs, Variant variant, cplx lambda, const StateVector& init,
                         bool with_dlambda) {
    return propagate(step_maps(coeffs, variant, lambda, with_dlambda), init);
}

std::array<Trajectory, 3> fundamental_solutions(const CoefficientPair& coeffs, Variant variant, cplx lambda,
                                                bool with_dlambda) {
    const StepMaps maps = step_maps(coeffs, variant, lambda, with_dlambda);
    return {propagate(maps, {1.0, 0.0, 0.0}), propagate(maps, {0.0, 1.0, 0.0}), propagate(maps, {0.0, 0.0, 1.0})};
}

namespace {
// Signed 2x2 minor of T with row i and column j removed.
template <class F>
cplx signed_minor(int i, int j, F&& entry) {
    const int r0 = i == 0 ? 1 : 0, r1 = i == 2 ? 1 : 2;
    const int c0 = j == 0 ? 1 : 0, c1 = j == 2 ? 1 : 2;
    const cplx m = entry(r0, c0, r1, c1);
    return ((i + j) % 2 == 0) ? m : -m;
}
}  // namespace

Mat3 cofactor(const Mat3& T) {
    Mat3 C;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            C(i, j) = signed_minor(i, j, [&](int r0, int c0, int r1, int c1) {
                return T(r0, c0) * T(r1, c1) - T(r0, c1) * T(r1, c0);
            });
    return C;
}

Mat3 cofactor_derivative(const Mat3& T, const Mat3& dT) {
    Mat3 C;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            C(i, j) = signed_minor(i, j, [&](int r0, int c0, int r1, int c1) {
                return dT(r0, c0) * T(r1, c1) + T(r0, c0) * dT(r1, c1) - dT(r0, c1) * T(r1, c0) -
                       T(r0, c1) * dT(r1, c0);
            });
    return C;
}

}  // namespace spectral3
