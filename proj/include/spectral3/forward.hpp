#pragma once

#include "spectral3/quasi_ode.hpp"
#include "spectral3/spectral_data.hpp"

#include <array>
#include <functional>
#include <optional>
#include <set>

namespace spectral3 {

// Characteristic functions at x = 1. The 2x2 minors are propagated through the cofactor
// matrices of the step maps, so they carry no cancellation between growing solutions.
struct CharacteristicValues {
    cplx d11{}, d21{}, d31{}, d22{}, d32{};
    std::optional<cplx> ddot11, ddot22;
    Mat3 fundamental_end;  // columns: states of C_1, C_2, C_3 at x = 1

    cplx c1_end() const { return fundamental_end(0, 0); }
};

CharacteristicValues characteristic(const CoefficientPair& coeffs, cplx lambda, bool with_dlambda,
                                    Variant variant = Variant::Direct);

struct NewtonOptions {
    double tol = 1e-12;
    int max_iter = 50;
    bool check_basin = true;
};

cplx find_eigenvalue(const CoefficientPair& coeffs, int n, int k, cplx guess, const NewtonOptions& opts = {},
                     Variant variant = Variant::Direct);

// beta_{n,k} = Delta_{k+1,k} / dDelta_{k,k}/dlambda at an eigenvalue of problem k.
cplx weight_beta(const CoefficientPair& coeffs, int k, cplx lambda, Variant variant = Variant::Direct);

// gamma_n at a common eigenvalue of both problems; the branch is chosen by whether beta_{n,1} vanishes.
cplx weight_gamma(const CoefficientPair& coeffs, cplx lambda, bool beta1_vanishes);

// Greedy nearest-match pairing of the two spectra; reorders the k = 2 entries so that paired
// eigenvalues share their index and returns the indices n with lambda_{n,1} = lambda_{n,2}.
std::set<int> pair_spectra(SpectralData& data, double tol = 1e-8);

struct ForwardOptions {
    NewtonOptions newton{};
    double pair_tol = 1e-8;
    int threads = 1;
    Variant variant = Variant::Direct;
};

SpectralData forward_spectrum(const CoefficientPair& coeffs, int n_max, const ForwardOptions& opts = {});

// Nontrivial entries of the unit lower-triangular Weyl-Yurko matrix M_{jk} = -Delta_{jk}/Delta_{kk}.
struct WeylMatrix {
    cplx m21{}, m31{}, m32{};

    Mat3 full() const;
};

WeylMatrix weyl_matrix(const CoefficientPair& coeffs, cplx lambda, Variant variant = Variant::Direct,
                       double pole_tol = 1e-10);

// Weyl solution Phi_k (k = 1, 2, 3): Phi_k^{[j-1]}(0) = delta_{kj} for j <= k and
// Phi_k^{[3-j]}(1) = 0 for j > k. Phi_3 = C_3 is integrated forward; Phi_1 and Phi_2 are
// integrated backward from x = 1 with orthonormalized bases, which keeps them accurate
// where the forward representation through C_j would cancel catastrophically.
Trajectory weyl_solution(const StepMaps& maps, int k);
Trajectory weyl_solution(const CoefficientPair& coeffs, cplx lambda, int k, Variant variant = Variant::Direct);

struct WeylTable {
    Variant variant;
    cplx lambda;
    std::array<Trajectory, 3> phi;
};

WeylTable weyl_solutions(const CoefficientPair& coeffs, cplx lambda, Variant variant = Variant::Direct);

// Closed-form weight matrix N(lambda_{n,k}) built from the spectral data.
Mat3 weight_matrix_N(const SpectralData& data, int n, int k);

// Laurent coefficients M<-1> and M<0> of the Weyl-Yurko matrix about lambda0, from the trapezoid
// rule on a circle; the radius defaults to 1e-3 (1 + |lambda0|).
struct LaurentPair {
    Mat3 principal;  // M<-1>
    Mat3 regular;    // M<0>
};

LaurentPair weyl_laurent(const CoefficientPair& coeffs, cplx lambda0, Variant variant = Variant::Direct,
                         int points = 64, std::optional<double> radius = std::nullopt);

// (M<0>)^{-1} M<-1> from the contour Laurent coefficients.
Mat3 weight_matrix_contour(const CoefficientPair& coeffs, cplx lambda0, int points = 64);

// Residue of a scalar function of lambda by the trapezoid rule on a circle.
cplx contour_residue(const std::function<cplx(cplx)>& f, cplx center, double radius, int points = 64);

}  // namespace spectral3
