#include "spectral3/forward.hpp"

#include "spectral3/asymptotics.hpp"
#include "spectral3/error.hpp"
#include "spectral3/parallel.hpp"

#include <cmath>
#include <numbers>

namespace spectral3 {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::string show(cplx z) { return "(" + std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")"; }

// Inverse of a step map through its cofactor matrix.
Mat3 step_inverse(const Mat3& T) {
    const Mat3 C = cofactor(T);
    const cplx det = T(0, 0) * C(0, 0) + T(0, 1) * C(0, 1) + T(0, 2) * C(0, 2);
    return C.transpose() / det;
}

cplx theta_of(const CoefficientPair& coeffs) {
    const GridFunction c = cumulative(coeffs.tau1());
    return c[c.values().size() - 1];
}

// Theta and problem index governing the asymptotics of the zeros of Delta_{k,k} for a variant.
std::pair<cplx, int> asymptotic_frame(const CoefficientPair& coeffs, int k, Variant variant) {
    const cplx theta = theta_of(coeffs);
    switch (variant) {
        case Variant::Direct: return {theta, k};
        case Variant::Star: return {theta, 3 - k};
        case Variant::Dagger: return {std::conj(theta), k};
    }
    return {theta, k};
}

}  // namespace

CharacteristicValues characteristic(const CoefficientPair& coeffs, cplx lambda, bool with_dlambda, Variant variant) {
    const StepMaps maps = step_maps(coeffs, variant, lambda, with_dlambda);
    Mat3 Y = Mat3::Identity();
    Mat3 dY = Mat3::Zero();
    // Columns: C2 x C3, C1 x C3, C1 x C2 (cross products of the state vectors).
    Mat3 X = Mat3::Identity();
    X(1, 1) = -1.0;
    Mat3 dX = Mat3::Zero();
    for (std::size_t m = 0; m < maps.T.size(); ++m) {
        const Mat3& T = maps.T[m];
        const Mat3 C = cofactor(T);
        if (with_dlambda) {
            dY = maps.dT[m] * Y + T * dY;
            dX = cofactor_derivative(T, maps.dT[m]) * X + C * dX;
        }
        Y = T * Y;
        X = C * X;
    }
    CharacteristicValues cv;
    cv.d11 = -X(2, 0);
    cv.d21 = -X(2, 1);
    cv.d31 = X(2, 2);
    cv.d22 = Y(0, 2);
    cv.d32 = Y(0, 1);
    cv.fundamental_end = Y;
    if (with_dlambda) {
        cv.ddot11 = -dX(2, 0);
        cv.ddot22 = dY(0, 2);
    }
    for (cplx z : {cv.d11, cv.d21, cv.d31, cv.d22, cv.d32, cv.ddot11.value_or(0.0), cv.ddot22.value_or(0.0)})
        if (!finite(z)) fail(ErrorKind::NonFinite, "characteristic function overflow at lambda = " + show(lambda));
    return cv;
}

cplx find_eigenvalue(const CoefficientPair& coeffs, int n, int k, cplx guess, const NewtonOptions& opts,
                     Variant variant) {
    if (k != 1 && k != 2) fail(ErrorKind::InvalidArgument, "problem index k must be 1 or 2");
    const auto [theta, k_asym] = asymptotic_frame(coeffs, k, variant);
    // Steps are capped at a fraction of the local eigenvalue spacing to stay in the basin of index n.
    const double rho = std::cbrt(std::abs(guess));
    const double spacing = 3.0 * rho * rho * 2.0 * std::numbers::pi / std::sqrt(3.0);
    cplx lambda = guess;
    for (int it = 0; it <= opts.max_iter; ++it) {
        const CharacteristicValues cv = characteristic(coeffs, lambda, true, variant);
        const cplx f = k == 1 ? cv.d11 : cv.d22;
        const cplx fp = k == 1 ? *cv.ddot11 : *cv.ddot22;
        if (std::abs(fp) < 1e-14)
            fail(ErrorKind::DerivativeVanishes, "derivative of Delta_{" + std::to_string(k) + std::to_string(k) +
                                                    "} vanishes near " + show(lambda) + " (multiple root)");
        const bool small_residual = std::abs(f) <= opts.tol * (1.0 + std::abs(fp) * std::pow(std::abs(lambda), 2.0 / 3.0));
        cplx step = f / fp;
        const bool small_step = std::abs(step) <= 1e-14 * (1.0 + std::abs(lambda));
        if (small_residual || small_step) {
            if (opts.check_basin) {
                const long idx = std::lround(asymptotic_index(lambda, k_asym, theta));
                if (idx != n)
                    fail(ErrorKind::BasinEscape, "search for (" + std::to_string(n) + "," + std::to_string(k) +
                                                     ") converged to " + show(lambda) + " which has index " +
                                                     std::to_string(idx));
            }
            return lambda;
        }
        if (it == opts.max_iter) break;
        if (std::abs(step) > 0.3 * spacing) step *= 0.3 * spacing / std::abs(step);
        lambda -= step;
    }
    fail(ErrorKind::NoConvergence, "Newton iteration for (" + std::to_string(n) + "," + std::to_string(k) +
                                       ") did not converge from guess " + show(guess));
}

cplx weight_beta(const CoefficientPair& coeffs, int k, cplx lambda, Variant variant) {
    const CharacteristicValues cv = characteristic(coeffs, lambda, true, variant);
    return k == 1 ? cv.d21 / *cv.ddot11 : cv.d32 / *cv.ddot22;
}

cplx weight_gamma(const CoefficientPair& coeffs, cplx lambda, bool beta1_vanishes) {
    const CharacteristicValues cv = characteristic(coeffs, lambda, true);
    return beta1_vanishes ? cv.d31 / *cv.ddot11 : cv.c1_end() / *cv.ddot22;
}

std::set<int> pair_spectra(SpectralData& data, double tol) {
    const int N = data.n_max();
    std::vector<bool> used(N + 1, false);
    std::set<int> K;
    for (int n = 1; n <= N; ++n) {
        const cplx a = data.at(n, 1).lambda;
        int best = 0;
        double best_gap = 0.0;
        for (int p = 1; p <= N; ++p) {
            if (used[p]) continue;
            const double gap = std::abs(a - data.at(p, 2).lambda);
            if (gap <= tol * (1.0 + std::abs(a)) && (best == 0 || gap < best_gap)) {
                best = p;
                best_gap = gap;
            }
        }
        if (best == 0) continue;
        if (best != n) {
            std::swap(data.at(n, 2).lambda, data.at(best, 2).lambda);
            std::swap(data.at(n, 2).beta, data.at(best, 2).beta);
        }
        used[n] = true;
        K.insert(n);
    }
    return K;
}

SpectralData forward_spectrum(const CoefficientPair& coeffs, int n_max, const ForwardOptions& opts) {
    if (opts.variant == Variant::Star)
        fail(ErrorKind::InvalidArgument, "spectral data are defined for the direct and dagger problems");
    const cplx theta = asymptotic_frame(coeffs, 1, opts.variant).first;
    SpectralData data(theta, n_max);
    parallel_for(2 * static_cast<std::size_t>(n_max), opts.threads, [&](std::size_t slot) {
        const int n = static_cast<int>(slot / 2) + 1, k = static_cast<int>(slot % 2) + 1;
        const cplx lambda = find_eigenvalue(coeffs, n, k, eigen_guess(n, k, theta), opts.newton, opts.variant);
        data.at(n, k).lambda = lambda;
        data.at(n, k).beta = weight_beta(coeffs, k, lambda, opts.variant);
    });

    for (int n : pair_spectra(data, opts.pair_tol)) {
        auto& e1 = data.at(n, 1);
        auto& e2 = data.at(n, 2);
        e2.lambda = e1.lambda;
        const double scale = 1e-8 * std::abs(3.0 * e1.lambda);
        const bool v1 = std::abs(e1.beta) <= scale, v2 = std::abs(e2.beta) <= scale;
        const bool beta1_vanishes = v1 && v2 ? true : std::abs(e1.beta) <= std::abs(e2.beta);
        if (opts.variant != Variant::Direct)
            fail(ErrorKind::InvalidArgument, "coinciding eigenvalues are supported for the direct problem only");
        const cplx g = weight_gamma(coeffs, e1.lambda, beta1_vanishes);
        if (v1 && v2) {
            const cplx g2 = weight_gamma(coeffs, e1.lambda, false);
            if (std::abs(g - g2) > 1e-6 * std::max(std::abs(g), std::abs(g2)))
                fail(ErrorKind::GammaZero, "the two gamma formulas disagree for n = " + std::to_string(n));
        }
        (beta1_vanishes ? e1 : e2).beta = 0.0;
        if (v1 && v2) (beta1_vanishes ? e2 : e1).beta = 0.0;
        if (!finite(g) || std::abs(g) == 0.0) fail(ErrorKind::GammaZero, "gamma vanishes for n = " + std::to_string(n));
        data.set_gamma(n, g);
    }
    return data;
}

Mat3 WeylMatrix::full() const {
    Mat3 M = Mat3::Identity();
    M(1, 0) = m21;
    M(2, 0) = m31;
    M(2, 1) = m32;
    return M;
}

WeylMatrix weyl_matrix(const CoefficientPair& coeffs, cplx lambda, Variant variant, double pole_tol) {
    const bool check = pole_tol > 0.0;
    const CharacteristicValues cv = characteristic(coeffs, lambda, check, variant);
    if (check) {
        const double reach = pole_tol * (1.0 + std::abs(lambda));
        if (std::abs(cv.d11) <= reach * std::abs(*cv.ddot11))
            fail(ErrorKind::NearPole, "Delta_11 = " + show(cv.d11) + " at lambda = " + show(lambda));
        if (std::abs(cv.d22) <= reach * std::abs(*cv.ddot22))
            fail(ErrorKind::NearPole, "Delta_22 = " + show(cv.d22) + " at lambda = " + show(lambda));
    }
    return {-cv.d21 / cv.d11, -cv.d31 / cv.d11, -cv.d32 / cv.d22};
}

Trajectory weyl_solution(const StepMaps& maps, int k) {
    const int M = maps.grid.intervals();
    if (k == 3) {
        Trajectory t = propagate(maps, {0.0, 0.0, 1.0});
        t.dstates.reset();
        return t;
    }
    if (k != 1 && k != 2) fail(ErrorKind::InvalidArgument, "Weyl solution index must be 1, 2 or 3");

    Trajectory out{maps.grid, maps.variant, maps.lambda, std::vector<StateVector>(M + 1), std::nullopt};
    if (k == 1) {
        std::vector<Vec3> q(M + 1);
        std::vector<double> r(M);
        q[M] = Vec3(0.0, 0.0, 1.0);
        for (int m = M - 1; m >= 0; --m) {
            const Vec3 v = step_inverse(maps.T[m]) * q[m + 1];
            r[m] = v.norm();
            q[m] = v / r[m];
        }
        if (std::abs(q[0](0)) < 1e-13)
            fail(ErrorKind::NearPole, "Phi_1 normalization vanishes at lambda = " + show(maps.lambda));
        cplx scale = 1.0 / q[0](0);
        for (int m = 0; m <= M; ++m) {
            out.states[m] = StateVector::from(q[m] * scale);
            if (m < M) scale /= r[m];
        }
        out.states[0].y = 1.0;
        return out;
    }

    using Mat32 = Eigen::Matrix<cplx, 3, 2>;
    std::vector<Mat32> Q(M + 1);
    std::vector<Eigen::Matrix2cd> R(M);
    Q[M].setZero();
    Q[M](1, 0) = 1.0;
    Q[M](2, 1) = 1.0;
    for (int m = M - 1; m >= 0; --m) {
        Mat32 V = step_inverse(maps.T[m]) * Q[m + 1];
        Eigen::Matrix2cd Rm = Eigen::Matrix2cd::Zero();
        Rm(0, 0) = V.col(0).norm();
        V.col(0) /= Rm(0, 0);
        for (int pass = 0; pass < 2; ++pass) {
            const cplx proj = V.col(0).dot(V.col(1));
            Rm(0, 1) += proj;
            V.col(1) -= proj * V.col(0);
        }
        Rm(1, 1) = V.col(1).norm();
        V.col(1) /= Rm(1, 1);
        Q[m] = V;
        R[m] = Rm;
    }
    const Eigen::Matrix2cd B = Q[0].topRows<2>();
    if (std::abs(B.determinant()) < 1e-13)
        fail(ErrorKind::NearPole, "Phi_2 normalization is singular at lambda = " + show(maps.lambda));
    Eigen::Vector2cd c = B.partialPivLu().solve(Eigen::Vector2cd(0.0, 1.0));
    out.states[0] = StateVector::from(Q[0] * c);
    // The solve leaves roundoff in the prescribed initial values; downstream brackets rely on them exactly.
    out.states[0].y = 0.0;
    out.states[0].y1 = 1.0;
    for (int m = 0; m < M; ++m) {
        const cplx c1 = c(1) / R[m](1, 1);
        const cplx c0 = (c(0) - R[m](0, 1) * c1) / R[m](0, 0);
        c = Eigen::Vector2cd(c0, c1);
        out.states[m + 1] = StateVector::from(Q[m + 1] * c);
    }
    return out;
}

Trajectory weyl_solution(const CoefficientPair& coeffs, cplx lambda, int k, Variant variant) {
    return weyl_solution(step_maps(coeffs, variant, lambda, false), k);
}

WeylTable weyl_solutions(const CoefficientPair& coeffs, cplx lambda, Variant variant) {
    const StepMaps maps = step_maps(coeffs, variant, lambda, false);
    return {variant, lambda, {weyl_solution(maps, 1), weyl_solution(maps, 2), weyl_solution(maps, 3)}};
}

Mat3 weight_matrix_N(const SpectralData& data, int n, int k) {
    const auto& e = data.at(n, k);
    Mat3 N = Mat3::Zero();
    if (data.in_K(n)) {
        N(1, 0) = -data.at(n, 1).beta;
        N(2, 1) = -data.at(n, 2).beta;
        N(2, 0) = -data.gamma().at(n);
    } else if (k == 1) {
        N(1, 0) = -e.beta;
    } else {
        N(2, 1) = -e.beta;
    }
    return N;
}

LaurentPair weyl_laurent(const CoefficientPair& coeffs, cplx lambda0, Variant variant, int points,
                         std::optional<double> radius) {
    const double r = radius.value_or(1e-3 * (1.0 + std::abs(lambda0)));
    LaurentPair out{Mat3::Zero(), Mat3::Zero()};
    for (int j = 0; j < points; ++j) {
        const cplx offset = std::polar(r, 2.0 * std::numbers::pi * j / points);
        const Mat3 M = weyl_matrix(coeffs, lambda0 + offset, variant, 0.0).full();
        out.principal += M * offset;
        out.regular += M;
    }
    out.principal /= static_cast<double>(points);
    out.regular /= static_cast<double>(points);
    return out;
}

Mat3 weight_matrix_contour(const CoefficientPair& coeffs, cplx lambda0, int points) {
    const LaurentPair lp = weyl_laurent(coeffs, lambda0, Variant::Direct, points);
    return lp.regular.inverse() * lp.principal;
}

cplx contour_residue(const std::function<cplx(cplx)>& f, cplx center, double radius, int points) {
    cplx sum = 0.0;
    for (int j = 0; j < points; ++j) {
        const cplx offset = std::polar(radius, 2.0 * std::numbers::pi * j / points);
        sum += f(center + offset) * offset;
    }
    return sum / static_cast<double>(points);
}

}  // namespace spectral3
