#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"

#include <spectral3/error.hpp>
#include <spectral3/model.hpp>

#include <cmath>

using namespace spectral3;

namespace {
const SpectralData& smooth_data() {
    static const SpectralData d = forward_spectrum(fixtures::smooth(0.0, 512), 20);
    return d;
}

double rel_max(const GridFunction& a, const GridFunction& b) { return max_norm(a - b) / std::max(1e-300, max_norm(b)); }
}  // namespace

TEST_CASE("index set order") {
    std::size_t s = 0;
    for (int n = 1; n <= 3; ++n)
        for (int k = 1; k <= 2; ++k)
            for (int eps = 0; eps <= 1; ++eps, ++s) {
                const IndexV v{n, k, eps};
                CHECK(v.slot() == s);
                CHECK(IndexV::from_slot(s) == v);
                CHECK(v.sign() == (eps == 0 ? 1.0 : -1.0));
            }
}

TEST_CASE("xi and d on single perturbations") {
    const auto& a = smooth_data();
    auto r = xi_sequence(a, a, 8);
    for (double x : r.xi) CHECK(x == 0.0);
    CHECK(r.d == 0.0);

    auto b = a;
    b.at(1, 1).lambda += 0.1;
    r = xi_sequence(b, a, 8);
    CHECK(r.xi[0] == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(r.d == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(r.sum_n_xi_sq == doctest::Approx(0.01).epsilon(1e-9));

    auto c = a;
    c.at(2, 1).beta += 0.4;
    r = xi_sequence(c, a, 8);
    CHECK(r.xi[1] == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(distance_d(c, a, 8) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK_THROWS_AS(xi_sequence(a.truncated(4), a, 8), SpectralError);
}

TEST_CASE("model for the smooth pair is the zero problem") {
    const auto& data = smooth_data();
    CHECK(std::abs(data.theta()) < 1e-12);
    const ModelCache cache = build_model(data, Grid(512), 8);
    CHECK(max_norm(cache.coeffs().tau1()) < 1e-12);
    CHECK(max_norm(cache.coeffs().sigma0()) == 0.0);
    const auto zero = forward_spectrum(fixtures::zero(512), 8);
    for (int n = 1; n <= 8; ++n)
        for (int k = 1; k <= 2; ++k) CHECK(std::abs(cache.model_data().at(n, k).lambda - zero.at(n, k).lambda) < 1e-9 * std::abs(zero.at(n, k).lambda));
    CHECK(cache.size() == 32);
    CHECK(cache.data().n_max() == 8);
}

TEST_CASE("cached Weyl solutions satisfy their boundary conditions") {
    const ModelCache cache = build_model(smooth_data(), Grid(512), 8);
    for (std::size_t s = 0; s < cache.size(); ++s) {
        const IndexV v = IndexV::from_slot(s);
        const auto& sol = cache.solutions(v);
        if (sol.phi2) CHECK(std::abs(sol.phi2->states.back().y) < 1e-9);
        if (sol.star2) CHECK(std::abs(sol.star2->states.back().y) < 1e-9);
        CHECK(sol.phi3.states.front().y == 0.0);
        CHECK(sol.phi3.states.front().y2 == 1.0);
        CHECK(cache.lambda(v) == (v.eps == 0 ? cache.data().at(v.n, v.k).lambda : cache.model_data().at(v.n, v.k).lambda));
        CHECK(cache.phi_tilde(v).lambda == cache.lambda(v));
    }
}

TEST_CASE("eta: initial values and derivative consistency") {
    const ModelCache cache = build_model(smooth_data(), Grid(512), 4);
    for (std::size_t s = 0; s < cache.size(); ++s) {
        const IndexV v = IndexV::from_slot(s);
        if (v.k == 1) CHECK(cache.eta(v)[0] == 0.0);
        // A fourth-order difference reproduces the tabulated derivative for low indices.
        CHECK(rel_max(differentiate(cache.eta(v)), cache.eta_prime(v)) < 1e-6);
        const auto [a2, a3] = cache.eta_coefficients(v);
        if (v.k == 1) {
            CHECK(a2 == 0.0);
            CHECK(a3 == -cache.beta(v));
        } else {
            CHECK(a2 == cache.beta(v));
            CHECK(a3 == 0.0);
        }
    }
}

TEST_CASE("n xi_n decays like 1/n and the tail-corrected sum of (n xi_n)^2 stabilizes") {
    const auto& data = smooth_data();
    const auto model = forward_spectrum(fixtures::zero(512), 20);
    const auto r = xi_sequence(data, model, 20);
    const double c16 = 16.0 * 16.0 * r.xi[15], c20 = 20.0 * 20.0 * r.xi[19];
    CHECK(std::abs(c20 - c16) / c20 < 0.02);
    // With n xi_n ~ C/n the remaining tail is about C^2 / (N + 1/2).
    const double s16 = xi_sequence(data, model, 16).sum_n_xi_sq + c16 * c16 / 16.5;
    const double s20 = r.sum_n_xi_sq + c20 * c20 / 20.5;
    CHECK(std::abs(s20 - s16) / s20 < 1e-3);
}

TEST_CASE("model collisions are reported, not shifted") {
    const Grid grid(512);
    const auto zero = forward_spectrum(fixtures::zero(512), 6);

    auto clash = smooth_data().truncated(6);
    clash.at(1, 1).lambda = zero.at(1, 1).lambda;
    try {
        build_model(clash, grid, 6);
        FAIL("expected AdmissibilityViolation");
    } catch (const SpectralError& e) {
        CHECK(e.kind() == ErrorKind::AdmissibilityViolation);
        CHECK(std::string(e.what()).find("condition 4") != std::string::npos);
        CHECK(std::string(e.what()).find("gap") != std::string::npos);
    }

    auto cross = smooth_data().truncated(6);
    cross.at(2, 2).lambda = zero.at(2, 1).lambda;
    CHECK_THROWS_AS(build_model(cross, grid, 6), SpectralError);

    // Identical entries cancel and are accepted.
    CHECK_NOTHROW(build_model(zero, grid, 6));

    // The jitter moves the model spectrum away while keeping its mean.
    ModelOptions jitter;
    jitter.jitter = 0.5;
    const ModelCache moved = build_model(clash, grid, 6, jitter);
    CHECK(std::abs(integrate(moved.coeffs().tau1()) - clash.theta()) < 1e-12);
    CHECK(std::abs(moved.model_data().at(1, 1).lambda - zero.at(1, 1).lambda) > 1e-3);

    CHECK_THROWS_AS(build_model(clash, grid, 7), SpectralError);
}

TEST_CASE("coinciding eigenvalues use the combined eta") {
    const Grid grid(512);
    auto data = forward_spectrum(fixtures::generic(512), 4);
    const cplx shared = data.at(2, 1).lambda + cplx(0.0, 25.0);
    data.at(2, 1).lambda = shared;
    data.at(2, 2).lambda = shared;
    data.at(2, 2).beta = 0.0;
    data.set_gamma(2, cplx(40.0, 3.0));
    const ModelCache cache = build_model(data, grid, 4);
    const IndexV v{2, 2, 0};
    CHECK(cache.k_branch(v));
    CHECK_FALSE(cache.k_branch({2, 1, 0}));
    CHECK_FALSE(cache.k_branch({2, 2, 1}));
    const auto [a2, a3] = cache.eta_coefficients(v);
    CHECK(a2 == 0.0);
    CHECK(a3 == -cplx(40.0, 3.0));
    const auto& sol = cache.solutions(v);
    for (std::size_t m = 0; m <= 512; m += 64)
        CHECK(std::abs(cache.eta(v)[m] - (a2 * sol.star2->states[m].y + a3 * sol.star3.states[m].y)) < 1e-12 * (1 + std::abs(cache.eta(v)[m])));

    data.set_gamma(2, 0.0);
    try {
        build_model(data, grid, 4);
        FAIL("expected GammaZero");
    } catch (const SpectralError& e) {
        CHECK(e.kind() == ErrorKind::GammaZero);
    }
}
