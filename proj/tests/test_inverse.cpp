#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"

#include <spectral3/error.hpp>
#include <spectral3/inverse.hpp>

#include <cmath>
#include <random>

using namespace spectral3;

namespace {
const CoefficientPair& smooth() {
    static const CoefficientPair c = fixtures::smooth(0.0, 512);
    return c;
}
const SpectralData& smooth_data() {
    static const SpectralData d = forward_spectrum(smooth(), 16);
    return d;
}
const CoefficientPair& zero_model() {
    static const CoefficientPair z = model_coefficients(0.0, Grid(512));
    return z;
}
}  // namespace

TEST_CASE("kernel values at x = 0") {
    const auto& z = zero_model();
    const cplx lambda(40.0, 10.0), mu(-25.0, 5.0);
    for (auto [k, j] : {std::pair{2, 3}, {3, 2}, {3, 3}}) {
        const auto D = kernel_D(z, k, j, lambda, mu);
        CHECK(std::abs(D[0]) < 1e-14);
    }
    const auto D22 = kernel_D(z, 2, 2, lambda, mu);
    CHECK(std::abs(D22[0] - 1.0 / (lambda - mu)) < 1e-14);
}

TEST_CASE("bracket and integral kernels agree") {
    const auto& model = fixtures::generic(512);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-80.0, 80.0);
    for (int i = 0; i < 10; ++i) {
        const cplx lambda(u(rng), u(rng)), mu(u(rng), u(rng));
        for (auto [k, j] : {std::pair{3, 3}, {2, 3}, {3, 2}, {2, 2}}) {
            const auto a = kernel_D(model, k, j, lambda, mu, KernelForm::Bracket);
            const auto b = kernel_D(model, k, j, lambda, mu, KernelForm::Integral);
            CHECK(max_norm(a - b) < 1e-7 * std::max(1.0, max_norm(b)));
        }
    }
}

TEST_CASE("kernel poles and regularization") {
    const auto& z = zero_model();
    const cplx lambda(30.0, 2.0);
    CHECK_THROWS_AS(kernel_D(z, 2, 2, lambda, lambda), SpectralError);
    CHECK_THROWS_AS(kernel_D(z, 3, 3, lambda, lambda, KernelForm::Bracket), SpectralError);
    CHECK_NOTHROW(kernel_D(z, 3, 3, lambda, lambda));
    const auto reg = kernel_D(z, 2, 2, lambda, lambda, KernelForm::Auto, true);
    const auto star = weyl_solution(z, lambda, 2, Variant::Star);
    const auto direct = weyl_solution(z, lambda, 2);
    std::vector<cplx> prod(513);
    for (std::size_t m = 0; m <= 512; ++m) prod[m] = star.states[m].y * direct.states[m].y;
    CHECK(max_norm(reg - cumulative(GridFunction(Grid(512), prod))) < 1e-14);
    // Away from the pole the regularized kernel is the ordinary one.
    const cplx mu = lambda + 5.0;
    CHECK(max_norm(kernel_D(z, 2, 2, lambda, mu, KernelForm::Auto, true) - kernel_D(z, 2, 2, lambda, mu)) == 0.0);
}

TEST_CASE("Lagrange bracket derivative identity") {
    const auto& g = fixtures::generic(1024);
    const cplx lambda(12.0, -3.0), mu(-20.0, 7.0);
    const auto z = weyl_solution(g, lambda, 3, Variant::Star);
    const auto y = weyl_solution(g, mu, 2);
    const auto b = lagrange_bracket(z, y);
    std::vector<cplx> zy(1025);
    for (std::size_t m = 0; m <= 1024; ++m) zy[m] = (mu - lambda) * z.states[m].y * y.states[m].y;
    const GridFunction expect(Grid(1024), zy);
    CHECK(max_norm(differentiate(b) - expect) < 1e-6 * max_norm(expect));
}

TEST_CASE("assembly identities") {
    const ModelCache cache = build_model(smooth_data(), Grid(512), 4);
    const MainAssembly a = assemble(cache);
    CHECK(a.size == 16);
    CHECK(a.regularized_entries == 0);
    for (std::size_t m = 0; m <= 512; m += 16)
        CHECK(a.G[m].allFinite());
    // G' = eta~ phi~ against a five-point difference of G.
    const double h = 1.0 / 512;
    for (std::size_t m : {100u, 256u, 400u})
        for (std::size_t v = 0; v < 16; ++v)
            for (std::size_t v0 = 0; v0 < 16; ++v0) {
                const cplx fd = (a.G[m - 2](v, v0) - 8.0 * a.G[m - 1](v, v0) + 8.0 * a.G[m + 1](v, v0) -
                                 a.G[m + 2](v, v0)) / (12 * h);
                CHECK(std::abs(fd - a.Gprime[m](v, v0)) <= 1e-4 * (1.0 + std::abs(a.Gprime[m](v, v0))));
            }

    const auto model = forward_spectrum(zero_model(), 4);
    const MainAssembly b = assemble(build_model(model, Grid(512), 4));
    for (std::size_t m = 0; m <= 512; m += 32)
        for (std::size_t v = 0; v < 16; v += 2) CHECK(b.G[m].row(v) == b.G[m].row(v + 1));
}

TEST_CASE("model data are a fixed point") {
    const Grid grid(512);
    const auto model = forward_spectrum(zero_model(), 12);
    const auto cache = build_model(model, grid, 12);
    const auto r = inverse(cache);
    CHECK(l2_norm(r.tau1() - zero_model().tau1()) < 1e-10);
    CHECK(w2m1_distance(r.sigma0(), zero_model().sigma0()) < 1e-10);
    for (std::size_t s = 0; s < cache.size(); ++s) {
        const IndexV v = IndexV::from_slot(s);
        std::vector<cplx> y(513), dy(513);
        for (std::size_t m = 0; m <= 512; ++m) {
            y[m] = cache.phi_tilde(v).states[m].y;
            dy[m] = cache.phi_tilde(v).states[m].y1;
        }
        CHECK(max_norm(r.table.phi[s] - GridFunction(grid, y)) <= 1e-12 * std::max(1.0, max_norm(GridFunction(grid, y))));
        CHECK(max_norm(r.table.dphi[s] - GridFunction(grid, dy)) <= 1e-12 * std::max(1.0, max_norm(GridFunction(grid, dy))));
    }
    const auto rep = verify_reconstruction(r, cache, VerifyMode::Spectral);
    CHECK(rep.max_rel_lambda_err < 1e-9);
}

TEST_CASE("round trip at N = 8") {
    const auto cache = build_model(smooth_data(), Grid(512), 8);
    const auto r = inverse(cache);
    CHECK(r.cond_max < 1e6);
    CHECK(r.residual_max < 1e-12);
    CHECK(l2_norm(r.tau1() - smooth().tau1()) < 0.3);

    const auto spectral = verify_reconstruction(r, cache, VerifyMode::Spectral);
    CHECK(spectral.pass);
    CHECK(spectral.max_rel_lambda_err < 1e-3);
    CHECK(spectral.max_rel_beta_err < 5e-3);
    CHECK(spectral.max_rel_lambda_err_tail < 1e-3);

    const auto weyl = verify_reconstruction(r, cache, VerifyMode::Weyl);
    CHECK(weyl.pass);
    CHECK(weyl.max_bc_residual < 1e-6);
    CHECK(weyl.interpolation_residual < 1e-6);
    CHECK(weyl.to_json()["mode"] == "weyl");

    // The solved derivative matches a difference quotient of the solved phi.
    for (std::size_t s = 0; s < 8; ++s) {
        const auto fd = differentiate(r.table.phi[s]);
        CHECK(max_norm(fd - r.table.dphi[s]) < 1e-5 * max_norm(r.table.dphi[s]));
    }
}

TEST_CASE("errors decrease from N = 8 to N = 16") {
    const Grid grid(512);
    const auto r8 = inverse(smooth_data(), grid, 8);
    const auto r16 = inverse(smooth_data(), grid, 16);
    CHECK(l2_norm(r16.tau1() - smooth().tau1()) < l2_norm(r8.tau1() - smooth().tau1()));
    CHECK(w2m1_distance(r16.sigma0(), smooth().sigma0()) < w2m1_distance(r8.sigma0(), smooth().sigma0()));
}

TEST_CASE("results do not depend on the thread count") {
    InverseOptions one, three;
    three.solve.threads = 3;
    const auto a = inverse(smooth_data(), Grid(512), 6, one);
    const auto b = inverse(smooth_data(), Grid(512), 6, three);
    for (std::size_t m = 0; m <= 512; ++m) {
        CHECK(a.tau1()[m] == b.tau1()[m]);
        CHECK(a.sigma0()[m] == b.sigma0()[m]);
    }
}

TEST_CASE("coinciding eigenvalues go through the regularized branch") {
    auto data = smooth_data().truncated(4);
    const cplx shared = data.at(2, 1).lambda + cplx(0.0, 15.0);
    data.at(2, 1).lambda = shared;
    data.at(2, 2).lambda = shared;
    data.at(2, 1).beta = 0.0;
    data.set_gamma(2, 3.0 * shared);
    const auto cache = build_model(data, Grid(512), 4);
    const auto r = inverse(cache);
    CHECK(r.regularized_entries == 1);
    CHECK(r.tau1().values().size() == 513);
    const auto weyl = verify_reconstruction(r, cache, VerifyMode::Weyl);
    CHECK(weyl.detail.contains("skipped"));
    const auto spectral = verify_reconstruction(r, cache, VerifyMode::Spectral);
    CHECK(spectral.max_rel_lambda_err < 1e-3);
}

TEST_CASE("singular systems are reported with the node") {
    MainAssembly a;
    a.size = 4;
    a.signs = Eigen::VectorXd::Ones(4);
    const Grid grid(8);
    for (std::size_t m = 0; m <= 8; ++m) {
        a.G.push_back(Eigen::MatrixXcd::Identity(4, 4));
        a.Gprime.push_back(Eigen::MatrixXcd::Zero(4, 4));
        a.rhs.push_back(Eigen::VectorXcd::Ones(4));
        a.drhs.push_back(Eigen::VectorXcd::Zero(4));
    }
    try {
        solve_phi(a, grid);
        FAIL("expected SingularSystem");
    } catch (const SpectralError& e) {
        CHECK(e.kind() == ErrorKind::SingularSystem);
        CHECK(std::string(e.what()).find("node 0") != std::string::npos);
    }
}

TEST_CASE("invalid data are rejected before solving") {
    auto dup = smooth_data().truncated(6);
    dup.at(4, 1).lambda = dup.at(2, 1).lambda;
    try {
        inverse(dup, Grid(512), 6);
        FAIL("expected AdmissibilityViolation");
    } catch (const SpectralError& e) {
        CHECK(e.kind() == ErrorKind::AdmissibilityViolation);
        CHECK(std::string(e.what()).find("distinct_eigenvalues") != std::string::npos);
    }
    CHECK_THROWS_AS(inverse(smooth_data(), Grid(512), 17), SpectralError);
}

TEST_CASE("stability ladder") {
    const auto rows = stability_experiment(smooth_data(), Grid(512), 6, {parse_perturbation("beta:1,1")},
                                           {0.0, 1e-3, 5e-4});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].d == 0.0);
    CHECK(rows[0].tau1_l2 == 0.0);
    CHECK(rows[0].sigma0_w2m1 == 0.0);
    CHECK_FALSE(rows[0].ratio_tau1.has_value());
    CHECK(rows[1].d == doctest::Approx(1e-3));
    REQUIRE(rows[1].ratio_tau1.has_value());
    CHECK(std::abs(*rows[1].ratio_tau1 / *rows[2].ratio_tau1 - 1.0) < 0.1);
    CHECK_FALSE(rows[1].singular);

    const auto p = parse_perturbation("lambda:3,2");
    CHECK(p.field == Perturbation::Field::Lambda);
    CHECK(p.n == 3);
    CHECK(p.k == 2);
    CHECK_THROWS_AS(parse_perturbation("gamma:1,1"), SpectralError);
    CHECK_THROWS_AS(parse_perturbation("beta:1"), SpectralError);
    CHECK_THROWS_AS(parse_perturbation("beta:1,3"), SpectralError);
}

TEST_CASE("scaling weights") {
    CHECK(scaling_weight({1, 1, 0}, 0.0) == 1.0);
    CHECK(scaling_weight({2, 2, 1}, 0.0) == doctest::Approx(0.25));
    CHECK(scaling_weight({3, 1, 0}, 1.0) == doctest::Approx(std::exp(-std::numbers::pi * 3 / std::sqrt(3.0)) / 3.0));
}
