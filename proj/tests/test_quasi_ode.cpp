#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

#include <spectral3/error.hpp>
#include <spectral3/quasi_ode.hpp>

#include <cmath>
#include <random>

using namespace spectral3;

namespace {
double state_det(const std::array<Trajectory, 3>& C, std::size_t m) {
    Mat3 S;
    for (int j = 0; j < 3; ++j) S.col(j) = C[j].states[m].vec();
    return std::abs(S.determinant() - 1.0);
}
}  // namespace

TEST_CASE("system matrices of the three variants") {
    const auto z = fixtures::zero(16);
    Mat3 shift = Mat3::Zero();
    shift(0, 1) = 1.0;
    shift(1, 2) = 1.0;
    CHECK((system_matrix(z, Variant::Direct, 0.0, 0.3) - shift).norm() == 0.0);
    Mat3 star = shift;
    star(2, 0) = -1.0;
    CHECK((system_matrix(z, Variant::Star, 1.0, 0.3) - star).norm() == 0.0);

    const auto one = fixtures::constant(1.0, 0.0, 16);
    const Mat3 A = system_matrix(one, Variant::Direct, cplx(2.0, 1.0), 0.4);
    CHECK(A(1, 0) == cplx(-1.0));
    CHECK(A(2, 1) == cplx(-1.0));
    CHECK(A(2, 0) == cplx(2.0, 1.0));

    const auto g = fixtures::generic(64);
    for (auto v : {Variant::Direct, Variant::Star, Variant::Dagger})
        CHECK(std::abs(system_matrix(g, v, cplx(3.0, -1.0), 0.37).trace()) == 0.0);
    // The dagger matrix is the conjugate of the star matrix apart from the sign of lambda.
    const Mat3 S = system_matrix(g, Variant::Star, cplx(3.0, -1.0), 0.37);
    const Mat3 D = system_matrix(g, Variant::Dagger, cplx(3.0, 1.0), 0.37);
    Mat3 Sc = S.conjugate();
    Sc(2, 0) = -Sc(2, 0);
    CHECK((Sc - D).norm() < 1e-15);
}

TEST_CASE("polynomial solution for zero coefficients at lambda = 0") {
    const auto z = fixtures::zero(64);
    const auto t = integrate_ivp(z, Variant::Direct, 0.0, {0.0, 0.0, 1.0}, false);
    for (int m = 0; m <= 64; ++m) {
        const double x = m / 64.0;
        CHECK(std::abs(t.states[m].y - x * x / 2) < 1e-14);
        CHECK(std::abs(t.states[m].y1 - x) < 1e-14);
        CHECK(std::abs(t.states[m].y2 - 1.0) < 1e-14);
    }
    const auto C = fundamental_solutions(z, Variant::Direct, 0.0, false);
    CHECK(std::abs(C[0].at_end().y - 1.0) < 1e-14);
    CHECK(std::abs(C[1].at_end().y - 1.0) < 1e-14);
    CHECK(std::abs(C[2].at_end().y - 0.5) < 1e-14);
}

TEST_CASE("C3(1) at lambda = 1 matches the exponential-basis value") {
    const auto t = integrate_ivp(fixtures::zero(512), Variant::Direct, 1.0, {0.0, 0.0, 1.0}, false);
    const oracle::ConstantCoefficient cc(0.0, 1.0);
    cplx expect = 0.0;
    for (cplx r : cc.roots()) expect += std::exp(r) / (3.0 * r * r);
    CHECK(std::abs(t.at_end().y - expect) < 1e-9);
    CHECK(std::abs(expect - 0.508358) < 1e-6);
}

TEST_CASE("initial conditions are preserved at node 0") {
    const auto t = integrate_ivp(fixtures::generic(64), Variant::Direct, cplx(5.0, 2.0), {0.0, 1.0, 0.0}, true);
    CHECK(t.states[0].y == cplx(0.0));
    CHECK(t.states[0].y1 == cplx(1.0));
    CHECK(t.states[0].y2 == cplx(0.0));
    REQUIRE(t.dstates);
    CHECK(std::abs((*t.dstates)[0].y1) == 0.0);
}

TEST_CASE("constant coefficients: all three fundamental solutions match the closed form") {
    const cplx tau = 1.0, lambda(40.0, 15.0);
    const auto C = fundamental_solutions(fixtures::constant(tau, 0.0, 512), Variant::Direct, lambda, false);
    const oracle::ConstantCoefficient cc(tau, lambda);
    const std::array<std::array<cplx, 3>, 3> init{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    for (int k = 0; k < 3; ++k)
        for (int m : {128, 256, 512}) {
            const auto e = cc.state(m / 512.0, init[k]);
            const auto& s = C[k].states[m];
            const double scale = 1.0 + std::abs(e[0]) + std::abs(e[1]) + std::abs(e[2]);
            CHECK(std::abs(s.y - e[0]) / scale < 1e-9);
            CHECK(std::abs(s.y1 - e[1]) / scale < 1e-9);
            CHECK(std::abs(s.y2 - e[2]) / scale < 1e-9);
        }
}

TEST_CASE("Liouville: the fundamental state matrix has unit determinant") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    const auto g = fixtures::generic(512);
    for (auto v : {Variant::Direct, Variant::Star, Variant::Dagger})
        for (int trial = 0; trial < 5; ++trial) {
            const cplx lambda(u(rng), u(rng));
            const auto C = fundamental_solutions(g, v, lambda, false);
            double worst = 0.0;
            for (std::size_t m = 0; m <= 512; ++m) worst = std::max(worst, state_det(C, m));
            CHECK(worst < 5e-10);
        }
}

TEST_CASE("Richardson self-refinement") {
    const cplx lambda(10.0, 1.0);
    const auto coarse = fundamental_solutions(fixtures::smooth(0.0, 512), Variant::Direct, lambda, false);
    const auto fine = fundamental_solutions(fixtures::smooth(0.0, 1024), Variant::Direct, lambda, false);
    for (int k = 0; k < 3; ++k) {
        const auto a = coarse[k].at_end().vec(), b = fine[k].at_end().vec();
        CHECK((a - b).norm() < 1e-9);
    }
}

TEST_CASE("lambda-derivative agrees with central differences") {
    const auto g = fixtures::generic(256);
    for (cplx lambda : {cplx(3.0, 1.0), cplx(-50.0, 20.0), cplx(200.0, 0.0)}) {
        for (auto v : {Variant::Direct, Variant::Star}) {
            const double d = 1e-5 * (1.0 + std::abs(lambda));
            const auto t = integrate_ivp(g, v, lambda, {0.0, 0.0, 1.0}, true);
            const auto p = integrate_ivp(g, v, lambda + d, {0.0, 0.0, 1.0}, false);
            const auto q = integrate_ivp(g, v, lambda - d, {0.0, 0.0, 1.0}, false);
            const Vec3 fd = (p.at_end().vec() - q.at_end().vec()) / (2.0 * d);
            const Vec3 an = t.dstates->back().vec();
            CHECK((fd - an).norm() <= 1e-5 * an.norm());
        }
    }
}

TEST_CASE("sigma0 gauge covariance of the fundamental system") {
    const auto g = fixtures::generic(256);
    const cplx c(2.5, -1.0);
    const CoefficientPair shifted(g.tau1(), g.sigma0() + c);
    const cplx lambda(20.0, 7.0);
    const auto C = fundamental_solutions(g, Variant::Direct, lambda, false);
    const auto D = fundamental_solutions(shifted, Variant::Direct, lambda, false);
    for (std::size_t m = 0; m <= 256; m += 32) {
        CHECK(std::abs(D[0].states[m].y - (C[0].states[m].y - c * C[2].states[m].y)) < 1e-9);
        CHECK(std::abs(D[0].states[m].y1 - (C[0].states[m].y1 - c * C[2].states[m].y1)) < 1e-9);
        CHECK(std::abs(D[1].states[m].y - C[1].states[m].y) < 1e-9);
        CHECK(std::abs(D[2].states[m].y1 - C[2].states[m].y1) < 1e-9);
    }
}

TEST_CASE("fourth-order convergence of C3 for zero coefficients") {
    const oracle::ConstantCoefficient cc(0.0, 1.0);
    auto err = [&](int M) {
        const auto t = integrate_ivp(fixtures::zero(M), Variant::Direct, 1.0, {0.0, 0.0, 1.0}, false);
        double e = 0.0;
        for (int m = 0; m <= M; ++m) e = std::max(e, std::abs(t.states[m].y - cc.state(m / double(M), {0, 0, 1})[0]));
        return e;
    };
    CHECK(err(128) / err(256) >= 12.0);
}

TEST_CASE("dagger variant equals the direct problem of the dagger coefficients") {
    const auto g = fixtures::generic(128);
    std::vector<cplx> t(129), s(129);
    for (int m = 0; m <= 128; ++m) {
        t[m] = std::conj(g.tau1()[m]);
        s[m] = -std::conj(g.sigma0()[m]);
    }
    const CoefficientPair dag(GridFunction(g.grid(), t), GridFunction(g.grid(), s));
    const cplx lambda(-12.0, 4.0);
    const auto a = integrate_ivp(g, Variant::Dagger, lambda, {1.0, 0.0, 0.0}, false);
    const auto b = integrate_ivp(dag, Variant::Direct, lambda, {1.0, 0.0, 0.0}, false);
    CHECK((a.at_end().vec() - b.at_end().vec()).norm() < 1e-12);
}

TEST_CASE("resolution guard and grid limits") {
    const auto z = fixtures::zero(64);
    CHECK_THROWS_AS(integrate_ivp(z, Variant::Direct, 1e6, {0, 0, 1}, false), SpectralError);
    CHECK_NOTHROW(integrate_ivp(z, Variant::Direct, 1e4, {0, 0, 1}, false));
    CHECK_THROWS_AS(integrate_ivp(fixtures::zero(6), Variant::Direct, 1.0, {0, 0, 1}, false), SpectralError);
}
