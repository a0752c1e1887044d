#include <doctest.h>

#include "ncsyz/symcalc.hpp"
#include "oracles.hpp"

using namespace ncsyz;

namespace {

Symbol plane_wave(int n, const RVec& k) {
    CVec l = CVec::Zero(2 * n);
    l.tail(n) = (2.0 * PI * I_UNIT) * k.cast<cplx>();
    return Symbol::exp_quadratic(n, CMat::Zero(2 * n, 2 * n), l, 0.0);
}

}  // namespace

TEST_CASE("poly arithmetic and substitution") {
    Poly x = Poly::variable(2, 0);
    Poly y = Poly::variable(2, 1);
    Poly p = x * x + y * cplx(3.0);
    CHECK(p.degree() == 2);
    CHECK(p.derivative(0).degree() == 1);
    CVec w(2);
    w << 2.0, 5.0;
    CHECK(std::abs(p.eval(w) - cplx(19.0)) < 1e-14);

    CMat P(2, 2);
    P << 0, 1, 1, 0;
    CVec c(2);
    c << 1.0, 0.0;
    Poly q = p.substitute(P, c);  // (y + 1)^2 + 3 x
    CHECK(std::abs(q.eval(w) - cplx(36.0 + 6.0)) < 1e-13);
}

TEST_CASE("symbol substitution agrees with pointwise evaluation") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Symbol f = oracle::random_exp_linear(rng, 2, 2);
        CMat P = random_matrix(rng, 4, 4, 1.0).cast<cplx>();
        CVec c = random_vector(rng, 4, -1, 1).cast<cplx>();
        Symbol g = f.substitute(P, c);
        for (const auto& w : oracle::sample_points(rng, 4, 5)) {
            CVec cw = w.cast<cplx>();
            cplx a = g.eval(cw);
            cplx b = f.eval(CVec(P * cw + c));
            CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));
        }
    }
}

TEST_CASE("derivative matches a central difference") {
    std::mt19937_64 rng(11);
    Symbol f = oracle::random_exp_linear(rng, 2, 2);
    RVec w = random_vector(rng, 4, -0.5, 0.5);
    for (int k = 0; k < 4; ++k) {
        RVec e = RVec::Zero(4);
        e(k) = 1e-5;
        cplx fd = (f.eval(RVec(w + e)) - f.eval(RVec(w - e))) / 2e-5;
        CHECK(std::abs(fd - f.derivative(k).eval(w)) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
}

TEST_CASE("plane waves multiply with the Moyal phase") {
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 3; ++n) {
        RMat theta = random_antisymmetric(rng, n, 1.0);
        RVec a = random_vector(rng, n, -2, 2), b = random_vector(rng, n, -2, 2);
        Symbol lhs = moyal_star(plane_wave(n, a), plane_wave(n, b), theta);
        Symbol rhs = plane_wave(n, a + b).scaled(std::exp(PI * I_UNIT * a.dot(theta * b)));
        CHECK(residual(SymbolSum(lhs), SymbolSum(rhs)).abs < 1e-12);
    }
}

TEST_CASE("zero theta gives the pointwise product") {
    std::mt19937_64 rng(5);
    Symbol f = oracle::random_exp_linear(rng, 2, 1);
    Symbol g = oracle::random_exp_linear(rng, 2, 1);
    Residual r = residual(SymbolSum(moyal_star(f, g, RMat::Zero(2, 2))), SymbolSum(f * g));
    CHECK(r.abs == 0.0);
}

TEST_CASE("polynomial Moyal product matches the tensor series") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 1 + trial % 3;
        RMat theta = random_antisymmetric(rng, n, 2.0);
        Poly p = oracle::random_poly(rng, 2 * n, 2, 4);
        Poly q = oracle::random_poly(rng, 2 * n, 2, 4);
        Symbol lhs = moyal_star(Symbol::polynomial(n, p), Symbol::polynomial(n, q), theta);
        Symbol rhs = Symbol::polynomial(n, oracle::moyal_series(p, q, theta));
        CHECK(residual(SymbolSum(lhs), SymbolSum(rhs)).scaled() < 1e-13);
    }
}

TEST_CASE("Moyal product of a Gaussian in y with a plane wave") {
    const int n = 2;
    RMat theta(2, 2);
    theta << 0, 0.7, -0.7, 0;
    CMat Syy(2, 2);
    Syy << 1.0, 0.3, 0.3, 2.0;
    Symbol phi = Symbol::exp_blocks(n, CMat::Zero(2, 2), CMat::Zero(2, 2), I_UNIT * Syy, CVec::Zero(2), CVec::Zero(2), 0.0);
    RVec k(2);
    k << 1.0, -2.0;
    Symbol pw = plane_wave(n, k);
    // pw * phi = pw . phi(y + (i/4pi) theta (2 pi i k)) = pw . phi(y - theta k / 2)
    Symbol lhs = moyal_star(pw, phi, theta);
    RVec shift = RVec::Zero(4);
    shift.tail(2) = -0.5 * theta * k;
    Symbol rhs = pw * phi.shift(shift);
    CHECK(residual(SymbolSum(lhs), SymbolSum(rhs)).scaled() < 1e-13);

    Symbol lhs2 = moyal_star(phi, pw, theta);
    shift.tail(2) = 0.5 * theta * k;
    Symbol rhs2 = phi.shift(shift) * pw;
    CHECK(residual(SymbolSum(lhs2), SymbolSum(rhs2)).scaled() < 1e-13);
}

TEST_CASE("linear poly times Gaussian terminates after one order") {
    const int n = 1;
    RMat theta(1, 1);
    theta << 0.0;
    RMat theta2(2, 2);
    theta2 << 0, 1.3, -1.3, 0;
    Poly y0 = Poly::variable(4, 2);
    CMat Syy = CMat::Identity(2, 2) * I_UNIT;
    Symbol phi = Symbol::exp_blocks(2, CMat::Zero(2, 2), CMat::Zero(2, 2), Syy, CVec::Zero(2), CVec::Zero(2), 0.0);
    Symbol lhs = moyal_star(Symbol::polynomial(2, y0), phi, theta2);
    // y0 phi + c theta_01 d_{y1} phi with c = -i/(4 pi)
    cplx c = -I_UNIT / (4.0 * PI);
    SymbolSum rhs = SymbolSum(Symbol::polynomial(2, y0) * phi) + SymbolSum(phi.derivative(3)) * (c * 1.3);
    CHECK(residual(SymbolSum(lhs), rhs).scaled() < 1e-14);
    (void)n;
    (void)theta;
}

TEST_CASE("two y-quadratic factors are rejected") {
    RMat theta(1, 1);
    theta << 0.0;
    RMat th2(2, 2);
    th2 << 0, 1, -1, 0;
    CMat Syy = CMat::Identity(2, 2) * I_UNIT;
    Symbol phi = Symbol::exp_blocks(2, CMat::Zero(2, 2), CMat::Zero(2, 2), Syy, CVec::Zero(2), CVec::Zero(2), 0.0);
    CHECK_THROWS_AS(moyal_star(phi, phi, th2), Error);
    try {
        moyal_star(phi, phi, th2);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MoyalNotClosed);
    }
    (void)theta;
}

TEST_CASE("degree cap is enforced") {
    Poly x = Poly::variable(2, 0);
    Symbol f = Symbol::polynomial(1, x * x * x);
    CHECK_THROWS_AS(f * f, Error);
}

TEST_CASE("star inverse of an exponential") {
    std::mt19937_64 rng(23);
    RMat theta = random_antisymmetric(rng, 2, 1.0);
    Symbol f = oracle::random_exp_linear(rng, 2, 0);
    Symbol inv = star_inverse(f, theta);
    Symbol one = moyal_star(f, inv, theta);
    CHECK(residual(SymbolSum(one), SymbolSum::constant(2, 1.0)).abs < 1e-12);
}

TEST_CASE("exterior derivative squares to zero") {
    std::mt19937_64 rng(29);
    Symbol f = oracle::random_exp_linear(rng, 2, 1);
    SymbolForm ddf = exterior_d(exterior_d(SymbolSum(f)));
    CHECK(ddf.max_coeff() < 1e-12);
}

TEST_CASE("Dolbeault projection at T = iI") {
    const int n = 1;
    CMat T = CMat::Identity(1, 1) * I_UNIT;
    CMat L = CMat::Zero(2, 2);
    CVec c(2);
    c << 2.0, 3.0;
    SymbolForm w = SymbolForm::linear_one_form(n, L, c);
    SymbolForm p = dolbeault_project(w, T, 1);
    cplx v = 0.5 * (2.0 + I_UNIT * 3.0);
    CHECK(std::abs(p.coeff(0).constant_value() - v) < 1e-14);
    CHECK(std::abs(p.coeff(1).constant_value() + I_UNIT * v) < 1e-14);
    SymbolForm h = holomorphic_project(w, T);
    CHECK(residual(h + p, w).abs < 1e-14);
}

TEST_CASE("Dolbeault projection is idempotent and splits forms") {
    std::mt19937_64 rng(31);
    for (int n = 1; n <= 3; ++n) {
        CMat T = random_period_matrix(rng, n);
        CMat N = random_matrix(rng, 2 * n, 2 * n, 1.0).cast<cplx>();
        SymbolForm w = SymbolForm::constant_two_form(n, N);
        SymbolForm p = dolbeault_project(w, T, 2);
        CHECK(residual(dolbeault_project(p, T, 2), p).abs < 1e-12);
        CMat L = random_matrix(rng, 2 * n, 2 * n, 1.0).cast<cplx>();
        CVec c = random_vector(rng, 2 * n, -1, 1).cast<cplx>();
        SymbolForm u = SymbolForm::linear_one_form(n, L, c);
        SymbolForm pu = dolbeault_project(u, T, 1);
        CHECK(residual(pu + holomorphic_project(u, T), u).scaled() < 1e-12);
        CHECK(residual(dolbeault_project(pu, T, 1), pu).scaled() < 1e-12);
    }
}

TEST_CASE("singular Im T is rejected by the projection") {
    CMat T = CMat::Identity(1, 1);
    SymbolForm w = SymbolForm::linear_one_form(1, CMat::Zero(2, 2), CVec::Ones(2));
    CHECK_THROWS_AS(dolbeault_project(w, T, 1), Error);
}
