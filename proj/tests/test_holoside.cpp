#include <doctest.h>

#include "ncsyz/holoside.hpp"
#include "oracles.hpp"

using namespace ncsyz;

namespace {

RMat antisym2(double t) {
    RMat m(2, 2);
    m << 0, t, -t, 0;
    return m;
}

BundleParams remark_pair(int m) {
    BundleParams b = BundleParams::standard(2);
    b.theta = oracle::remark_theta(m);
    b.Acal = oracle::remark_acal();
    b.A = RMat::Identity(2, 2);
    return b;
}

BundleParams random_params(std::mt19937_64& rng, int n, bool rank_one_acal) {
    BundleParams b = BundleParams::standard(n);
    b.A = random_integer_matrix(rng, n, 2, false);
    b.theta = random_antisymmetric(rng, n, 1.5);
    RVec v = random_vector(rng, n, -1, 1);
    b.Acal = rank_one_acal ? RMat(2.0 * v * v.transpose()) : random_symmetric(rng, n, 1.0);
    b.p = random_vector(rng, n, -1, 1);
    b.q = random_vector(rng, n, -1, 1);
    return b;
}

}  // namespace

TEST_CASE("complex torus validation") {
    CHECK_NOTHROW(make_complex_torus(standard_period(2)));
    CHECK_THROWS_AS(make_complex_torus(CMat::Identity(2, 2)), Error);
    CMat T(2, 2);
    T << I_UNIT, 0.3, 0.3, 2.0 * I_UNIT;
    CHECK(make_complex_torus(T).n == 2);
    try {
        make_complex_torus(CMat::Identity(2, 2));
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotPositiveDefinite);
    }
}

TEST_CASE("factor reductions") {
    std::mt19937_64 rng(1);
    BundleParams b = random_params(rng, 2, false);
    BundleParams b0 = b;
    b0.Acal.setZero();
    auto nt = make_factor(FactorKind::nc_twisted, b0);
    auto nc = make_factor(FactorKind::nc, b0);
    for (int g = 0; g < 4; ++g) CHECK(residual(SymbolSum(nt.gens[g]), SymbolSum(nc.gens[g])).abs == 0.0);
    BundleParams bt = b;
    bt.theta.setZero();
    auto nt0 = make_factor(FactorKind::nc_twisted, bt);
    auto tw = make_factor(FactorKind::twisted, b);
    for (int g = 0; g < 4; ++g) CHECK(residual(SymbolSum(nt0.gens[g]), SymbolSum(tw.gens[g])).abs < 1e-15);
    auto com = make_factor(FactorKind::commutative, b);
    auto nc0 = make_factor(FactorKind::nc, bt);
    for (int g = 0; g < 4; ++g) CHECK(residual(SymbolSum(nc0.gens[g]), SymbolSum(com.gens[g])).abs == 0.0);
}

TEST_CASE("cocycle holds for the commutative and nc kinds") {
    std::mt19937_64 rng(2);
    for (int n = 1; n <= 3; ++n) {
        BundleParams b = random_params(rng, n, false);
        for (auto kind : {FactorKind::commutative, FactorKind::nc, FactorKind::twisted}) {
            auto f = make_factor(kind, b);
            CHECK(check_cocycle(f, f.star_theta).pass);
        }
    }
}

TEST_CASE("cocycle for nc_twisted with rank one Acal") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        BundleParams b = random_params(rng, 2 + trial % 2, true);
        auto f = make_factor(FactorKind::nc_twisted, b);
        auto rep = check_cocycle(f, f.star_theta);
        CHECK(rep.pass);
        CHECK(max_abs(rep.integrality) < 1e-12);
    }
}

TEST_CASE("cocycle fails for a non-integral deformation") {
    BundleParams b = BundleParams::standard(2);
    b.A = RMat::Identity(2, 2);
    b.theta = antisym2(0.7);
    b.Acal = RMat::Identity(2, 2) * 1.3;
    auto f = make_factor(FactorKind::nc_twisted, b);
    auto rep = check_cocycle(f, f.star_theta);
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(rep.integral);
}

TEST_CASE("connection compatibility and curvature for random parameters") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 8; ++trial) {
        int n = 2 + trial % 2;
        BundleParams b = random_params(rng, n, trial % 2 == 0);
        for (auto kind : {FactorKind::commutative, FactorKind::nc, FactorKind::twisted, FactorKind::nc_twisted}) {
            auto f = make_factor(kind, b);
            SymbolForm w = make_connection(kind, b);
            auto rep = check_compatibility(f, w, f.star_theta);
            CHECK_MESSAGE(rep.pass, factor_kind_name(kind), " ", rep.residual.abs);
            SymbolForm Om = curvature(w, f.star_theta);
            SymbolForm closed = curvature_closed_form(kind, b);
            CHECK_MESSAGE(residual(Om, closed).scaled() < 1e-12, factor_kind_name(kind));
        }
    }
}

TEST_CASE("perturbed connection fails compatibility") {
    std::mt19937_64 rng(5);
    BundleParams b = random_params(rng, 2, true);
    auto f = make_factor(FactorKind::nc_twisted, b);
    SymbolForm w = make_connection(FactorKind::nc_twisted, b);
    CMat L = CMat::Zero(4, 4);
    L(0, 2) = 1.0;  // x_1 dy_1
    w += SymbolForm::linear_one_form(2, L, CVec::Zero(4));
    CHECK_FALSE(check_compatibility(f, w, f.star_theta).pass);
}

TEST_CASE("commutative curvature closed form at zero theta") {
    BundleParams b = BundleParams::standard(2);
    b.A << 1, 2, 0, 1;
    SymbolForm Om = curvature(make_connection(FactorKind::commutative, b), b.theta);
    CMat N = CMat::Zero(4, 4);
    N.topRightCorner(2, 2) = -2.0 * PI * I_UNIT * b.A.transpose().cast<cplx>();
    CHECK(residual(Om, SymbolForm::constant_two_form(2, N)).abs < 1e-12);
}

TEST_CASE("holomorphicity obstruction") {
    BundleParams b = BundleParams::standard(2);
    b.A << 1, 0, 0, 0;
    b.theta = antisym2(1.0);
    SymbolForm Om = curvature_closed_form(FactorKind::nc, b);
    CHECK(holomorphicity_obstruction(Om, b.T).vanishes);
    b.A = RMat::Identity(2, 2);
    Om = curvature_closed_form(FactorKind::nc, b);
    CHECK_FALSE(holomorphicity_obstruction(Om, b.T).vanishes);
}

TEST_CASE("commutative obstruction vanishes iff AT is symmetric") {
    std::mt19937_64 rng(6);
    int agree = 0, symmetric_cases = 0;
    for (int trial = 0; trial < 40; ++trial) {
        int n = 1 + trial % 3;
        BundleParams b = BundleParams::standard(n);
        b.T = random_period_matrix(rng, n);
        if (trial % 4 == 0) b.T = standard_period(n);
        b.A = random_integer_matrix(rng, n, 2, false);
        if (trial % 4 == 0) b.A = RMat(b.A + b.A.transpose());
        CMat AT = b.A.cast<cplx>() * b.T;
        bool sym = is_symmetric(AT);
        symmetric_cases += sym;
        bool van = holomorphicity_obstruction(curvature_closed_form(FactorKind::commutative, b), b.T).vanishes;
        agree += (sym == van);
    }
    CHECK(agree == 40);
    CHECK(symmetric_cases > 0);
}

TEST_CASE("phi_theta_A is an isomorphism when Acal theta Acal = O") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 2 + trial % 2;
        BundleParams b = random_params(rng, n, true);
        BundleParams b0 = b;
        b0.Acal.setZero();
        BundleObject src = make_bundle(FactorKind::nc_twisted, b0);
        BundleObject dst = make_bundle(FactorKind::nc_twisted, b);
        Symbol phi = make_iso(IsoKind::phi_theta_A, b);
        auto rep = verify_morphism(phi, src, dst, b.theta);
        CHECK_MESSAGE(rep.pass, rep.automorphy.abs, " ", rep.dbar.abs);
    }
}

TEST_CASE("phi_theta_A at zero theta equals phi_A") {
    std::mt19937_64 rng(8);
    BundleParams b = random_params(rng, 2, false);
    b.theta.setZero();
    Symbol a = make_iso(IsoKind::phi_theta_A, b);
    Symbol c = make_iso(IsoKind::phi_A, b);
    CHECK(residual(SymbolSum(a), SymbolSum(c)).abs == 0.0);
}

TEST_CASE("make_iso rejects Acal theta Acal != O") {
    BundleParams b = BundleParams::standard(2);
    b.theta = antisym2(1.0);
    b.Acal = RMat::Identity(2, 2);
    CHECK_THROWS_AS(make_iso(IsoKind::phi_theta_A, b), Error);
    b.Acal << 1, 0, 0, 0;
    CHECK_NOTHROW(make_iso(IsoKind::phi_theta_A, b));
}

TEST_CASE("identity morphism and q shift") {
    std::mt19937_64 rng(9);
    BundleParams b = random_params(rng, 2, true);
    BundleObject src = make_bundle(FactorKind::nc, b);
    Symbol one = Symbol::constant(2, 1.0);
    CHECK(verify_morphism(one, src, src, b.theta).pass);
    BundleParams b2 = b;
    b2.q(0) += 0.5;
    BundleObject dst = make_bundle(FactorKind::nc, b2);
    auto rep = verify_morphism(one, src, dst, b.theta);
    CHECK_FALSE(rep.pass);
    CHECK(rep.automorphy.abs < 1e-12);
    CHECK(rep.dbar.abs > 0.1);
}

TEST_CASE("solve_hom finds lattice shifts") {
    std::mt19937_64 rng(10);
    BundleParams b = random_params(rng, 2, false);
    b.Acal.setZero();
    RVec k0(2), l0(2);
    k0 << 1, -1;
    l0 << 2, 0;
    RVec pp = b.p + k0;
    RVec qq = b.q - b.A.transpose() * b.theta * k0 + l0;
    auto sol = solve_hom(b, pp, qq, 2);
    REQUIRE(sol.has_value());
    CHECK(sol->k.cast<double>() == k0);
    CHECK(sol->l.cast<double>() == l0);
    RVec off = b.p;
    off(0) += 0.5;
    CHECK_FALSE(solve_hom(b, off, b.q, 2).has_value());
    auto same = solve_hom(b, b.p, b.q, 1);
    REQUIRE(same.has_value());
    CHECK(same->k.isZero());
}

TEST_CASE("solve_hom with a general deformation") {
    std::mt19937_64 rng(11);
    BundleParams b = random_params(rng, 2, false);
    b.Acal *= 0.5;
    RVec k0(2), l0(2);
    k0 << -1, 1;
    l0 << 0, 1;
    RMat ta = b.theta * b.Acal / (2.0 * PI);
    RMat P = RMat::Identity(2, 2) - ta * ta;
    RVec pp = b.p + P.transpose() * k0;
    RVec qq = b.q - b.A.transpose() * b.theta * P.transpose() * k0 + l0;
    auto ser = solve_hom(b, pp, qq, 1, {}, Exec::serial);
    auto par = solve_hom(b, pp, qq, 1, {}, Exec::parallel);
    REQUIRE(ser.has_value());
    REQUIRE(par.has_value());
    CHECK(ser->k == par->k);
    CHECK(ser->l == par->l);
}

TEST_CASE("gerby factors satisfy the twisted cocycle and compatibility") {
    std::mt19937_64 rng(12);
    for (auto kind : {FactorKind::gerby_tau1, FactorKind::gerby_tau2}) {
        for (int trial = 0; trial < 4; ++trial) {
            int n = 1 + trial % 2 + (kind == FactorKind::gerby_tau1 ? 1 : 0);
            BundleParams b = BundleParams::standard(n);
            b.T = random_period_matrix(rng, n);
            b.A.setZero();
            b.tau = kind == FactorKind::gerby_tau1 ? random_antisymmetric(rng, n, 1.0) : random_matrix(rng, n, n, 1.0);
            auto f = make_factor(kind, b);
            // alpha from the xi factors: bilinear in the generator directions
            int type = kind == FactorKind::gerby_tau1 ? 1 : 2;
            CMat lam = tau_lambda(b.T, b.tau, type);
            CMat G(n, 2 * n);
            G << CMat::Identity(n, n), b.T.conjugate();
            CMat alpha = ((type == 1 ? PI : 2.0 * PI) * I_UNIT * G.transpose() * (lam - lam.transpose()) * G)
                             .array()
                             .exp()
                             .matrix();
            CHECK(check_cocycle(f, f.star_theta, &alpha).pass);
            auto zc = gerby_zero_connection(kind, b);
            CHECK(check_compatibility(f, make_connection(kind, b), f.star_theta, &zc).pass);
            SymbolForm gb = gerby_two_form(kind, b);
            SymbolForm Om = curvature(make_connection(kind, b), f.star_theta, &gb);
            CHECK(residual(Om, curvature_closed_form(kind, b)).scaled() < 1e-12);
        }
    }
}

TEST_CASE("integrality family") {
    for (int m = 1; m <= 3; ++m) {
        BundleParams b = remark_pair(m);
        double expect = (-2.0 - 2.0 * std::sqrt(1.0 + m * m)) / (m * m);
        CHECK(std::abs(deformation_determinant(b.Acal, b.theta) - expect) < 1e-10);
        RMat J = antisym2(m);
        CHECK(max_abs(RMat(integrality_matrix(b.Acal, b.theta) - J)) < 1e-9);
        auto f = make_factor(FactorKind::nc_twisted, b);
        CHECK(check_cocycle(f, f.star_theta).pass);
        CHECK(check_compatibility(f, make_connection(FactorKind::nc_twisted, b), f.star_theta).pass);
        BundleParams bad = b;
        bad.theta *= 1.01;
        auto g = make_factor(FactorKind::nc_twisted, bad);
        CHECK_FALSE(check_cocycle(g, g.star_theta).pass);
    }
}

TEST_CASE("deformed parameter simplification identity") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + trial % 3;
        RMat th = random_antisymmetric(rng, n, 2.0);
        RMat ac = random_symmetric(rng, n, 2.0);
        RMat At = deformed_param(ac, th);
        RMat alt = (RMat::Identity(n, n) + ac * th / (2.0 * PI)).inverse() * ac;
        CHECK(max_abs(RMat(At - alt)) < 1e-10 * std::max(1.0, max_abs(At)));
        RMat M = At * th * At.transpose() / (4.0 * PI * PI);
        RMat lhs = M + At / (2.0 * PI) - At.transpose() / (2.0 * PI);
        CHECK(max_abs(RMat(lhs + M)) < 1e-10 * std::max(1.0, max_abs(M)));
    }
}

TEST_CASE("singular deformation is reported") {
    RMat th = antisym2(1.0);
    RMat ac(2, 2);
    ac << 0, -2.0 * PI, -2.0 * PI, 0;  // theta ac / 2pi = diag(-1, 1)
    try {
        deformed_param(ac, th);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularDeformation);
    }
}
