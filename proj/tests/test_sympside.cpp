#include <doctest.h>

#include "ncsyz/sympside.hpp"
#include "oracles.hpp"

using namespace ncsyz;

namespace {

RMat mat2(double a, double b, double c, double d) {
    RMat m(2, 2);
    m << a, b, c, d;
    return m;
}

BundleParams remark_params(int m, const RMat& A) {
    BundleParams b = BundleParams::standard(2);
    b.theta = oracle::remark_theta(m);
    b.Acal = oracle::remark_acal();
    b.A = A;
    return b;
}

// inverse of a 2x2 complex matrix by the adjugate
CMat inverse2(const CMat& T) {
    cplx det = T(0, 0) * T(1, 1) - T(0, 1) * T(1, 0);
    CMat r(2, 2);
    r << T(1, 1), -T(0, 1), -T(1, 0), T(0, 0);
    return r / det;
}

}  // namespace

TEST_CASE("mirror torus matrices") {
    auto m1 = make_mirror(standard_period(1), MirrorVariant::plain);
    CHECK(std::abs(m1.omega_matrix(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(m1.b_matrix(0, 0)) < 1e-15);

    std::mt19937_64 rng(4);
    for (int t = 0; t < 10; ++t) {
        CMat T = random_period_matrix(rng, 2);
        CMat W = -inverse2(T).transpose();
        auto plain = make_mirror(T, MirrorVariant::plain);
        CHECK(max_abs(RMat(plain.omega_matrix - W.imag())) < 1e-12);
        CHECK(max_abs(RMat(plain.b_matrix - W.real())) < 1e-12);
        RMat th = random_antisymmetric(rng, 2, 1.0);
        auto nc = make_mirror(T, MirrorVariant::nc, th);
        CHECK(nc.omega_matrix == plain.omega_matrix);
        CHECK(nc.theta_b == th);
        // B_theta = dyv^t theta dyv / 2 sits in the yv block of the B-field
        CMat K = mirror_b_form(nc).constant_matrix();
        CHECK(max_abs(RMat(K.bottomRightCorner(2, 2).real() - th)) < 1e-14);
    }
    CMat T = random_period_matrix(rng, 2);
    RMat tau = mat2(0, 1, 0, 0);
    auto m2 = make_mirror(T, MirrorVariant::tau2, tau);
    CMat W = -inverse2(T).transpose();
    RMat om = W.imag(), b = W.real();
    // tau^t = [[0,0],[1,0]] picks the second column into the first
    RMat expect_om = RMat::Zero(2, 2), expect_b = RMat::Zero(2, 2);
    expect_om.col(0) = -om.col(1);
    expect_b.col(0) = -b.col(1);
    CHECK(max_abs(RMat(m2.tau_omega - expect_om)) < 1e-12);
    CHECK(max_abs(RMat(m2.tau_b - expect_b)) < 1e-12);
    CHECK_THROWS_AS(make_mirror(T, MirrorVariant::nc, mat2(0, 1, 1, 0)), Error);
}

TEST_CASE("Fukaya object predicate") {
    std::mt19937_64 rng(1);
    CHECK(fukaya_object_check(RMat::Zero(2, 2), random_period_matrix(rng, 2)));
    CHECK(fukaya_object_check(mat2(2, 1, 1, 3), standard_period(2)));
    CMat T(2, 2);
    T << I_UNIT, 0.3, 0.3, 2.0 * I_UNIT;
    CHECK_FALSE(fukaya_object_check(mat2(0, 1, 0, 0), T));
    auto L = make_lagrangian(mat2(0, 1, 0, 0), RVec::Zero(2), T, mat2(0, 0.5, 0, 0));
    CHECK_FALSE(L.fukaya);
    CHECK(std::abs(L.slope(1, 0) - 0.5) < 1e-15);
}

TEST_CASE("periods of the restricted B-field") {
    auto plain = make_mirror(standard_period(2), MirrorVariant::plain);
    auto z = b_restriction_periods(RMat::Zero(2, 2), plain);
    CHECK(max_abs(z.period_matrix) == 0.0);
    CHECK(z.integral);

    auto irr = make_mirror(standard_period(2), MirrorVariant::nc, mat2(0, std::sqrt(2.0), -std::sqrt(2.0), 0));
    CHECK_FALSE(b_restriction_periods(RMat::Identity(2, 2), irr).integral);

    auto three = make_mirror(standard_period(2), MirrorVariant::nc, mat2(0, 3, -3, 0));
    auto r = b_restriction_periods(RMat::Identity(2, 2), three);
    CHECK(max_abs(RMat(r.period_matrix - mat2(0, 3, -3, 0))) < 1e-14);
    CHECK(r.integral);

    // T = (a + i) I has a non-zero B-field that still vanishes on symmetric slopes
    CMat T = cplx(0.4, 1.0) * CMat::Identity(2, 2);
    RMat th = mat2(0, 0.3, -0.3, 0);
    RMat A = mat2(2, 1, 1, 1);
    auto m = make_mirror(T, MirrorVariant::nc, th);
    CHECK(max_abs(m.b_matrix) > 0.1);
    auto p = b_restriction_periods(A, m);
    CHECK(max_abs(RMat(p.period_matrix - A.transpose() * th * A)) < 1e-13);

    CMat T2(2, 2);
    T2 << I_UNIT, 0.3, 0.3, 2.0 * I_UNIT;
    try {
        b_restriction_periods(mat2(0, 1, 0, 0), make_mirror(T2, MirrorVariant::plain));
        FAIL("expected PreconditionFailed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PreconditionFailed);
    }
}

TEST_CASE("gerbe data") {
    BundleParams b = BundleParams::standard(2);
    b.A = mat2(1, 1, 0, 1);
    b.theta = mat2(0, 2, -2, 0);
    auto g = make_gerbe(GerbeKind::dual_theta, b);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(std::abs(g.alpha(i, j) - 1.0) < 1e-12);
    CHECK(verify_gerbe(g).pass);

    BundleParams t0 = BundleParams::standard(2);
    auto h0 = make_gerbe(GerbeKind::tau1_holo, t0);
    CHECK(max_abs(CMat(h0.alpha - CMat::Ones(4, 4))) < 1e-15);
    CHECK(h0.one_conn.max_coeff() == 0.0);

    BundleParams t1 = BundleParams::standard(2);
    t1.tau = mat2(0, 0.5, -0.5, 0);
    auto h1 = make_gerbe(GerbeKind::tau1_holo, t1);
    // (T - Tbar)^{-1} = -i/2 at T = i, so Lambda = (-i/2)^2 i^2 tau
    cplx c = -0.5 * I_UNIT;
    RMat lam = (c * c * I_UNIT * I_UNIT).real() * t1.tau;
    CHECK(std::abs(h1.alpha(0, 1) - std::exp(2.0 * PI * I_UNIT * lam(0, 1))) < 1e-14);
    CHECK(verify_gerbe(h1).pass);
}

TEST_CASE("gerbe invariants over random parameters") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 12; ++t) {
        int n = 1 + t % 3;
        BundleParams b = BundleParams::standard(n);
        b.T = random_period_matrix(rng, n);
        b.A = random_integer_matrix(rng, n, 2, false);
        b.theta = random_antisymmetric(rng, n, 1.0);
        for (auto kind : {GerbeKind::dual_theta, GerbeKind::tau1_dual, GerbeKind::tau1_holo, GerbeKind::tau2_holo}) {
            b.tau = kind == GerbeKind::tau2_holo ? random_matrix(rng, n, n, 1.0) : random_antisymmetric(rng, n, 1.0);
            auto g = make_gerbe(kind, b);
            auto rep = verify_gerbe(g);
            CHECK_MESSAGE(rep.pass, gerbe_kind_name(kind));
            for (int a = 0; a < g.generators; ++a)
                for (int c = 0; c < g.generators; ++c) CHECK(std::abs(g.alpha(a, c) * g.alpha(c, a) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("holomorphic gerbes twist the gerby factors") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 4; ++t) {
        int n = 2;
        BundleParams b = BundleParams::standard(n);
        b.T = random_period_matrix(rng, n);
        b.A.setZero();
        b.tau = random_antisymmetric(rng, n, 1.0);
        auto g1 = make_gerbe(GerbeKind::tau1_holo, b);
        auto f1 = make_factor(FactorKind::gerby_tau1, b);
        CHECK(check_cocycle(f1, f1.star_theta, &g1.alpha).pass);
        CHECK(check_compatibility(f1, make_connection(FactorKind::gerby_tau1, b), f1.star_theta, &g1.zero_conn).pass);
        b.tau = random_matrix(rng, n, n, 1.0);
        auto g2 = make_gerbe(GerbeKind::tau2_holo, b);
        auto f2 = make_factor(FactorKind::gerby_tau2, b);
        CHECK(check_cocycle(f2, f2.star_theta, &g2.alpha).pass);
    }
}

TEST_CASE("restriction of the global gerbe") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10; ++t) {
        int n = 2 + t % 2;
        BundleParams b = BundleParams::standard(n);
        b.A = random_integer_matrix(rng, n, 3, false);
        b.theta = random_antisymmetric(rng, n, 1.0);
        auto mirror = make_mirror(standard_period(n), MirrorVariant::nc, b.theta);
        SymbolForm restricted = restrict_to_lagrangian(mirror_b_form(mirror), b.A) * (2.0 * PI * I_UNIT);
        CHECK(residual(restricted, make_gerbe(GerbeKind::dual_theta, b).one_conn).scaled() < 1e-13);
    }
}

TEST_CASE("twisted local system on the integrality family") {
    std::mt19937_64 rng(2);
    for (int m = 1; m <= 3; ++m) {
        for (int t = 0; t < 3; ++t) {
            RMat A = t == 0 ? RMat::Identity(2, 2) : random_integer_matrix(rng, 2, 3, false);
            BundleParams b = remark_params(m, A);
            b.q = random_vector(rng, 2, -1, 1);
            auto sys = make_twisted_local_system(b);
            auto gerbe = make_gerbe(GerbeKind::dual_theta, b);
            auto rep = verify_local_system(sys, gerbe);
            CHECK(rep.pass);
            CHECK(rep.cocycle.scaled() < 1e-12);
            // pointwise at 16 samples
            auto pts = oracle::sample_points(rng, 4, 16);
            for (int i = 0; i < 2; ++i) {
                int j = 1 - i;
                SymbolSum lhs = SymbolSum(sys.j_dual[i].shift(generator_shift(2, j)) * sys.j_dual[j]) * gerbe.alpha(i, j);
                SymbolSum rhs = SymbolSum(sys.j_dual[j].shift(generator_shift(2, i)) * sys.j_dual[i]);
                CHECK(sampled_residual(lhs, rhs, pts).abs < 1e-12);
            }
        }
    }
}

TEST_CASE("twisted local system reductions") {
    std::mt19937_64 rng(12);
    BundleParams b = BundleParams::standard(2);
    b.A = mat2(1, 2, 0, 1);
    b.Acal = random_symmetric(rng, 2, 1.0);
    b.q = random_vector(rng, 2, -1, 1);
    auto flat = make_twisted_local_system(b);
    for (const auto& j : flat.j_dual) CHECK(j.l().norm() == 0.0);
    CHECK(max_abs(CVec(flat.omega_dual.constant_vector().head(2) - 2.0 * PI * I_UNIT * b.q.cast<cplx>())) < 1e-14);

    // rank one Acal = v v^t with theta v = 0 in 3 dimensions gives Acal theta Acal = O
    BundleParams c = BundleParams::standard(3);
    RVec v(3);
    v << 1, 2, -1;
    RVec u(3);
    u << 1, 0, 1;
    RVec w = Eigen::Vector3d(v).cross(Eigen::Vector3d(u));
    c.theta = u * w.transpose() - w * u.transpose();
    c.theta *= 0.3;
    c.Acal = v * v.transpose();
    c.A = random_integer_matrix(rng, 3, 2, false);
    c.q = random_vector(rng, 3, -1, 1);
    CHECK(max_abs(RMat(c.Acal * c.theta * c.Acal)) < 1e-12);
    BundleParams c0 = c;
    c0.Acal.setZero();
    auto s1 = make_twisted_local_system(c), s0 = make_twisted_local_system(c0);
    for (int i = 0; i < 3; ++i) CHECK(residual(SymbolSum(s1.j_dual[i]), SymbolSum(s0.j_dual[i])).scaled() < 1e-12);
    CHECK(residual(s1.omega_dual, s0.omega_dual).scaled() < 1e-12);
}

TEST_CASE("non-integral local systems") {
    BundleParams b = remark_params(1, RMat::Identity(2, 2));
    b.theta *= 1.01;
    try {
        make_twisted_local_system(b);
        FAIL("expected IntegralityViolated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IntegralityViolated);
    }
    auto sys = make_twisted_local_system(b, false);
    CHECK_FALSE(sys.integral);
    auto rep = verify_local_system(sys, make_gerbe(GerbeKind::dual_theta, b));
    CHECK_FALSE(rep.pass);
    // the cocycle defect is exp(2 pi i K) with K the integrality matrix
    double dist = integer_distance(sys.integrality);
    CHECK(rep.cocycle.abs >= std::abs(std::exp(2.0 * PI * I_UNIT * dist) - 1.0) * 0.5);
}

TEST_CASE("dual curvature") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 10; ++t) {
        BundleParams b = BundleParams::standard(2);
        b.A = random_integer_matrix(rng, 2, 2, false);
        b.A = RMat(b.A + b.A.transpose());
        b.theta = random_antisymmetric(rng, 2, 1.0);
        auto sys = make_twisted_local_system(b);
        auto gerbe = make_gerbe(GerbeKind::dual_theta, b);
        auto mirror = make_mirror(standard_period(2), MirrorVariant::nc, b.theta);
        auto dc = dual_curvature(sys, gerbe, mirror);
        RMat N = b.A.transpose() * b.theta * b.A;
        CHECK(std::abs(dc.Omega.constant_matrix()(0, 1) - 2.0 * PI * I_UNIT * N(0, 1)) < 1e-12);
        CHECK(dc.generalized_condition_pass);
        if (max_abs(N) > 1e-6) {
            auto plain = make_mirror(standard_period(2), MirrorVariant::plain);
            CHECK_FALSE(dual_curvature(sys, gerbe, plain).generalized_condition_pass);
        }
    }
    BundleParams z = BundleParams::standard(2);
    z.Acal = mat2(1, 0, 0, 2);
    auto dz = dual_curvature(make_twisted_local_system(z), make_gerbe(GerbeKind::dual_theta, z),
                             make_mirror(standard_period(2), MirrorVariant::plain));
    CHECK(dz.Omega.max_coeff() == 0.0);

    for (int m = 1; m <= 3; ++m) {
        BundleParams b = remark_params(m, RMat::Identity(2, 2));
        auto dc = dual_curvature(make_twisted_local_system(b), make_gerbe(GerbeKind::dual_theta, b),
                                 make_mirror(standard_period(2), MirrorVariant::nc, b.theta));
        CHECK(dc.residual.scaled() < 1e-12);
        cplx expect = 2.0 * PI * I_UNIT * (m + b.theta(0, 1));
        CHECK(std::abs(dc.Omega.constant_matrix()(0, 1) - expect) < 1e-11);
    }
}

TEST_CASE("Fourier-Mukai pullback of the global gerbe") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 10; ++t) {
        int n = 1 + t % 3;
        RMat A = random_integer_matrix(rng, n, 3, true);
        RMat th = random_antisymmetric(rng, n, 1.0);
        CHECK(fm_gerbe_pullback_check(A, th).pass);
    }
    CHECK_THROWS_AS(fm_gerbe_pullback_check(RMat::Zero(2, 2), mat2(0, 1, -1, 0)), Error);
}
