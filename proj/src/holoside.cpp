#include "ncsyz/holoside.hpp"

#include <cmath>
#include <sstream>

#include "ncsyz/parallel.hpp"

namespace ncsyz {

namespace {

void check_params(const BundleParams& p) {
    const int n = p.n;
    if (n <= 0) fail(ErrorCode::DimensionMismatch, "n must be positive");
    require_square(p.A, n, "A");
    if (p.p.size() != n || p.q.size() != n) fail(ErrorCode::DimensionMismatch, "p and q must have length n");
    require_square(p.theta, n, "theta");
    require_square(p.Acal, n, "Acal");
    if (p.T.rows() != n || p.T.cols() != n) fail(ErrorCode::DimensionMismatch, "T must be n x n");
}

// (e_i, 0) -> e_i, (0, e_i) -> Tbar e_i
CVec gerby_direction(const CMat& T, int g) {
    const int n = static_cast<int>(T.rows());
    CVec v = CVec::Zero(n);
    if (g < n)
        v(g) = 1.0;
    else
        v = T.conjugate().col(g - n);
    return v;
}

int gerby_type(FactorKind k) { return k == FactorKind::gerby_tau1 ? 1 : 2; }

// coefficients of r^t dzbar in the (dx, dy) frame
CVec dzbar_coeffs(const CMat& T, const CVec& r) {
    const int n = static_cast<int>(T.rows());
    CVec c(2 * n);
    c.head(n) = r;
    c.tail(n) = T.conjugate().transpose() * r;
    return c;
}

RMat effective_theta(FactorKind k, const BundleParams& p) {
    return (k == FactorKind::nc || k == FactorKind::nc_twisted) ? p.theta : RMat::Zero(p.n, p.n);
}

RMat effective_acal(FactorKind k, const BundleParams& p) {
    return (k == FactorKind::twisted || k == FactorKind::nc_twisted) ? p.Acal : RMat::Zero(p.n, p.n);
}

Residual form_norm(const SymbolForm& expr, double scale) {
    Residual r;
    r.abs = expr.max_coeff();
    r.scale = scale;
    return r;
}

}  // namespace

ComplexTorus make_complex_torus(const CMat& T, const Tol& tol) {
    if (T.rows() != T.cols() || T.rows() == 0) fail(ErrorCode::DimensionMismatch, "T must be square");
    if (!T.allFinite()) fail(ErrorCode::SingularT, "T has non-finite entries");
    RMat Y = T.imag();
    if (!is_positive_definite(Y, tol)) fail(ErrorCode::NotPositiveDefinite, "Im T must be symmetric positive definite");
    if (std::abs(T.determinant()) <= tol.window(std::pow(max_abs(T), T.rows())))
        fail(ErrorCode::SingularT, "det T vanishes");
    return {static_cast<int>(T.rows()), T};
}

CMat standard_period(int n) { return CMat::Identity(n, n) * I_UNIT; }

const char* factor_kind_name(FactorKind k) {
    switch (k) {
        case FactorKind::commutative: return "commutative";
        case FactorKind::nc: return "nc";
        case FactorKind::twisted: return "twisted";
        case FactorKind::nc_twisted: return "nc_twisted";
        case FactorKind::gerby_tau1: return "gerby_tau1";
        case FactorKind::gerby_tau2: return "gerby_tau2";
    }
    return "?";
}

FactorKind parse_factor_kind(const std::string& s) {
    for (auto k : {FactorKind::commutative, FactorKind::nc, FactorKind::twisted, FactorKind::nc_twisted,
                   FactorKind::gerby_tau1, FactorKind::gerby_tau2})
        if (s == factor_kind_name(k)) return k;
    fail(ErrorCode::ValidationError, "unknown factor kind " + s);
}

bool is_gerby(FactorKind k) { return k == FactorKind::gerby_tau1 || k == FactorKind::gerby_tau2; }

BundleParams BundleParams::standard(int n) {
    BundleParams b;
    b.n = n;
    b.A = RMat::Zero(n, n);
    b.p = RVec::Zero(n);
    b.q = RVec::Zero(n);
    b.theta = RMat::Zero(n, n);
    b.Acal = RMat::Zero(n, n);
    b.tau = RMat::Zero(n, n);
    b.T = standard_period(n);
    return b;
}

double deformation_determinant(const RMat& Acal, const RMat& theta) {
    const auto n = Acal.rows();
    return (RMat::Identity(n, n) + theta * Acal / (2.0 * PI)).determinant();
}

RMat deformed_param(const RMat& Acal, const RMat& theta) {
    const auto n = Acal.rows();
    RMat M = RMat::Identity(n, n) + theta * Acal / (2.0 * PI);
    if (std::abs(M.determinant()) < 1e-12 || condition_number(M) > 1e12)
        fail(ErrorCode::SingularDeformation, "I + theta Acal / 2pi is singular");
    return Acal * M.inverse();
}

RMat integrality_matrix(const RMat& Acal, const RMat& theta) {
    RMat At = deformed_param(Acal, theta);
    return At * theta * At.transpose() / (4.0 * PI * PI);
}

CMat tau_lambda(const CMat& T, const RMat& tau, int type) {
    CMat D = T - T.conjugate();
    Eigen::FullPivLU<CMat> lu(D);
    if (!lu.isInvertible()) fail(ErrorCode::SingularT, "T - Tbar is singular");
    CMat C = lu.inverse();
    CMat t = tau.cast<cplx>();
    if (type == 1) return C.transpose() * T.transpose() * t * T * C;
    return C.transpose() * t.transpose() * T * C;
}

RVec generator_shift(int n, int g) {
    RVec v = RVec::Zero(2 * n);
    v(g) = 1.0;
    return v;
}

RMat star_theta(FactorKind kind, const BundleParams& params) { return effective_theta(kind, params); }

FactorOfAutomorphy make_factor(FactorKind kind, const BundleParams& params) {
    check_params(params);
    const int n = params.n;
    FactorOfAutomorphy f;
    f.kind = kind;
    f.params = params;
    f.star_theta = effective_theta(kind, params);
    const RMat& A = params.A;
    const RMat th = f.star_theta;
    const RMat acal = effective_acal(kind, params);
    const RMat AthA = A.transpose() * th * A;

    if (is_gerby(kind)) make_complex_torus(params.T);
    CMat lambda;
    int type = gerby_type(kind);
    if (is_gerby(kind)) lambda = tau_lambda(params.T, params.tau, type);

    for (int g = 0; g < 2 * n; ++g) {
        CVec l = CVec::Zero(2 * n);
        cplx kappa = 0.0;
        if (is_gerby(kind)) {
            double f_pi = type == 1 ? PI : 2.0 * PI;
            CVec r = lambda.transpose() * gerby_direction(params.T, g);
            l = -f_pi * I_UNIT * dzbar_coeffs(params.T, r);
            if (g < n) l.tail(n) += 2.0 * PI * I_UNIT * A.col(g).cast<cplx>();
        } else if (g < n) {
            l.head(n) = -PI * I_UNIT * AthA.row(g).transpose().cast<cplx>();
            l.tail(n) = 2.0 * PI * I_UNIT * A.col(g).cast<cplx>();
        } else if (kind == FactorKind::twisted || kind == FactorKind::nc_twisted) {
            int i = g - n;
            RMat At = deformed_param(acal, th);
            RMat AtthA = At * th * A;
            kappa = 0.5 * I_UNIT * acal(i, i);
            l.head(n) = -I_UNIT * AtthA.row(i).transpose().cast<cplx>();
            l.tail(n) = I_UNIT * At.row(i).transpose().cast<cplx>();
        }
        f.gens.push_back(Symbol::exp_quadratic(n, CMat::Zero(2 * n, 2 * n), l, kappa));
    }
    return f;
}

CocycleReport check_cocycle(const FactorOfAutomorphy& f, const RMat& theta, const CMat* alpha, const Tol& tol) {
    const int n = f.params.n;
    CocycleReport rep;
    if (is_gerby(f.kind) && alpha == nullptr)
        fail(ErrorCode::PreconditionFailed, "gerby factors need the gerbe cocycle alpha");
    for (int a = 0; a < 2 * n; ++a)
        for (int b = 0; b < 2 * n; ++b) {
            if (a == b) continue;
            SymbolSum lhs = moyal_star(f.gens[a].shift(generator_shift(n, b)), f.gens[b], theta);
            SymbolSum rhs = moyal_star(f.gens[b].shift(generator_shift(n, a)), f.gens[a], theta);
            if (alpha != nullptr) lhs *= (*alpha)(a, b);
            Residual r = residual(lhs, rhs);
            if (!r.ok(tol)) {
                std::ostringstream os;
                os << "generators (" << a << "," << b << ") residual " << r.abs;
                rep.failures.push_back(os.str());
            }
            rep.residual.merge(r);
        }
    rep.integrality = RMat::Zero(n, n);
    if (f.kind == FactorKind::nc_twisted) {
        rep.integrality = integrality_matrix(f.params.Acal, f.params.theta);
        rep.integral = near_integer(rep.integrality, tol);
        if (!rep.integral) rep.failures.push_back("integrality matrix is not integral");
    }
    rep.pass = rep.failures.empty();
    return rep;
}

SymbolForm make_connection(FactorKind kind, const BundleParams& params) {
    check_params(params);
    const int n = params.n;
    const RMat th = effective_theta(kind, params);
    const RMat acal = effective_acal(kind, params);
    const RMat& A = params.A;
    const RMat I = RMat::Identity(n, n);
    CMat L = CMat::Zero(2 * n, 2 * n);
    CVec c = CVec::Zero(2 * n);
    L.topLeftCorner(n, n) = (PI * I_UNIT) * (A.transpose() * (I + th * acal / PI) * th * A).cast<cplx>();
    L.topRightCorner(n, n) = (-2.0 * PI * I_UNIT) * (A.transpose() * (I + th * acal / (2.0 * PI))).cast<cplx>();
    L.bottomLeftCorner(n, n) = I_UNIT * (acal * th * A).cast<cplx>();
    L.bottomRightCorner(n, n) = -I_UNIT * acal.cast<cplx>();
    c.tail(n) = (-2.0 * PI * I_UNIT) * (params.p.cast<cplx>() + params.T.transpose() * params.q.cast<cplx>());
    return SymbolForm::linear_one_form(n, L, c);
}

std::vector<SymbolForm> gerby_zero_connection(FactorKind kind, const BundleParams& params) {
    if (!is_gerby(kind)) fail(ErrorCode::PreconditionFailed, "zero connection exists for gerby kinds only");
    const int n = params.n;
    int type = gerby_type(kind);
    CMat lambda = tau_lambda(params.T, params.tau, type);
    double s = type == 1 ? 0.5 : 1.0;
    std::vector<SymbolForm> out;
    for (int g = 0; g < 2 * n; ++g) {
        CVec r = s * (lambda.transpose() * gerby_direction(params.T, g));
        out.push_back(SymbolForm::linear_one_form(n, CMat::Zero(2 * n, 2 * n), dzbar_coeffs(params.T, r)));
    }
    return out;
}

SymbolForm gerby_two_form(FactorKind kind, const BundleParams& params) {
    if (!is_gerby(kind)) fail(ErrorCode::PreconditionFailed, "gerbe 2-form exists for gerby kinds only");
    const int n = params.n;
    CMat N = CMat::Zero(2 * n, 2 * n);
    if (kind == FactorKind::gerby_tau1)
        N.topLeftCorner(n, n) = 0.5 * params.tau.cast<cplx>();
    else
        N.topRightCorner(n, n) = params.tau.cast<cplx>();
    SymbolForm B = SymbolForm::constant_two_form(n, N);
    return dolbeault_project(B, params.T, 2) * (2.0 * PI * I_UNIT);
}

CheckReport check_compatibility(const FactorOfAutomorphy& f, const SymbolForm& omega, const RMat& theta,
                                const std::vector<SymbolForm>* zero_conn, const Tol& tol) {
    const int n = f.params.n;
    CheckReport rep;
    if (is_gerby(f.kind) && zero_conn == nullptr)
        fail(ErrorCode::PreconditionFailed, "gerby factors need the 0-connection");
    for (int g = 0; g < 2 * n; ++g) {
        SymbolForm J = SymbolForm::function(SymbolSum(f.gens[g]));
        SymbolForm Jinv = SymbolForm::function(SymbolSum(star_inverse(f.gens[g], theta)));
        SymbolForm lhs = omega.shift(generator_shift(n, g));
        SymbolForm rhs = wedge_star(wedge_star(J, omega, theta), Jinv, theta) +
                         wedge_star(J, exterior_d(Jinv), theta);
        if (zero_conn != nullptr) rhs -= (*zero_conn)[g] * (2.0 * PI * I_UNIT);
        Residual r = residual(lhs, rhs);
        if (!r.ok(tol)) {
            std::ostringstream os;
            os << "generator " << g << " residual " << r.abs;
            rep.failures.push_back(os.str());
        }
        rep.residual.merge(r);
    }
    rep.pass = rep.failures.empty();
    return rep;
}

SymbolForm curvature(const SymbolForm& omega, const RMat& theta, const SymbolForm* gerbe_2form) {
    if (omega.degree() != 1) fail(ErrorCode::DimensionMismatch, "connection must be a 1-form");
    SymbolForm Omega = exterior_d(omega) + wedge_star(omega, omega, theta);
    if (gerbe_2form != nullptr) Omega += *gerbe_2form;
    return Omega;
}

SymbolForm curvature_closed_form(FactorKind kind, const BundleParams& params) {
    check_params(params);
    const int n = params.n;
    const RMat th = effective_theta(kind, params);
    const RMat acal = effective_acal(kind, params);
    const RMat& A = params.A;
    RMat ta = th * acal / (2.0 * PI);
    RMat P = RMat::Identity(n, n) - ta * ta;
    CMat N = CMat::Zero(2 * n, 2 * n);
    N.topLeftCorner(n, n) = (PI * I_UNIT) * (A.transpose() * P * th * A).cast<cplx>();
    N.topRightCorner(n, n) = (-2.0 * PI * I_UNIT) * (A.transpose() * P).cast<cplx>();
    N.bottomRightCorner(n, n) = (I_UNIT / (4.0 * PI)) * (acal * th * acal).cast<cplx>();
    if (is_gerby(kind)) {
        int type = gerby_type(kind);
        CMat lambda = tau_lambda(params.T, params.tau, type);
        CMat Db(n, 2 * n);
        Db << CMat::Identity(n, n), params.T.conjugate();
        N += (type == 1 ? PI : 2.0 * PI) * I_UNIT * Db.transpose() * lambda * Db;
    }
    return SymbolForm::constant_two_form(n, N);
}

Obstruction holomorphicity_obstruction(const SymbolForm& Omega, const CMat& T, const Tol& tol) {
    if (Omega.degree() != 2) fail(ErrorCode::DimensionMismatch, "curvature must be a 2-form");
    const int n = Omega.n();
    Obstruction ob;
    ob.part = dolbeault_project(Omega, T, 2);
    if (!ob.part.is_constant()) fail(ErrorCode::PreconditionFailed, "obstruction matrix needs a constant 2-form");
    CMat K = ob.part.constant_matrix();
    CMat D(2 * n, 2 * n);
    D << CMat::Identity(n, n), T, CMat::Identity(n, n), T.conjugate();
    CMat C = D.inverse();
    ob.matrix = (C.transpose() * K * C).bottomRightCorner(n, n);
    ob.vanishes = max_abs(ob.matrix) <= tol.window(Omega.max_coeff());
    return ob;
}

BundleObject make_bundle(FactorKind kind, const BundleParams& params, const Tol& tol) {
    BundleObject b;
    b.factor = make_factor(kind, params);
    b.omega = make_connection(kind, params);
    if (is_gerby(kind)) {
        b.zero_conn = gerby_zero_connection(kind, params);
        b.gerbe_2form = gerby_two_form(kind, params);
    }
    CheckReport rep = check_compatibility(b.factor, b.omega, b.factor.star_theta,
                                          b.zero_conn ? &*b.zero_conn : nullptr, tol);
    if (!rep.pass) fail(ErrorCode::HypothesisViolated, "connection is not compatible with the factor of automorphy");
    return b;
}

Symbol make_iso(IsoKind kind, const BundleParams& params, const Tol& tol) {
    check_params(params);
    const int n = params.n;
    const RMat& acal = params.Acal;
    CMat Z = CMat::Zero(n, n);
    CVec z = CVec::Zero(n);
    if (kind == IsoKind::phi_A) return Symbol::exp_blocks(n, Z, Z, I_UNIT * acal.cast<cplx>(), z, z, 0.0);
    const RMat& th = params.theta;
    const RMat& A = params.A;
    RMat ata = acal * th * acal;
    if (max_abs(ata) > tol.window(std::max(1.0, max_abs(acal) * max_abs(acal) * max_abs(th))))
        fail(ErrorCode::HypothesisViolated, "phi_theta_A needs Acal theta Acal = O");
    CMat Sxx = I_UNIT * (A.transpose() * th.transpose() * acal * th * A).cast<cplx>();
    CMat Sxy = I_UNIT * (A.transpose() * th * acal).cast<cplx>();
    return Symbol::exp_blocks(n, Sxx, Sxy, I_UNIT * acal.cast<cplx>(), z, z, 0.0);
}

MorphismReport verify_morphism(const Symbol& phi, const BundleObject& src, const BundleObject& dst, const RMat& theta,
                               const Tol& tol) {
    const int n = src.factor.params.n;
    if (dst.factor.params.n != n || phi.n() != n) fail(ErrorCode::DimensionMismatch, "morphism dimensions differ");
    MorphismReport rep;
    for (int g = 0; g < 2 * n; ++g) {
        SymbolSum lhs = moyal_star(dst.factor.gens[g], phi, theta);
        SymbolSum rhs = moyal_star(phi.shift(generator_shift(n, g)), src.factor.gens[g], theta);
        Residual r = residual(lhs, rhs);
        if (!r.ok(tol)) {
            std::ostringstream os;
            os << "automorphy generator " << g << " residual " << r.abs;
            rep.failures.push_back(os.str());
        }
        rep.automorphy.merge(r);
    }
    const CMat& T = dst.factor.params.T;
    SymbolForm Phi = SymbolForm::function(SymbolSum(phi));
    SymbolForm d = dbar(SymbolSum(phi), T);
    SymbolForm left = wedge_star(dolbeault_project(dst.omega, T, 1), Phi, theta);
    SymbolForm right = wedge_star(Phi, dolbeault_project(src.omega, T, 1), theta);
    SymbolForm expr = d + left - right;
    rep.dbar = form_norm(expr, std::max({d.max_coeff(), left.max_coeff(), right.max_coeff()}));
    if (!rep.dbar.ok(tol)) {
        std::ostringstream os;
        os << "dbar condition residual " << rep.dbar.abs;
        rep.failures.push_back(os.str());
    }
    rep.pass = rep.failures.empty();
    return rep;
}

Symbol moduli_morphism(const BundleParams& params, const RVec& k, const RVec& l) {
    const int n = params.n;
    RMat Pm = RMat::Identity(n, n) - params.theta * params.Acal / (2.0 * PI);
    CVec lw(2 * n);
    lw.head(n) = (-2.0 * PI * I_UNIT) * ((Pm * params.theta * params.A).transpose() * k + l).cast<cplx>();
    lw.tail(n) = (2.0 * PI * I_UNIT) * (Pm.transpose() * k).cast<cplx>();
    return Symbol::exp_quadratic(n, CMat::Zero(2 * n, 2 * n), lw, 0.0);
}

std::optional<HomSolution> solve_hom(const BundleParams& src, const RVec& p_prime, const RVec& q_prime, int window,
                                     const Tol& tol, Exec exec) {
    check_params(src);
    if (window < 0) fail(ErrorCode::PreconditionFailed, "window must be non-negative");
    const int n = src.n;
    deformed_param(src.Acal, src.theta);
    RMat ta = src.theta * src.Acal / (2.0 * PI);
    RMat P = RMat::Identity(n, n) - ta * ta;
    RMat AthPt = src.A.transpose() * src.theta * P.transpose();
    RVec dp = p_prime - src.p, dq = q_prime - src.q;
    double scale = std::max({1.0, max_abs(p_prime), max_abs(q_prime)});

    const int side = 2 * window + 1;
    long total = 1;
    for (int i = 0; i < 2 * n; ++i) total *= side;
    std::vector<char> hit(total, 0);
    auto decode = [&](long idx, RVec& k, RVec& l) {
        for (int i = 0; i < 2 * n; ++i) {
            double v = static_cast<double>(idx % side - window);
            idx /= side;
            if (i < n)
                k(i) = v;
            else
                l(i - n) = v;
        }
    };
    for_each_index(exec == Exec::parallel, total, [&](long idx) {
        RVec k(n), l(n);
        decode(idx, k, l);
        RVec ep = P.transpose() * k - dp;
        RVec eq = -AthPt * k + l - dq;
        double err = std::max(max_abs(ep), max_abs(eq));
        hit[idx] = err <= tol.window(scale) * 10.0;
    });

    BundleObject b_src = make_bundle(FactorKind::nc_twisted, src, tol);
    BundleParams dst = src;
    dst.p = p_prime;
    dst.q = q_prime;
    BundleObject b_dst = make_bundle(FactorKind::nc_twisted, dst, tol);
    for (long idx = 0; idx < total; ++idx) {
        if (!hit[idx]) continue;
        RVec k(n), l(n);
        decode(idx, k, l);
        Symbol phi = moduli_morphism(src, k, l);
        MorphismReport rep = verify_morphism(phi, b_src, b_dst, src.theta, tol);
        if (rep.pass) return HomSolution{phi, k.cast<int>(), l.cast<int>(), rep};
    }
    return std::nullopt;
}

}  // namespace ncsyz
