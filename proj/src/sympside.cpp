#include "ncsyz/sympside.hpp"

#include <cmath>
#include <sstream>

namespace ncsyz {

namespace {

RMat zero_theta(int n) { return RMat::Zero(n, n); }

void record(std::vector<std::string>& failures, Residual& acc, const Residual& r, const Tol& tol,
            const std::string& what) {
    if (!r.ok(tol)) {
        std::ostringstream os;
        os << what << " residual " << r.abs;
        failures.push_back(os.str());
    }
    acc.merge(r);
}

SymbolForm zero_form(int n, int degree) { return SymbolForm(n, degree); }

CMat gerbe_directions(const CMat& T) {
    const int n = static_cast<int>(T.rows());
    CMat G(n, 2 * n);
    G << CMat::Identity(n, n), T.conjugate();
    return G;
}

SymbolSum exp_linear(int n, const CVec& l) {
    return SymbolSum(Symbol::exp_quadratic(n, CMat::Zero(2 * n, 2 * n), l, 0.0));
}

}  // namespace

const char* mirror_variant_name(MirrorVariant v) {
    switch (v) {
        case MirrorVariant::plain: return "plain";
        case MirrorVariant::nc: return "nc";
        case MirrorVariant::tau1: return "tau1";
        case MirrorVariant::tau2: return "tau2";
    }
    return "?";
}

const char* gerbe_kind_name(GerbeKind k) {
    switch (k) {
        case GerbeKind::dual_theta: return "dual_theta";
        case GerbeKind::tau1_dual: return "tau1_dual";
        case GerbeKind::tau1_holo: return "tau1_holo";
        case GerbeKind::tau2_holo: return "tau2_holo";
    }
    return "?";
}

MirrorTorus make_mirror(const CMat& T, MirrorVariant variant, const RMat& param) {
    ComplexTorus X = make_complex_torus(T);
    const int n = X.n;
    Eigen::FullPivLU<CMat> lu(T);
    if (!lu.isInvertible()) fail(ErrorCode::SingularT, "T must be invertible for the mirror");
    CMat W = -CMat(lu.inverse()).transpose();
    MirrorTorus m;
    m.n = n;
    m.variant = variant;
    m.T = T;
    m.omega_matrix = W.imag();
    m.b_matrix = W.real();
    m.theta_b = RMat::Zero(n, n);
    m.tau_omega = RMat::Zero(n, n);
    m.tau_b = RMat::Zero(n, n);
    m.param = param.size() == 0 ? RMat::Zero(n, n) : param;
    switch (variant) {
        case MirrorVariant::plain: break;
        case MirrorVariant::nc: m.theta_b = require_antisymmetric(m.param, n, "theta"); break;
        case MirrorVariant::tau1: m.tau_b = 0.5 * require_antisymmetric(m.param, n, "tau"); break;
        case MirrorVariant::tau2:
            require_square(m.param, n, "tau");
            m.tau_omega = -m.omega_matrix * m.param.transpose();
            m.tau_b = -m.b_matrix * m.param.transpose();
            break;
    }
    return m;
}

SymbolForm mirror_b_form(const MirrorTorus& m) {
    const int n = m.n;
    CMat N = CMat::Zero(2 * n, 2 * n);
    N.topRightCorner(n, n) = m.b_matrix.cast<cplx>();
    N.bottomRightCorner(n, n) = 0.5 * m.theta_b.cast<cplx>();
    N.topLeftCorner(n, n) = m.tau_b.cast<cplx>();
    return SymbolForm::constant_two_form(n, N);
}

bool fukaya_object_check(const RMat& A, const CMat& T, const Tol& tol) {
    if (A.rows() != T.rows() || A.cols() != T.cols()) fail(ErrorCode::DimensionMismatch, "A and T differ in size");
    return is_symmetric(CMat(A.cast<cplx>() * T), tol);
}

Lagrangian make_lagrangian(const RMat& A, const RVec& p, const CMat& T, const std::optional<RMat>& tau,
                           const Tol& tol) {
    const int n = static_cast<int>(T.rows());
    Lagrangian L;
    L.A = require_integer(A, n, "A", tol);
    if (p.size() != n) fail(ErrorCode::DimensionMismatch, "p has the wrong length");
    L.p = p;
    L.slope = L.A;
    if (tau) L.slope += require_square(*tau, n, "tau").transpose();
    L.fukaya = fukaya_object_check(L.A, T, tol);
    return L;
}

SymbolForm restrict_to_lagrangian(const SymbolForm& form, const RMat& A) {
    const int n = form.n();
    if (form.degree() != 2 || !form.is_constant())
        fail(ErrorCode::PreconditionFailed, "restriction needs a constant 2-form");
    require_square(A, n, "A");
    CMat Phi = CMat::Zero(2 * n, 2 * n);
    Phi.topLeftCorner(n, n) = CMat::Identity(n, n);
    Phi.bottomLeftCorner(n, n) = A.cast<cplx>();
    CMat K = Phi.transpose() * form.constant_matrix() * Phi;
    return SymbolForm::constant_two_form(n, K * 0.5);
}

PeriodReport b_restriction_periods(const RMat& A, const MirrorTorus& mirror, const Tol& tol) {
    if (!fukaya_object_check(A, mirror.T, tol))
        fail(ErrorCode::PreconditionFailed, "A T must be symmetric for B to vanish on L");
    const int n = mirror.n;
    CMat K = restrict_to_lagrangian(mirror_b_form(mirror), A).constant_matrix();
    PeriodReport rep;
    rep.period_matrix = K.topLeftCorner(n, n).real();
    rep.integral = near_integer(rep.period_matrix, tol);
    return rep;
}

GerbeDatum make_gerbe(GerbeKind kind, const BundleParams& params) {
    const int n = params.n;
    GerbeDatum g;
    g.kind = kind;
    g.n = n;
    g.T = params.T.size() ? params.T : standard_period(n);
    if (kind == GerbeKind::dual_theta || kind == GerbeKind::tau1_dual) {
        RMat M;
        if (kind == GerbeKind::dual_theta) {
            RMat A = require_square(params.A, n, "A");
            M = A.transpose() * require_antisymmetric(params.theta, n, "theta") * A;
        } else {
            M = require_antisymmetric(params.tau, n, "tau");
        }
        g.generators = n;
        g.alpha = (2.0 * PI * I_UNIT * M.cast<cplx>()).array().exp().matrix();
        CMat L = CMat::Zero(2 * n, 2 * n);
        L.topLeftCorner(n, n) = 0.5 * M.cast<cplx>();
        g.beta = SymbolForm::linear_one_form(n, L, CVec::Zero(2 * n));
        for (int i = 0; i < n; ++i) {
            CVec l = CVec::Zero(2 * n);
            l.head(n) = -PI * I_UNIT * M.row(i).transpose().cast<cplx>();
            g.xi.push_back(exp_linear(n, l));
            CVec c = CVec::Zero(2 * n);
            c.head(n) = 0.5 * M.row(i).transpose().cast<cplx>();
            g.zero_conn.push_back(SymbolForm::linear_one_form(n, CMat::Zero(2 * n, 2 * n), c));
        }
        g.one_conn = exterior_d(g.beta) * (2.0 * PI * I_UNIT);
        return g;
    }
    make_complex_torus(g.T);
    const int type = kind == GerbeKind::tau1_holo ? 1 : 2;
    FactorKind fk = type == 1 ? FactorKind::gerby_tau1 : FactorKind::gerby_tau2;
    if (type == 1)
        require_antisymmetric(params.tau, n, "tau");
    else
        require_square(params.tau, n, "tau");
    const double f = type == 1 ? 1.0 : 2.0;
    const double s = type == 1 ? 0.5 : 1.0;
    CMat lambda = tau_lambda(g.T, params.tau, type);
    CMat Db = gerbe_directions(g.T);
    g.generators = 2 * n;
    g.alpha = (f * PI * I_UNIT * Db.transpose() * (lambda - lambda.transpose()) * Db).array().exp().matrix();
    g.beta = SymbolForm::linear_one_form(n, s * Db.transpose() * lambda * Db, CVec::Zero(2 * n));
    for (int k = 0; k < 2 * n; ++k) {
        CVec dir = Db * generator_shift(n, k).cast<cplx>();
        CVec r = Db.transpose() * lambda.transpose() * dir;
        g.xi.push_back(exp_linear(n, CVec(-f * PI * I_UNIT * r)));
        g.zero_conn.push_back(SymbolForm::linear_one_form(n, CMat::Zero(2 * n, 2 * n), CVec(s * r)));
    }
    BundleParams bp = params;
    bp.T = g.T;
    g.one_conn = gerby_two_form(fk, bp);
    return g;
}

RVec gerbe_generator(const GerbeDatum& g, int gen) { return generator_shift(g.n, gen); }

CheckReport verify_gerbe(const GerbeDatum& g, const Tol& tol) {
    const int n = g.n;
    const bool holo = g.kind == GerbeKind::tau1_holo || g.kind == GerbeKind::tau2_holo;
    CheckReport rep;
    for (int a = 0; a < g.generators; ++a) {
        RVec ga = gerbe_generator(g, a);
        SymbolForm shifted = g.beta.shift(ga) - g.beta;
        record(rep.failures, rep.residual, residual(g.zero_conn[a], shifted), tol,
               "0-connection of generator " + std::to_string(a));
        SymbolForm flat = exterior_d(g.xi[a]) +
                          wedge_star(SymbolForm::function(g.xi[a]), g.zero_conn[a], zero_theta(n)) * (2.0 * PI * I_UNIT);
        Residual rf = residual(flat, zero_form(n, 1));
        rf.scale = std::max(rf.scale, g.xi[a].max_coeff() * g.zero_conn[a].max_coeff() * 2.0 * PI);
        record(rep.failures, rep.residual, rf, tol, "flatness of xi for generator " + std::to_string(a));
        for (int b = 0; b < g.generators; ++b) {
            if (a == b) continue;
            RVec gb = gerbe_generator(g, b);
            SymbolSum lhs = g.xi[a].shift(gb) * g.xi[b] * g.alpha(a, b);
            SymbolSum rhs = g.xi[b].shift(ga) * g.xi[a];
            record(rep.failures, rep.residual, residual(lhs, rhs), tol,
                   "alpha(" + std::to_string(a) + "," + std::to_string(b) + ")");
            Residual ra{std::abs(g.alpha(a, b) * g.alpha(b, a) - 1.0), 1.0};
            record(rep.failures, rep.residual, ra, tol, "alpha antisymmetry");
            SymbolForm sum = g.zero_conn[a] + g.zero_conn[b];
            SymbolForm joint = g.beta.shift(RVec(ga + gb)) - g.beta;
            record(rep.failures, rep.residual, residual(sum, joint), tol, "0-connection additivity");
        }
    }
    SymbolForm d_beta = exterior_d(g.beta) * (2.0 * PI * I_UNIT);
    if (holo) d_beta = dolbeault_project(d_beta, g.T, 2);
    record(rep.failures, rep.residual, residual(g.one_conn, d_beta), tol, "1-connection");
    rep.pass = rep.failures.empty();
    return rep;
}

TwistedLocalSystem make_twisted_local_system(const BundleParams& params, bool enforce_integrality, const Tol& tol) {
    const int n = params.n;
    TwistedLocalSystem sys;
    sys.n = n;
    sys.params = params;
    RMat A = require_square(params.A, n, "A");
    RMat th = require_antisymmetric(params.theta, n, "theta", tol);
    RMat acal = require_symmetric(params.Acal, n, "Acal", tol);
    if (params.q.size() != n) fail(ErrorCode::DimensionMismatch, "q has the wrong length");
    RMat At = deformed_param(acal, th);
    RMat M = At * th * At.transpose();
    RMat N = A.transpose() * th * A;
    sys.integrality = M / (4.0 * PI * PI);
    sys.integral = near_integer(sys.integrality, Tol{1e-9, 1e-9});
    if (enforce_integrality && !sys.integral)
        fail(ErrorCode::IntegralityViolated, "Acal^theta theta (Acal^theta)^t / 4pi^2 is not an integer matrix");
    for (int i = 0; i < n; ++i) {
        CVec l = CVec::Zero(2 * n);
        l.head(n) = (-I_UNIT / (4.0 * PI)) * M.row(i).transpose().cast<cplx>() -
                    PI * I_UNIT * N.row(i).transpose().cast<cplx>();
        sys.j_dual.push_back(Symbol::exp_quadratic(n, CMat::Zero(2 * n, 2 * n), l, 0.0));
    }
    CMat L = CMat::Zero(2 * n, 2 * n);
    L.topLeftCorner(n, n) = (I_UNIT / (4.0 * PI)) * M.cast<cplx>();
    CVec c = CVec::Zero(2 * n);
    c.head(n) = 2.0 * PI * I_UNIT * params.q.cast<cplx>();
    sys.omega_dual = SymbolForm::linear_one_form(n, L, c);
    return sys;
}

LocalSystemReport verify_local_system(const TwistedLocalSystem& sys, const GerbeDatum& gerbe, const Tol& tol) {
    const int n = sys.n;
    if (gerbe.kind != GerbeKind::dual_theta || gerbe.n != n)
        fail(ErrorCode::ContextMismatch, "local system needs the dual theta gerbe on the same Lagrangian");
    LocalSystemReport rep;
    const RMat zero = zero_theta(n);
    for (int i = 0; i < n; ++i) {
        RVec ei = generator_shift(n, i);
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            RVec ej = generator_shift(n, j);
            SymbolSum lhs = SymbolSum(sys.j_dual[i].shift(ej) * sys.j_dual[j]) * gerbe.alpha(i, j);
            SymbolSum rhs = SymbolSum(sys.j_dual[j].shift(ei) * sys.j_dual[i]);
            Residual r = residual(lhs, rhs);
            record(rep.failures, rep.cocycle, r, tol, "twisted cocycle (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
        SymbolForm J = SymbolForm::function(SymbolSum(sys.j_dual[i]));
        SymbolForm dJinv = exterior_d(SymbolSum(sys.j_dual[i].reciprocal()));
        SymbolForm rhs = sys.omega_dual + wedge_star(J, dJinv, zero) - gerbe.zero_conn[i] * (2.0 * PI * I_UNIT);
        record(rep.failures, rep.connection, residual(sys.omega_dual.shift(ei), rhs), tol,
               "connection shift " + std::to_string(i));
    }
    rep.pass = rep.failures.empty();
    return rep;
}

SymbolForm dual_curvature_closed_form(const BundleParams& params) {
    const int n = params.n;
    RMat At = deformed_param(params.Acal, params.theta);
    RMat M = At * params.theta * At.transpose();
    RMat N = params.A.transpose() * params.theta * params.A;
    CMat K = CMat::Zero(2 * n, 2 * n);
    K.topLeftCorner(n, n) = (I_UNIT / (4.0 * PI)) * M.cast<cplx>() + PI * I_UNIT * N.cast<cplx>();
    return SymbolForm::constant_two_form(n, K);
}

DualCurvature dual_curvature(const TwistedLocalSystem& sys, const GerbeDatum& gerbe, const MirrorTorus& mirror,
                             const Tol& tol) {
    const int n = sys.n;
    if (gerbe.n != n || mirror.n != n) fail(ErrorCode::ContextMismatch, "carrier dimensions differ");
    DualCurvature out;
    SymbolForm d_omega = exterior_d(sys.omega_dual);
    out.Omega = d_omega + wedge_star(sys.omega_dual, sys.omega_dual, zero_theta(n)) + gerbe.one_conn;
    out.closed_form = dual_curvature_closed_form(sys.params);
    out.residual = residual(out.Omega, out.closed_form);
    SymbolForm restricted = restrict_to_lagrangian(mirror_b_form(mirror), sys.params.A) * (2.0 * PI * I_UNIT);
    out.generalized_condition_pass = residual(out.Omega - d_omega, restricted).ok(tol);
    return out;
}

CheckReport fm_gerbe_pullback_check(const RMat& A, const RMat& theta, const Tol& tol) {
    const int n = static_cast<int>(A.rows());
    require_square(A, n, "A");
    if (std::abs(A.determinant()) < 0.5) fail(ErrorCode::SingularSlope, "A must be invertible");
    BundleParams bp = BundleParams::standard(n);
    bp.A = A;
    bp.theta = theta;
    bp.tau = theta;
    GerbeDatum global = make_gerbe(GerbeKind::tau1_dual, bp);
    GerbeDatum local = make_gerbe(GerbeKind::dual_theta, bp);
    CheckReport rep;

    // xv -> (xv, A xv + p) -> (A xv + p, -xv)
    CMat Phi = CMat::Zero(2 * n, 2 * n);
    Phi.topLeftCorner(n, n) = A.cast<cplx>();
    Phi.bottomLeftCorner(n, n) = -CMat::Identity(n, n);
    CMat K = Phi.transpose() * global.one_conn.constant_matrix() * Phi;
    SymbolForm pulled = SymbolForm::constant_two_form(n, K * 0.5);
    record(rep.failures, rep.residual, residual(pulled, local.one_conn), tol, "pulled back 1-connection");

    std::vector<RVec> images;
    std::vector<SymbolSum> xi;
    for (int i = 0; i < n; ++i) {
        RVec img = RVec::Zero(2 * n);
        img.head(n) = A.col(i);
        images.push_back(img);
        CVec l = CVec::Zero(2 * n);
        l.head(n) = -PI * I_UNIT * (theta.transpose() * A.col(i)).cast<cplx>();
        xi.push_back(exp_linear(n, l));
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            SymbolSum lhs = xi[i].shift(images[j]) * xi[j] * local.alpha(i, j);
            SymbolSum rhs = xi[j].shift(images[i]) * xi[i];
            record(rep.failures, rep.residual, residual(lhs, rhs), tol,
                   "pulled back alpha(" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
    rep.pass = rep.failures.empty();
    return rep;
}

}  // namespace ncsyz
