#include "ncsyz/gcs.hpp"

#include <random>
#include <sstream>

namespace ncsyz {

namespace {

struct XY {
    RMat X, Y, Yi;
};

XY split_period(const CMat& T) {
    const int n = static_cast<int>(T.rows());
    if (T.cols() != n) fail(ErrorCode::DimensionMismatch, "T must be square");
    XY s{T.real(), T.imag(), RMat()};
    Eigen::FullPivLU<RMat> lu(s.Y);
    if (!lu.isInvertible()) fail(ErrorCode::SingularT, "Im T is singular");
    if (!is_positive_definite(RMat(0.5 * (s.Y + s.Y.transpose()))))
        fail(ErrorCode::SingularT, "Im T must be positive definite");
    s.Yi = lu.inverse();
    return s;
}

RMat pairing(int n) {
    RMat P = RMat::Zero(4 * n, 4 * n);
    P.topRightCorner(2 * n, 2 * n).setIdentity();
    P.bottomLeftCorner(2 * n, 2 * n).setIdentity();
    return P;
}

RMat conj(const RMat& M, const RMat& J) { return M * J * M.fullPivLu().inverse(); }

RMat fm_complex_matrix(int n) {
    RMat I = eye(n), O = zeros(n, n);
    return blocks(std::vector<std::vector<RMat>>{{O, O, O, I}, {O, O, RMat(-I), O}, {O, I, O, O}, {RMat(-I), O, O, O}});
}

RMat fm_symplectic_matrix(int n) {
    RMat I = eye(n), O = zeros(n, n);
    return blocks(std::vector<std::vector<RMat>>{{O, I, O, O}, {RMat(-I), O, O, O}, {O, O, O, I}, {O, O, RMat(-I), O}});
}

class Tracker {
public:
    explicit Tracker(IdentityReport& r, double tol) : rep_(r), tol_(tol) {}
    void equal(const RMat& a, const RMat& b, const std::string& what) {
        double res = max_abs(RMat(a - b));
        double scale = std::max({1.0, max_abs(a), max_abs(b)});
        rep_.max_entry_residual = std::max(rep_.max_entry_residual, res);
        if (res >= tol_ * scale) {
            std::ostringstream os;
            os << what << ": residual " << res;
            rep_.failures.push_back(os.str());
        }
    }
    void require(bool ok, const std::string& what) {
        if (!ok) rep_.failures.push_back(what);
    }

private:
    IdentityReport& rep_;
    double tol_;
};

RMat random_tau_t_symmetric(std::mt19937_64& rng, const CMat& T) {
    const int n = static_cast<int>(T.rows());
    RMat X = T.real(), Y = T.imag();
    int pairs = n * (n - 1) / 2;
    RMat C = RMat::Zero(std::max(1, 2 * pairs), n * n);
    int row = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            // (tau^t M)_ab - (tau^t M)_ba with tau(k, a) at column a * n + k
            for (int k = 0; k < n; ++k) {
                C(row, a * n + k) += X(k, b);
                C(row, b * n + k) -= X(k, a);
                C(row + 1, a * n + k) += Y(k, b);
                C(row + 1, b * n + k) -= Y(k, a);
            }
            row += 2;
        }
    RMat K = C.fullPivLu().kernel();
    RVec coef = random_vector(rng, static_cast<int>(K.cols()), -1.0, 1.0);
    RVec v = K * coef;
    RMat tau(n, n);
    for (int a = 0; a < n; ++a)
        for (int k = 0; k < n; ++k) tau(k, a) = v(a * n + k);
    return tau;
}

}  // namespace

const char* transform_kind_name(TransformKind k) {
    switch (k) {
        case TransformKind::mirror: return "mirror";
        case TransformKind::beta: return "beta";
        case TransformKind::bfield_tau1: return "bfield_tau1";
        case TransformKind::bfield_tau2: return "bfield_tau2";
        case TransformKind::fm_complex: return "fm_complex";
        case TransformKind::fm_symplectic: return "fm_symplectic";
    }
    return "?";
}

GCStructure build_IT(const CMat& T) {
    XY s = split_period(T);
    const int n = static_cast<int>(T.rows());
    const RMat &X = s.X, &Y = s.Y, &Yi = s.Yi;
    RMat O = zeros(n, n);
    RMat J = blocks(std::vector<std::vector<RMat>>{
        {RMat(-X * Yi), RMat(-Y - X * Yi * X), O, O},
        {Yi, RMat(Yi * X), O, O},
        {O, O, RMat(Yi.transpose() * X.transpose()), RMat(-Yi.transpose())},
        {O, O, RMat(Y.transpose() + X.transpose() * Yi.transpose() * X.transpose()), RMat(-X.transpose() * Yi.transpose())}});
    return {n, J};
}

GCStructure build_mirror_IT(const CMat& T) {
    XY s = split_period(T);
    const int n = static_cast<int>(T.rows());
    const RMat &X = s.X, &Y = s.Y, &Yi = s.Yi;
    RMat O = zeros(n, n);
    RMat J = blocks(std::vector<std::vector<RMat>>{
        {RMat(-X * Yi), O, O, RMat(-Y - X * Yi * X)},
        {O, RMat(-X.transpose() * Yi.transpose()), RMat(Y.transpose() + X.transpose() * Yi.transpose() * X.transpose()), O},
        {O, RMat(-Yi.transpose()), RMat(Yi.transpose() * X.transpose()), O},
        {Yi, O, O, RMat(Yi * X)}});
    return {n, J};
}

GcsAxioms gcs_axioms(const GCStructure& J) {
    const int d = 4 * J.n;
    RMat P = pairing(J.n);
    return {max_abs(RMat(J.J * J.J + RMat::Identity(d, d))), max_abs(RMat(J.J.transpose() * P * J.J - P))};
}

RMat block_shear(int n, int r, int c, const RMat& t) {
    RMat M = RMat::Identity(4 * n, 4 * n);
    M.block(r * n, c * n, n, n) = t;
    return M;
}

RMat mirror_matrix(int n) {
    RMat I = eye(n), O = zeros(n, n);
    return blocks(std::vector<std::vector<RMat>>{{I, O, O, O}, {O, O, O, I}, {O, O, I, O}, {O, I, O, O}});
}

RMat tau2_shear(const RMat& t) {
    const int n = static_cast<int>(t.rows());
    RMat M = RMat::Identity(4 * n, 4 * n);
    M.block(2 * n, n, n, n) = t;
    M.block(3 * n, 0, n, n) = -t.transpose();
    return M;
}

Transform mirror_transform(int n) { return {TransformKind::mirror, mirror_matrix(n)}; }

Transform beta_transform(const RMat& theta) {
    const int n = static_cast<int>(theta.rows());
    require_antisymmetric(theta, n, "theta");
    return {TransformKind::beta, block_shear(n, 1, 3, RMat(-theta))};
}

Transform bfield_tau1_transform(const RMat& tau) {
    const int n = static_cast<int>(tau.rows());
    require_antisymmetric(tau, n, "tau");
    return {TransformKind::bfield_tau1, block_shear(n, 2, 0, RMat(-tau))};
}

Transform bfield_tau2_transform(const RMat& tau) {
    const int n = static_cast<int>(tau.rows());
    require_square(tau, n, "tau");
    return {TransformKind::bfield_tau2, tau2_shear(RMat(-tau))};
}

Transform fm_complex_transform(int n) { return {TransformKind::fm_complex, fm_complex_matrix(n)}; }
Transform fm_symplectic_transform(int n) { return {TransformKind::fm_symplectic, fm_symplectic_matrix(n)}; }

GCStructure apply_transform(const GCStructure& J, const Transform& t) {
    if (t.M.rows() != J.J.rows() || t.M.cols() != J.J.cols())
        fail(ErrorCode::DimensionMismatch, "transform and structure differ in size");
    return {J.n, conj(t.M, J.J)};
}

const std::vector<std::string>& identity_names() {
    static const std::vector<std::string> names = {"beta_mirror",      "fm_as_bfield",     "fm_mirror_compat",
                                                   "gcs_axioms",       "gcs_factorization", "gcs_mirror",
                                                   "tau1_preserve_iff", "tau2_preserve_iff"};
    return names;
}

IdentityReport verify_identity(const std::string& name, const IdentityParams& params) {
    const CMat& T = params.T;
    const int n = static_cast<int>(T.rows());
    IdentityReport rep;
    rep.name = name;
    Tracker tr(rep, params.tol);
    RMat theta = params.theta.size() ? params.theta : RMat::Zero(n, n);
    RMat tau = params.tau.size() ? params.tau : RMat::Zero(n, n);
    GCStructure IT = build_IT(T);
    GCStructure IC = build_mirror_IT(T);
    RMat M = mirror_matrix(n);

    if (name == "gcs_axioms") {
        for (const auto* J : {&IT, &IC}) {
            tr.equal(RMat(J->J * J->J), RMat(-RMat::Identity(4 * n, 4 * n)), "J^2 = -I");
            RMat P = pairing(n);
            tr.equal(RMat(J->J.transpose() * P * J->J), P, "pairing");
        }
    } else if (name == "gcs_mirror") {
        tr.equal(RMat(M * IT.J * M), IC.J, "M I_T M");
        tr.equal(RMat(M * M), eye(4 * n), "M^2 = I");
    } else if (name == "gcs_factorization") {
        XY s = split_period(T);
        const RMat &X = s.X, &Y = s.Y, &Yi = s.Yi;
        RMat S = RMat(Y + X * Yi * X).fullPivLu().inverse().transpose();
        RMat R = -S * X.transpose() * Yi.transpose();
        RMat W = S;
        CMat target = -CMat(T.fullPivLu().inverse()).transpose();
        tr.equal(R, target.real(), "Re(-T^{-t})");
        tr.equal(W, target.imag(), "Im(-T^{-t})");
        RMat O = zeros(n, n), I = eye(n);
        RMat Wi = W.fullPivLu().inverse();
        RMat f1 = blocks(std::vector<std::vector<RMat>>{{I, O, O, O}, {O, I, O, O}, {O, RMat(-R), I, O}, {RMat(R.transpose()), O, O, I}});
        RMat f2 = blocks(std::vector<std::vector<RMat>>{
            {O, O, O, RMat(-Wi.transpose())}, {O, O, Wi, O}, {O, RMat(-W), O, O}, {RMat(W.transpose()), O, O, O}});
        RMat f3 = blocks(std::vector<std::vector<RMat>>{{I, O, O, O}, {O, I, O, O}, {O, R, I, O}, {RMat(-R.transpose()), O, O, I}});
        tr.equal(RMat(f1 * f2 * f3), IC.J, "factorized mirror structure");
    } else if (name == "beta_mirror") {
        require_antisymmetric(theta, n, "theta");
        GCStructure ITth = apply_transform(IT, beta_transform(theta));
        RMat N = block_shear(n, 3, 1, theta);
        RMat ICth = conj(RMat(N.fullPivLu().inverse()), IC.J);
        tr.equal(RMat(M * ITth.J * M), ICth, "mirror of the beta transform");
        tr.equal(RMat(M * block_shear(n, 1, 3, theta) * M), N, "conjugated beta block");
        GcsAxioms ax = gcs_axioms(ITth);
        tr.require(ax.square < params.tol && ax.pairing < params.tol, "beta transform leaves the GCS axioms");
    } else if (name == "fm_mirror_compat" || name == "fm_as_bfield") {
        require_antisymmetric(theta, n, "theta");
        RMat F = fm_complex_matrix(n), G = fm_symplectic_matrix(n);
        RMat ITth = apply_transform(IT, beta_transform(theta)).J;
        RMat N = block_shear(n, 3, 1, theta);
        RMat ICth = conj(RMat(N.fullPivLu().inverse()), IC.J);
        if (name == "fm_mirror_compat") {
            tr.equal(RMat(M * conj(F, IT.J) * M), conj(G, IC.J), "untwisted compatibility");
            tr.equal(RMat(M * conj(F, ITth) * M), conj(G, ICth), "twisted compatibility");
        } else {
            RMat K = block_shear(n, 2, 0, RMat(-theta));
            tr.equal(conj(G, ICth), conj(K, conj(G, IC.J)), "symplectic side");
            tr.equal(conj(F, ITth), conj(K, conj(F, IT.J)), "complex side");
        }
    } else if (name == "tau1_preserve_iff") {
        require_antisymmetric(tau, n, "tau");
        std::mt19937_64 rng(params.seed);
        tr.equal(conj(bfield_tau1_transform(RMat::Zero(n, n)).M, IT.J), IT.J, "tau = O");
        for (int k = 0; k <= params.samples; ++k) {
            RMat t = k == 0 ? tau : random_antisymmetric(rng, n, 1.0);
            if (max_abs(t) < 1e-12) continue;
            double res = max_abs(RMat(conj(bfield_tau1_transform(t).M, IT.J) - IT.J));
            if (res <= 1e-6) {
                std::ostringstream os;
                os << "nonzero tau preserves the structure, residual " << res;
                rep.failures.push_back(os.str());
            }
        }
    } else if (name == "tau2_preserve_iff") {
        require_square(tau, n, "tau");
        std::mt19937_64 rng(params.seed);
        for (int k = 0; k <= 2 * params.samples; ++k) {
            RMat t = k == 0 ? tau : (k % 2 ? random_tau_t_symmetric(rng, T) : random_matrix(rng, n, n, 1.0));
            CMat tT = t.transpose().cast<cplx>() * T;
            double asym = max_abs(CMat(tT - tT.transpose()));
            bool sym = asym <= params.tol * std::max(1.0, max_abs(tT));
            double res = max_abs(RMat(conj(bfield_tau2_transform(t).M, IT.J) - IT.J));
            bool preserved = res <= params.tol * std::max(1.0, max_abs(IT.J) * (1.0 + max_abs(t)) * (1.0 + max_abs(t)));
            if (sym) rep.max_entry_residual = std::max(rep.max_entry_residual, res);
            if (sym != preserved) {
                std::ostringstream os;
                os << "sample " << k << ": tau^t T symmetric = " << sym << " but residual " << res;
                rep.failures.push_back(os.str());
            }
        }
    } else {
        fail(ErrorCode::UnknownIdentity, "unknown identity '" + name + "'");
    }
    rep.pass = rep.failures.empty();
    return rep;
}

}  // namespace ncsyz
