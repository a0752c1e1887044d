#include "ncsyz/modsyz.hpp"

#include <algorithm>
#include <cmath>

#include "ncsyz/theta_sections.hpp"

namespace ncsyz {

namespace {

void check_context(const ModuliContext& c, int n) {
    require_square(c.A, n, "A");
    require_symmetric(c.Acal, n, "Acal");
    require_antisymmetric(c.theta, n, "theta");
}

bool same_context(const ModuliContext& a, const ModuliContext& b) {
    return a.A.rows() == b.A.rows() && a.A == b.A && a.Acal == b.Acal && a.theta == b.theta;
}

RMat invertible_deformation(const ModuliContext& c) {
    RMat P = moduli_deformation(c.Acal, c.theta);
    Eigen::FullPivLU<RMat> lu(P);
    if (!lu.isInvertible() || std::abs(P.determinant()) < 1e-12)
        fail(ErrorCode::SingularDeformation, "I - (theta Acal / 2pi)^2 is singular");
    return P;
}

}  // namespace

const char* side_name(Side s) { return s == Side::holo ? "holo" : "symp"; }

ModuliPoint make_moduli_point(const RVec& p, const RVec& q, Side side, const ModuliContext& ctx) {
    const int n = static_cast<int>(p.size());
    if (q.size() != n) fail(ErrorCode::DimensionMismatch, "p and q differ in length");
    check_context(ctx, n);
    return ModuliPoint{p, q, side, ctx};
}

RMat moduli_deformation(const RMat& Acal, const RMat& theta) {
    const int n = static_cast<int>(theta.rows());
    RMat ta = theta * Acal / (2.0 * PI);
    return RMat::Identity(n, n) - ta * ta;
}

LatticeBasis holo_lattice(const RMat& A, const RMat& Acal, const RMat& theta) {
    const int n = static_cast<int>(A.rows());
    deformed_param(Acal, theta);
    RMat Pt = moduli_deformation(Acal, theta).transpose();
    RMat basis = blocks(std::vector<std::vector<RMat>>{{Pt, zeros(n, n)}, {RMat(-A.transpose() * theta * Pt), eye(n)}});
    return LatticeBasis(basis);
}

bool moduli_equiv(const ModuliPoint& x, const ModuliPoint& y, const Tol& tol) {
    if (x.side != y.side || !same_context(x.context, y.context) || x.p.size() != y.p.size())
        fail(ErrorCode::ContextMismatch, "moduli points live in different moduli spaces");
    const int n = static_cast<int>(x.p.size());
    RVec d(2 * n);
    d << y.p - x.p, y.q - x.q;
    if (x.side == Side::symp) return near_integer(RMat(d), tol);
    LatticeBasis L = holo_lattice(x.context.A, x.context.Acal, x.context.theta);
    return lattice_member(d, L, tol).inside;
}

ModuliPoint syz_map(const ModuliPoint& x) {
    const ModuliContext& c = x.context;
    RMat P = invertible_deformation(c);
    ModuliPoint y = x;
    if (x.side == Side::symp) {
        y.p = P.transpose() * x.p;
        y.q = -c.A.transpose() * c.theta * P.transpose() * x.p + x.q;
        y.side = Side::holo;
    } else {
        y.p = P.transpose().fullPivLu().solve(x.p);
        y.q = c.A.transpose() * c.theta * x.p + x.q;
        y.side = Side::symp;
    }
    return y;
}

ModuliPoint canonical(const ModuliPoint& x) {
    const int n = static_cast<int>(x.p.size());
    RVec v(2 * n);
    v << x.p, x.q;
    RMat basis = x.side == Side::symp ? eye(2 * n) : holo_lattice(x.context.A, x.context.Acal, x.context.theta).basis();
    RVec r = canonical_representative(v, LatticeBasis(basis));
    ModuliPoint y = x;
    y.p = r.head(n);
    y.q = r.tail(n);
    return y;
}

bool curvature_match(const RMat& Acal, const RMat& Bcal, const RMat& theta, const Tol& tol) {
    RMat a = Acal * theta * Acal, b = Bcal * theta * Bcal;
    double scale = std::max(max_abs(a), max_abs(b));
    return max_abs(RMat(a - b)) <= tol.window(scale);
}

IntersectionReport intersection_points(const RMat& A, const RVec& p) {
    const int n = static_cast<int>(A.rows());
    require_integer(A, n, "A");
    if (p.size() != n) fail(ErrorCode::DimensionMismatch, "p has the wrong length");
    if (std::abs(A.determinant()) < 0.5) fail(ErrorCode::SingularSlope, "A must be invertible");
    RMat Ar = round_matrix(A);
    Eigen::FullPivLU<RMat> lu(Ar);
    IntersectionReport rep;
    for (const IVec& m : residue_classes(Ar)) {
        RVec x = lu.solve(RVec(m.cast<double>() - p));
        for (int i = 0; i < n; ++i) {
            x(i) -= std::floor(x(i));
            if (x(i) >= 1.0 - 1e-12) x(i) = 0.0;
        }
        rep.points.push_back(x);
    }
    std::sort(rep.points.begin(), rep.points.end(), [](const RVec& a, const RVec& b) {
        return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
    });
    rep.count = static_cast<int>(rep.points.size());
    return rep;
}

}  // namespace ncsyz
