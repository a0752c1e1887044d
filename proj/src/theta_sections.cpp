#include "ncsyz/theta_sections.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "ncsyz/parallel.hpp"

namespace ncsyz {

namespace {

std::vector<IVec> reduce_box(const RMat& A, const Eigen::FullPivLU<RMat>& lu, int side) {
    const int n = static_cast<int>(A.rows());
    std::set<std::vector<int>> seen;
    std::vector<int> m(n, 0);
    for (;;) {
        RVec mv(n);
        for (int i = 0; i < n; ++i) mv(i) = m[i];
        RVec c = lu.solve(mv);
        for (int i = 0; i < n; ++i) c(i) = std::floor(c(i) + 1e-9);
        RVec r = mv - A * c;
        std::vector<int> key(n);
        for (int i = 0; i < n; ++i) key[i] = static_cast<int>(std::lround(r(i)));
        seen.insert(key);
        int i = 0;
        while (i < n && ++m[i] == side) m[i++] = 0;
        if (i == n) break;
    }
    std::vector<IVec> out;
    for (const auto& k : seen) out.push_back(Eigen::Map<const IVec>(k.data(), n));
    return out;
}

// term l of residue m without the coefficient; also returns log-derivative data when asked
struct Term {
    cplx value;
    RVec k;
    RVec centre;
};

Term term(const ThetaSection& s, const RVec& m, const RVec& l, const RVec& x, const RVec& y,
          const Eigen::FullPivLU<RMat>& lu) {
    RVec k = -s.A * l + m;
    RVec c = lu.solve(RVec(k - s.p_gauss));
    RVec d = x - c;
    double gauss = -PI * d.dot(s.A * d);
    double phase = -2.0 * PI * (x + l).dot(s.q) + 2.0 * PI * k.dot(y) - PI * k.dot(s.theta * s.A * x);
    return {std::exp(cplx(gauss, phase)), k, c};
}

template <class Fn>
void for_each_l(int n, int radius, Fn&& fn) {
    std::vector<int> l(n, -radius);
    RVec lv(n);
    for (;;) {
        for (int i = 0; i < n; ++i) lv(i) = l[i];
        fn(lv);
        int i = 0;
        while (i < n && ++l[i] > radius) l[i++] = -radius;
        if (i == n) break;
    }
}

}  // namespace

std::vector<IVec> residue_classes(const RMat& A) {
    const int n = static_cast<int>(A.rows());
    require_square(A, n, "A");
    double det = A.determinant();
    if (std::abs(det) < 0.5) fail(ErrorCode::SingularSlope, "A must be invertible");
    Eigen::FullPivLU<RMat> lu(A);
    long count = std::lround(std::abs(det));
    int side = std::max(1, static_cast<int>(std::ceil(A.cwiseAbs().rowwise().sum().maxCoeff() * n)));
    std::vector<IVec> out = reduce_box(A, lu, side);
    if (static_cast<long>(out.size()) != count) out = reduce_box(A, lu, static_cast<int>(count));
    if (static_cast<long>(out.size()) != count) fail(ErrorCode::PreconditionFailed, "residue enumeration failed");
    return out;
}

ThetaSection theta_section(const RMat& A, const RVec& p, const RVec& q, const std::vector<cplx>& C, int N,
                           const RMat& theta, const CMat& T) {
    const int n = static_cast<int>(A.rows());
    if (T.rows() != n || T.cols() != n || max_abs(CMat(T - standard_period(n))) > 1e-12)
        fail(ErrorCode::UnsupportedT, "theta sections are implemented for T = iI only");
    if (!is_positive_definite(A) || !near_integer(A))
        fail(ErrorCode::NotPositiveDefinite, "A must be a symmetric positive definite integer matrix");
    if (N < 1) fail(ErrorCode::PreconditionFailed, "truncation radius must be at least 1");
    require_antisymmetric(theta, n, "theta");
    ThetaSection s;
    s.n = n;
    s.A = round_matrix(A);
    s.p = p;
    s.q = q;
    s.p_gauss = p;
    s.theta = theta;
    s.N = N;
    s.residues = residue_classes(s.A);
    if (C.size() != s.residues.size()) fail(ErrorCode::DimensionMismatch, "one coefficient per residue class");
    s.C = C;
    return s;
}

ThetaSection basis_section(const RMat& A, const RVec& p, const RVec& q, int r, int N, const RMat& theta,
                           const CMat& T) {
    std::vector<cplx> C(residue_classes(A).size(), 0.0);
    C.at(r) = 1.0;
    return theta_section(A, p, q, C, N, theta, T);
}

cplx eval_section(const ThetaSection& s, const RVec& x, const RVec& y, int radius) {
    if (radius < 0) radius = s.N;
    Eigen::FullPivLU<RMat> lu(s.A);
    cplx total = 0.0;
    for (size_t r = 0; r < s.residues.size(); ++r) {
        if (s.C[r] == cplx(0.0, 0.0)) continue;
        RVec m = s.residues[r].cast<double>();
        cplx acc = 0.0;
        for_each_l(s.n, radius, [&](const RVec& l) { acc += term(s, m, l, x, y, lu).value; });
        total += s.C[r] * acc;
    }
    return total;
}

CVec dbar_section(const ThetaSection& s, const RVec& x, const RVec& y) {
    const int n = s.n;
    Eigen::FullPivLU<RMat> lu(s.A);
    CMat T = standard_period(n);
    CMat Q = antiholomorphic_projector(T);
    CVec out = CVec::Zero(2 * n);
    RMat AthA = s.A.transpose() * s.theta * s.A;
    for (size_t r = 0; r < s.residues.size(); ++r) {
        if (s.C[r] == cplx(0.0, 0.0)) continue;
        RVec m = s.residues[r].cast<double>();
        for_each_l(n, s.N, [&](const RVec& l) {
            Term t = term(s, m, l, x, y, lu);
            CVec u(2 * n);
            // d log(term) + omega
            u.head(n) = (-2.0 * PI * (s.A * (x - t.centre))).cast<cplx>() - 2.0 * PI * I_UNIT * s.q.cast<cplx>() -
                        PI * I_UNIT * (s.theta * s.A).transpose().cast<cplx>() * t.k.cast<cplx>() +
                        PI * I_UNIT * (AthA.transpose() * x).cast<cplx>();
            u.tail(n) = 2.0 * PI * I_UNIT * t.k.cast<cplx>() -
                        2.0 * PI * I_UNIT * ((s.A * x + s.p).cast<cplx>() + T.transpose() * s.q.cast<cplx>());
            out += s.C[r] * t.value * (Q * u);
        });
    }
    return out;
}

std::vector<cplx> eval_section_batch(const ThetaSection& s, const std::vector<RVec>& points, Exec exec) {
    std::vector<cplx> out(points.size());
    for_each_index(exec == Exec::parallel, static_cast<long>(points.size()), [&](long i) {
        out[i] = eval_section(s, points[i].head(s.n), points[i].tail(s.n));
    });
    return out;
}

SectionReport verify_section(const ThetaSection& s, int samples, double tol, std::uint64_t seed, Exec exec) {
    const int n = s.n;
    SectionReport rep;
    std::mt19937_64 rng(seed);
    std::vector<RVec> pts;
    for (int i = 0; i < samples; ++i) pts.push_back(random_vector(rng, 2 * n, 0.0, 1.0));
    const bool check_dbar = is_zero(s.theta, Tol{0.0, 0.0});
    rep.dbar_checked = check_dbar;

    struct Sample {
        double automorphy = 0.0, dbar = 0.0, trunc = 0.0, scale = 0.0;
    };
    std::vector<Sample> res(pts.size());
    for_each_index(exec == Exec::parallel, static_cast<long>(pts.size()), [&](long idx) {
        RVec x = pts[idx].head(n), y = pts[idx].tail(n);
        Sample sm;
        cplx base = eval_section(s, x, y);
        sm.scale = std::abs(base);
        sm.trunc = std::abs(base - eval_section(s, x, y, s.N + 2));
        for (int i = 0; i < n; ++i) {
            RVec ei = RVec::Zero(n);
            ei(i) = 1.0;
            // j(e_i) * xi = j . xi(x, y - theta A e_i / 2)
            RVec Ae = s.A * ei;
            cplx j = std::exp(cplx(0.0, -PI * ei.dot(s.A.transpose() * s.theta * s.A * x) + 2.0 * PI * Ae.dot(y)));
            cplx lhs = j * eval_section(s, x, RVec(y - 0.5 * s.theta * Ae));
            cplx rhs = eval_section(s, RVec(x + ei), y);
            sm.trunc = std::max(sm.trunc, std::abs(rhs - eval_section(s, RVec(x + ei), y, s.N + 2)));
            sm.automorphy = std::max(sm.automorphy, std::abs(lhs - rhs));
            sm.scale = std::max({sm.scale, std::abs(lhs), std::abs(rhs)});
            cplx shifted = eval_section(s, x, RVec(y + ei));
            sm.automorphy = std::max(sm.automorphy, std::abs(shifted - base));
        }
        if (check_dbar) sm.dbar = dbar_section(s, x, y).cwiseAbs().maxCoeff();
        res[idx] = sm;
    });
    for (const auto& sm : res) {
        rep.automorphy_residual = std::max(rep.automorphy_residual, sm.automorphy);
        rep.dbar_residual = std::max(rep.dbar_residual, sm.dbar);
        rep.truncation_error = std::max(rep.truncation_error, sm.trunc);
        rep.scale = std::max(rep.scale, sm.scale);
    }
    double window = tol * std::max(1.0, rep.scale);
    if (rep.truncation_error >= window / 10.0) {
        std::ostringstream os;
        os << "truncation radius " << s.N << " leaves error " << rep.truncation_error;
        fail(ErrorCode::TruncationInsufficient, os.str());
    }
    if (rep.automorphy_residual > window) rep.failures.push_back("quasi-periodicity residual exceeds tolerance");
    // the dbar coefficients carry factors up to 2 pi |A| relative to the section
    double dbar_window = window * 2.0 * PI * std::max(1.0, max_abs(s.A) * n);
    if (check_dbar && rep.dbar_residual > dbar_window) rep.failures.push_back("dbar relation residual exceeds tolerance");
    rep.pass = rep.failures.empty();
    return rep;
}

}  // namespace ncsyz
