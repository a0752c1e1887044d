#include "ncsyz/matcore.hpp"

#include <cmath>
#include <sstream>

namespace ncsyz {

const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::SingularBasis: return "SingularBasis";
        case ErrorCode::SingularT: return "SingularT";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::SingularDeformation: return "SingularDeformation";
        case ErrorCode::SingularSlope: return "SingularSlope";
        case ErrorCode::MoyalNotClosed: return "MoyalNotClosed";
        case ErrorCode::DegreeOverflow: return "DegreeOverflow";
        case ErrorCode::HypothesisViolated: return "HypothesisViolated";
        case ErrorCode::UnsupportedT: return "UnsupportedT";
        case ErrorCode::TruncationInsufficient: return "TruncationInsufficient";
        case ErrorCode::PreconditionFailed: return "PreconditionFailed";
        case ErrorCode::IntegralityViolated: return "IntegralityViolated";
        case ErrorCode::ContextMismatch: return "ContextMismatch";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::UnknownIdentity: return "UnknownIdentity";
        case ErrorCode::ValidationError: return "ValidationError";
    }
    return "Error";
}

bool is_symmetric(const RMat& m, const Tol& tol) {
    if (m.rows() != m.cols()) return false;
    return max_abs(RMat(m - m.transpose())) <= tol.window(max_abs(m));
}

bool is_symmetric(const CMat& m, const Tol& tol) {
    if (m.rows() != m.cols()) return false;
    return max_abs(CMat(m - m.transpose())) <= tol.window(max_abs(m));
}

bool is_antisymmetric(const RMat& m, const Tol& tol) {
    if (m.rows() != m.cols()) return false;
    return max_abs(RMat(m + m.transpose())) <= tol.window(max_abs(m));
}

bool is_zero(const RMat& m, const Tol& tol) { return max_abs(m) <= tol.abs; }

bool is_positive_definite(const RMat& m, const Tol& tol) {
    if (!is_symmetric(m, tol)) return false;
    Eigen::LLT<RMat> llt(0.5 * (m + m.transpose()));
    return llt.info() == Eigen::Success;
}

double integer_distance(const RMat& m) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        double v = m.data()[i];
        d = std::max(d, std::abs(v - std::round(v)));
    }
    return d;
}

bool near_integer(const RMat& m, const Tol& tol) {
    return integer_distance(m) <= tol.window(max_abs(m));
}

RMat round_matrix(const RMat& m) { return m.array().round().matrix(); }

RMat require_square(const RMat& m, int n, const std::string& what) {
    if (m.rows() != n || m.cols() != n) {
        std::ostringstream os;
        os << what << " must be " << n << "x" << n << ", got " << m.rows() << "x" << m.cols();
        fail(ErrorCode::DimensionMismatch, os.str());
    }
    return m;
}

RMat require_antisymmetric(const RMat& m, int n, const std::string& what, const Tol& tol) {
    require_square(m, n, what);
    if (!is_antisymmetric(m, tol)) fail(ErrorCode::PreconditionFailed, what + " must be antisymmetric");
    return 0.5 * (m - m.transpose());
}

RMat require_symmetric(const RMat& m, int n, const std::string& what, const Tol& tol) {
    require_square(m, n, what);
    if (!is_symmetric(m, tol)) fail(ErrorCode::PreconditionFailed, what + " must be symmetric");
    return 0.5 * (m + m.transpose());
}

RMat require_integer(const RMat& m, int n, const std::string& what, const Tol& tol) {
    require_square(m, n, what);
    if (!near_integer(m, tol)) fail(ErrorCode::PreconditionFailed, what + " must have integer entries");
    return round_matrix(m);
}

double condition_number(const RMat& m) {
    Eigen::JacobiSVD<RMat> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 1.0;
    double lo = s(s.size() - 1);
    return lo == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / lo;
}

double condition_number(const CMat& m) {
    Eigen::JacobiSVD<CMat> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 1.0;
    double lo = s(s.size() - 1);
    return lo == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / lo;
}

LatticeBasis::LatticeBasis(RMat basis, double max_condition) : basis_(std::move(basis)) {
    if (basis_.rows() != basis_.cols() || basis_.rows() == 0)
        fail(ErrorCode::SingularBasis, "lattice basis must be a non-empty square matrix");
    if (!basis_.allFinite()) fail(ErrorCode::SingularBasis, "lattice basis has non-finite entries");
    double cond = condition_number(basis_);
    if (!(cond <= max_condition)) {
        std::ostringstream os;
        os << "condition number " << cond << " exceeds " << max_condition;
        fail(ErrorCode::SingularBasis, os.str());
    }
    lu_.compute(basis_);
}

LatticeDecision lattice_member(const RVec& v, const LatticeBasis& lattice, const Tol& tol) {
    if (v.size() != lattice.dim()) fail(ErrorCode::DimensionMismatch, "vector and lattice dimensions differ");
    LatticeDecision d;
    d.real_coords = lattice.coordinates(v);
    IVec k(v.size());
    double worst = 0.0;
    double scale = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double r = std::round(d.real_coords(i));
        worst = std::max(worst, std::abs(d.real_coords(i) - r));
        scale = std::max(scale, std::abs(d.real_coords(i)));
        k(i) = static_cast<int>(r);
    }
    d.max_fractional = worst;
    // coordinates inherit the conditioning of the basis
    double cond = condition_number(lattice.basis());
    d.inside = worst <= tol.window(scale) * std::max(1.0, cond);
    if (d.inside) d.coords = k;
    return d;
}

RVec canonical_representative(const RVec& v, const LatticeBasis& lattice) {
    RVec c = lattice.coordinates(v);
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        c(i) -= std::floor(c(i));
        if (c(i) >= 1.0) c(i) = 0.0;
    }
    return lattice.basis() * c;
}

template <class M>
static M assemble(const std::vector<std::vector<M>>& rows) {
    Eigen::Index total_r = 0, total_c = 0;
    for (const auto& row : rows) total_r += row.front().rows();
    for (const auto& b : rows.front()) total_c += b.cols();
    M out(total_r, total_c);
    Eigen::Index r0 = 0;
    for (const auto& row : rows) {
        Eigen::Index c0 = 0;
        for (const auto& b : row) {
            if (b.rows() != row.front().rows()) fail(ErrorCode::DimensionMismatch, "ragged block row");
            out.block(r0, c0, b.rows(), b.cols()) = b;
            c0 += b.cols();
        }
        if (c0 != total_c) fail(ErrorCode::DimensionMismatch, "ragged block columns");
        r0 += row.front().rows();
    }
    return out;
}

RMat blocks(const std::vector<std::vector<RMat>>& rows) { return assemble(rows); }
CMat blocks(const std::vector<std::vector<CMat>>& rows) { return assemble(rows); }

RMat zeros(int r, int c) { return RMat::Zero(r, c); }
RMat eye(int n) { return RMat::Identity(n, n); }

RMat random_matrix(std::mt19937_64& rng, int r, int c, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    RMat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = u(rng);
    return m;
}

RMat random_antisymmetric(std::mt19937_64& rng, int n, double scale) {
    RMat m = random_matrix(rng, n, n, scale);
    return 0.5 * (m - m.transpose());
}

RMat random_symmetric(std::mt19937_64& rng, int n, double scale) {
    RMat m = random_matrix(rng, n, n, scale);
    return 0.5 * (m + m.transpose());
}

RMat random_spd(std::mt19937_64& rng, int n, double min_eig, double max_eig) {
    Eigen::HouseholderQR<RMat> qr(random_matrix(rng, n, n, 1.0));
    RMat q = qr.householderQ();
    std::uniform_real_distribution<double> u(min_eig, max_eig);
    RVec d(n);
    for (int i = 0; i < n; ++i) d(i) = u(rng);
    RMat s = q * d.asDiagonal() * q.transpose();
    return 0.5 * (s + s.transpose());
}

RMat random_integer_matrix(std::mt19937_64& rng, int n, int bound, bool invertible) {
    std::uniform_int_distribution<int> u(-bound, bound);
    for (;;) {
        RMat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = u(rng);
        if (!invertible || std::abs(m.determinant()) > 0.5) return m;
    }
}

RVec random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    RVec v(n);
    for (int i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

CMat random_period_matrix(std::mt19937_64& rng, int n) {
    RMat x = random_matrix(rng, n, n, 1.0);
    RMat y = random_spd(rng, n, 0.5, 2.0);
    CMat t(n, n);
    t.real() = x;
    t.imag() = y;
    return t;
}

}  // namespace ncsyz
