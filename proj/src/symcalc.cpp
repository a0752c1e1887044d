#include "ncsyz/symcalc.hpp"

#include <cmath>
#include <sstream>

namespace ncsyz {

namespace {

constexpr double kMergeTol = 1e-11;

double exponent_scale(const Symbol& s) {
    return std::max({1.0, max_abs(s.S()), max_abs(s.l())});
}

bool same_exponent(const Symbol& a, const Symbol& b) {
    double sc = std::max(exponent_scale(a), exponent_scale(b));
    return max_abs(CMat(a.S() - b.S())) <= kMergeTol * sc && max_abs(CVec(a.l() - b.l())) <= kMergeTol * sc;
}

void require_theta(const RMat& theta, int n) {
    if (theta.rows() != n || theta.cols() != n) fail(ErrorCode::DimensionMismatch, "theta must be n x n");
}

}  // namespace

Poly Poly::constant(int dim, cplx c) {
    Poly p(dim);
    p.add_term(MultiIndex(dim, 0), c);
    return p;
}

Poly Poly::variable(int dim, int k) {
    Poly p(dim);
    MultiIndex a(dim, 0);
    a[k] = 1;
    p.add_term(a, 1.0);
    return p;
}

Poly Poly::linear(int dim, const CVec& coeffs, cplx c0) {
    Poly p = constant(dim, c0);
    for (int k = 0; k < dim; ++k) {
        MultiIndex a(dim, 0);
        a[k] = 1;
        p.add_term(a, coeffs(k));
    }
    return p;
}

void Poly::add_term(const MultiIndex& a, cplx c) {
    if (static_cast<int>(a.size()) != dim_) fail(ErrorCode::DimensionMismatch, "multi-index length");
    if (c == cplx(0.0, 0.0)) return;
    auto it = terms_.find(a);
    if (it == terms_.end()) {
        terms_.emplace(a, c);
    } else {
        it->second += c;
        if (it->second == cplx(0.0, 0.0)) terms_.erase(it);
    }
}

int Poly::degree() const { return degree_in(0, dim_); }

int Poly::degree_in(int begin, int end) const {
    int d = 0;
    for (const auto& [a, c] : terms_) {
        int s = 0;
        for (int k = begin; k < end; ++k) s += a[k];
        d = std::max(d, s);
    }
    return d;
}

bool Poly::is_constant() const { return degree() == 0; }

cplx Poly::constant_term() const {
    auto it = terms_.find(MultiIndex(dim_, 0));
    return it == terms_.end() ? cplx(0.0, 0.0) : it->second;
}

double Poly::max_coeff() const {
    double m = 0.0;
    for (const auto& [a, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

Poly Poly::derivative(int k) const {
    Poly p(dim_);
    for (const auto& [a, c] : terms_) {
        if (a[k] == 0) continue;
        MultiIndex b = a;
        b[k] -= 1;
        p.add_term(b, c * static_cast<double>(a[k]));
    }
    return p;
}

cplx Poly::eval(const CVec& w) const {
    cplx s = 0.0;
    for (const auto& [a, c] : terms_) {
        cplx t = c;
        for (int k = 0; k < dim_; ++k)
            for (int e = 0; e < a[k]; ++e) t *= w(k);
        s += t;
    }
    return s;
}

Poly Poly::substitute(const CMat& P, const CVec& c) const {
    if (P.rows() != dim_ || P.cols() != dim_ || c.size() != dim_)
        fail(ErrorCode::DimensionMismatch, "substitution size");
    int deg = degree();
    std::vector<std::vector<Poly>> powers(dim_);
    for (int k = 0; k < dim_; ++k) {
        Poly lin = linear(dim_, CVec(P.row(k).transpose()), c(k));
        powers[k].push_back(constant(dim_, 1.0));
        for (int e = 1; e <= deg; ++e) powers[k].push_back(powers[k].back() * lin);
    }
    Poly out(dim_);
    for (const auto& [a, coef] : terms_) {
        Poly t = constant(dim_, coef);
        for (int k = 0; k < dim_; ++k)
            if (a[k] > 0) t = t * powers[k][a[k]];
        out += t;
    }
    return out;
}

Poly& Poly::operator+=(const Poly& o) {
    if (dim_ == 0) dim_ = o.dim_;
    if (o.dim_ != dim_ && !o.is_zero()) fail(ErrorCode::DimensionMismatch, "poly dimensions differ");
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (dim_ == 0) dim_ = o.dim_;
    if (o.dim_ != dim_ && !o.is_zero()) fail(ErrorCode::DimensionMismatch, "poly dimensions differ");
    for (const auto& [a, c] : o.terms_) add_term(a, -c);
    return *this;
}

Poly& Poly::operator*=(cplx s) {
    if (s == cplx(0.0, 0.0)) {
        terms_.clear();
        return *this;
    }
    for (auto& [a, c] : terms_) c *= s;
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.dim_ != b.dim_) fail(ErrorCode::DimensionMismatch, "poly dimensions differ");
    Poly p(a.dim_);
    for (const auto& [ia, ca] : a.terms_)
        for (const auto& [ib, cb] : b.terms_) {
            MultiIndex s(a.dim_);
            for (int k = 0; k < a.dim_; ++k) s[k] = ia[k] + ib[k];
            p.add_term(s, ca * cb);
        }
    return p;
}

Symbol::Symbol(int n)
    : n_(n), poly_(2 * n), S_(CMat::Zero(2 * n, 2 * n)), l_(CVec::Zero(2 * n)) {}

Symbol::Symbol(Poly poly, CMat S, CVec l, cplx kappa)
    : n_(static_cast<int>(S.rows()) / 2), poly_(std::move(poly)), S_(std::move(S)), l_(std::move(l)), kappa_(kappa) {
    if (S_.rows() != S_.cols() || S_.rows() % 2 != 0 || l_.size() != S_.rows() || poly_.dim() != S_.rows())
        fail(ErrorCode::DimensionMismatch, "symbol component sizes");
    S_ = 0.5 * (S_ + S_.transpose()).eval();
}

Symbol Symbol::constant(int n, cplx c) {
    Symbol s(n);
    s.poly_ = Poly::constant(2 * n, c);
    return s;
}

Symbol Symbol::polynomial(int n, Poly p) {
    Symbol s(n);
    if (p.dim() != 2 * n) fail(ErrorCode::DimensionMismatch, "poly dimension");
    s.poly_ = std::move(p);
    s.check_degree();
    return s;
}

Symbol Symbol::exp_quadratic(int n, const CMat& S, const CVec& l, cplx kappa) {
    return Symbol(Poly::constant(2 * n, 1.0), S, l, kappa);
}

Symbol Symbol::exp_blocks(int n, const CMat& Sxx, const CMat& Sxy, const CMat& Syy, const CVec& lx,
                          const CVec& ly, cplx kappa) {
    CMat S(2 * n, 2 * n);
    S.topLeftCorner(n, n) = 0.5 * (Sxx + Sxx.transpose());
    S.topRightCorner(n, n) = Sxy;
    S.bottomLeftCorner(n, n) = Sxy.transpose();
    S.bottomRightCorner(n, n) = 0.5 * (Syy + Syy.transpose());
    CVec l(2 * n);
    l << lx, ly;
    return exp_quadratic(n, S, l, kappa);
}

cplx Symbol::exponent_at(const CVec& w) const {
    return 0.5 * (w.transpose() * S_ * w)(0, 0) + (l_.transpose() * w)(0, 0) + kappa_;
}

cplx Symbol::eval(const CVec& w) const {
    if (w.size() != 2 * n_) fail(ErrorCode::DimensionMismatch, "evaluation point");
    return poly_.eval(w) * std::exp(exponent_at(w));
}

bool Symbol::y_affine() const {
    return max_abs(CMat(S_.bottomRightCorner(n_, n_))) <= 1e-13 * std::max(1.0, max_abs(S_));
}

bool Symbol::exponent_y_free() const {
    double sc = 1e-13 * std::max({1.0, max_abs(S_), max_abs(l_)});
    return max_abs(CMat(S_.bottomRows(n_))) <= sc && max_abs(CVec(l_.tail(n_))) <= sc;
}

Poly exponent_gradient(const Symbol& s, int k) {
    return Poly::linear(s.dim(), CVec(s.S().row(k).transpose()), s.l()(k));
}

Symbol Symbol::derivative(int k) const {
    Symbol out = *this;
    out.poly_ = poly_.derivative(k) + poly_ * exponent_gradient(*this, k);
    out.check_degree();
    return out;
}

Symbol Symbol::substitute(const CMat& P, const CVec& c) const {
    CMat S2 = P.transpose() * S_ * P;
    CVec l2 = P.transpose() * (S_ * c) + P.transpose() * l_;
    cplx k2 = 0.5 * (c.transpose() * S_ * c)(0, 0) + (l_.transpose() * c)(0, 0) + kappa_;
    return Symbol(poly_.substitute(P, c), S2, l2, k2);
}

Symbol Symbol::shift(const RVec& d) const {
    if (d.size() != 2 * n_) fail(ErrorCode::DimensionMismatch, "shift vector");
    return substitute(CMat::Identity(2 * n_, 2 * n_), d.cast<cplx>());
}

Symbol Symbol::scaled(cplx s) const {
    Symbol out = *this;
    out.poly_ *= s;
    return out;
}

Symbol Symbol::reciprocal() const {
    if (!poly_.is_constant() || poly_.is_zero())
        fail(ErrorCode::MoyalNotClosed, "reciprocal needs a nonvanishing constant poly");
    return Symbol(Poly::constant(dim(), 1.0 / poly_.constant_term()), -S_, -l_, -kappa_);
}

Symbol Symbol::folded() const {
    Symbol out = *this;
    if (kappa_ != cplx(0.0, 0.0)) {
        out.poly_ *= std::exp(kappa_);
        out.kappa_ = 0.0;
    }
    return out;
}

void Symbol::check_degree() const {
    if (poly_.degree() > kMaxPolyDegree) {
        std::ostringstream os;
        os << "poly degree " << poly_.degree() << " exceeds " << kMaxPolyDegree;
        fail(ErrorCode::DegreeOverflow, os.str());
    }
}

Symbol operator*(const Symbol& a, const Symbol& b) {
    if (a.n_ != b.n_) fail(ErrorCode::DimensionMismatch, "symbol dimensions differ");
    Symbol out(a.poly_ * b.poly_, a.S_ + b.S_, a.l_ + b.l_, a.kappa_ + b.kappa_);
    out.check_degree();
    return out;
}

namespace {

struct BiTerm {
    Poly left;
    Poly right;
    cplx coeff;
};

// sum_k c^k/k! theta_{i1 j1}..theta_{ik jk} (d_i.. P)(D_j.. Q) where D acts on Q e^E,
// terminating because P is a polynomial in y
Poly bidifferential_series(const Poly& P, const Symbol& q_owner, const Poly& Q, const RMat& theta,
                           bool left_is_first) {
    const int n = q_owner.n();
    const cplx c = -I_UNIT / (4.0 * PI);
    std::vector<Poly> grads;
    for (int j = 0; j < n; ++j) grads.push_back(exponent_gradient(q_owner, n + j));

    Poly result = P * Q;
    std::vector<BiTerm> level{{P, Q, 1.0}};
    cplx factor = 1.0;
    for (int k = 1; !level.empty(); ++k) {
        factor *= c / static_cast<double>(k);
        std::vector<BiTerm> next;
        for (const auto& t : level) {
            for (int i = 0; i < n; ++i) {
                Poly dp = t.left.derivative(n + i);
                if (dp.is_zero()) continue;
                for (int j = 0; j < n; ++j) {
                    double th = left_is_first ? theta(i, j) : theta(j, i);
                    if (th == 0.0) continue;
                    Poly dq = t.right.derivative(n + j) + t.right * grads[j];
                    if (dq.is_zero()) continue;
                    next.push_back({dp, dq, t.coeff * th});
                }
            }
        }
        for (const auto& t : next) result += (factor * t.coeff) * (t.left * t.right);
        level = std::move(next);
        if (k > 4 * kMaxPolyDegree) fail(ErrorCode::MoyalNotClosed, "series did not terminate");
    }
    return result;
}

}  // namespace

Symbol moyal_star(const Symbol& f, const Symbol& g, const RMat& theta) {
    if (f.n() != g.n()) fail(ErrorCode::DimensionMismatch, "symbol dimensions differ");
    const int n = f.n();
    require_theta(theta, n);
    if (is_zero(theta, Tol{0.0, 0.0})) return f * g;
    const cplx c = -I_UNIT / (4.0 * PI);
    const CMat th = theta.cast<cplx>();

    if (f.y_affine()) {
        // g(x, y - c theta a(x)) with a the y-gradient of the exponent of f
        CMat P = CMat::Identity(2 * n, 2 * n);
        P.block(n, 0, n, n) = -c * th * f.S().block(n, 0, n, n);
        CVec shift = CVec::Zero(2 * n);
        shift.tail(n) = -c * th * f.l().tail(n);
        Symbol gt = g.substitute(P, shift);
        Poly poly = bidifferential_series(f.poly(), gt, gt.poly(), theta, true);
        Symbol out(poly, f.S() + gt.S(), f.l() + gt.l(), f.kappa() + gt.kappa());
        out.check_degree();
        return out;
    }
    if (g.y_affine()) {
        CMat P = CMat::Identity(2 * n, 2 * n);
        P.block(n, 0, n, n) = c * th * g.S().block(n, 0, n, n);
        CVec shift = CVec::Zero(2 * n);
        shift.tail(n) = c * th * g.l().tail(n);
        Symbol ft = f.substitute(P, shift);
        // theta_{ij} d_i(f) d_j(g): derive g's poly, let f carry its exponent
        Poly poly = bidifferential_series(g.poly(), ft, ft.poly(), theta, false);
        Symbol out(poly, ft.S() + g.S(), ft.l() + g.l(), ft.kappa() + g.kappa());
        out.check_degree();
        return out;
    }
    fail(ErrorCode::MoyalNotClosed, "both factors are quadratic in y");
}

Symbol star_inverse(const Symbol& f, const RMat& theta) {
    if (!f.y_affine() || !f.poly().is_constant())
        fail(ErrorCode::MoyalNotClosed, "star inverse needs an exponential affine in y with constant poly");
    Symbol inv = f.reciprocal();
    Symbol one = moyal_star(f, inv, theta).folded();
    Symbol one_r = moyal_star(inv, f, theta).folded();
    double err = std::max(std::abs(one.poly().constant_term() - 1.0), std::abs(one_r.poly().constant_term() - 1.0));
    if (err > 1e-9 || max_abs(one.S()) > 1e-9 || max_abs(one.l()) > 1e-9)
        fail(ErrorCode::MoyalNotClosed, "reciprocal is not a star inverse");
    return inv;
}

SymbolSum::SymbolSum(const Symbol& s) : n_(s.n()) { add(s); }

SymbolSum SymbolSum::constant(int n, cplx c) {
    SymbolSum s(n);
    s.add(Symbol::constant(n, c));
    return s;
}

void SymbolSum::add(const Symbol& s) {
    if (n_ == 0) n_ = s.n();
    if (s.n() != n_) fail(ErrorCode::DimensionMismatch, "symbol dimensions differ");
    if (s.poly().is_zero()) return;
    Symbol f = s.folded();
    for (auto it = terms_.begin(); it != terms_.end(); ++it) {
        if (same_exponent(*it, f)) {
            it->mutable_poly() += f.poly();
            if (it->poly().is_zero()) terms_.erase(it);
            return;
        }
    }
    terms_.push_back(std::move(f));
}

SymbolSum& SymbolSum::operator+=(const SymbolSum& o) {
    for (const auto& t : o.terms_) add(t);
    if (n_ == 0) n_ = o.n_;
    return *this;
}

SymbolSum& SymbolSum::operator-=(const SymbolSum& o) {
    for (const auto& t : o.terms_) add(t.scaled(-1.0));
    if (n_ == 0) n_ = o.n_;
    return *this;
}

SymbolSum& SymbolSum::operator*=(cplx s) {
    if (s == cplx(0.0, 0.0)) {
        terms_.clear();
        return *this;
    }
    for (auto& t : terms_) t.mutable_poly() *= s;
    return *this;
}

SymbolSum operator*(const SymbolSum& a, const SymbolSum& b) {
    SymbolSum out(std::max(a.n_, b.n_));
    for (const auto& s : a.terms_)
        for (const auto& t : b.terms_) out.add(s * t);
    return out;
}

cplx SymbolSum::eval(const CVec& w) const {
    cplx s = 0.0;
    for (const auto& t : terms_) s += t.eval(w);
    return s;
}

SymbolSum SymbolSum::derivative(int k) const {
    SymbolSum out(n_);
    for (const auto& t : terms_) out.add(t.derivative(k));
    return out;
}

SymbolSum SymbolSum::substitute(const CMat& P, const CVec& c) const {
    SymbolSum out(n_);
    for (const auto& t : terms_) out.add(t.substitute(P, c));
    return out;
}

SymbolSum SymbolSum::shift(const RVec& d) const {
    SymbolSum out(n_);
    for (const auto& t : terms_) out.add(t.shift(d));
    return out;
}

double SymbolSum::max_coeff() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, t.poly().max_coeff());
    return m;
}

bool SymbolSum::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    const auto& t = terms_.front();
    return t.poly().is_constant() && max_abs(t.S()) == 0.0 && max_abs(t.l()) == 0.0;
}

cplx SymbolSum::constant_value() const {
    if (!is_constant()) fail(ErrorCode::PreconditionFailed, "symbol is not constant");
    return terms_.empty() ? cplx(0.0, 0.0) : terms_.front().poly().constant_term();
}

SymbolSum moyal_star(const SymbolSum& f, const SymbolSum& g, const RMat& theta) {
    SymbolSum out(std::max(f.n(), g.n()));
    for (const auto& s : f.terms())
        for (const auto& t : g.terms()) out.add(moyal_star(s, t, theta));
    return out;
}

Residual residual(const SymbolSum& a, const SymbolSum& b) {
    Residual r;
    r.abs = (a - b).max_coeff();
    r.scale = std::max(a.max_coeff(), b.max_coeff());
    return r;
}

Residual sampled_residual(const SymbolSum& a, const SymbolSum& b, const std::vector<RVec>& points) {
    Residual r;
    for (const auto& w : points) {
        cplx va = a.eval(w), vb = b.eval(w);
        r.abs = std::max(r.abs, std::abs(va - vb));
        r.scale = std::max({r.scale, std::abs(va), std::abs(vb)});
    }
    return r;
}

SymbolForm::SymbolForm(int n, int degree) : n_(n), degree_(degree) {
    int d = 2 * n;
    int count = degree == 0 ? 1 : degree == 1 ? d : degree == 2 ? d * (d - 1) / 2 : -1;
    if (count < 0) fail(ErrorCode::DimensionMismatch, "form degree must be 0, 1 or 2");
    coeffs_.assign(count, SymbolSum(n));
}

SymbolForm SymbolForm::function(const SymbolSum& f) {
    SymbolForm out(f.n(), 0);
    out.coeffs_[0] = f;
    return out;
}

SymbolForm SymbolForm::linear_one_form(int n, const CMat& L, const CVec& c) {
    SymbolForm out(n, 1);
    for (int k = 0; k < 2 * n; ++k)
        out.coeffs_[k] = SymbolSum(Symbol::polynomial(n, Poly::linear(2 * n, CVec(L.col(k)), c(k))));
    return out;
}

SymbolForm SymbolForm::constant_two_form(int n, const CMat& N) {
    SymbolForm out(n, 2);
    for (int a = 0; a < 2 * n; ++a)
        for (int b = a + 1; b < 2 * n; ++b)
            out.coeffs_[pair_index(n, a, b)] = SymbolSum::constant(n, N(a, b) - N(b, a));
    return out;
}

SymbolForm SymbolForm::one_form(int n, int a, const SymbolSum& f) {
    SymbolForm out(n, 1);
    out.coeffs_[a] = f;
    return out;
}

int SymbolForm::pair_index(int n, int a, int b) {
    int d = 2 * n;
    if (!(0 <= a && a < b && b < d)) fail(ErrorCode::DimensionMismatch, "pair index");
    return a * d - a * (a + 1) / 2 + (b - a - 1);
}

std::pair<int, int> SymbolForm::pair_of(int n, int idx) {
    int d = 2 * n;
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b)
            if (pair_index(n, a, b) == idx) return {a, b};
    fail(ErrorCode::DimensionMismatch, "pair index out of range");
}

SymbolSum SymbolForm::pair_coeff(int a, int b) const {
    if (a == b) return SymbolSum(n_);
    if (a < b) return coeffs_[pair_index(n_, a, b)];
    return coeffs_[pair_index(n_, b, a)] * cplx(-1.0);
}

void SymbolForm::require_same(const SymbolForm& o) const {
    if (o.n_ != n_ || o.degree_ != degree_) fail(ErrorCode::DimensionMismatch, "form shapes differ");
}

SymbolForm& SymbolForm::operator+=(const SymbolForm& o) {
    require_same(o);
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
}

SymbolForm& SymbolForm::operator-=(const SymbolForm& o) {
    require_same(o);
    for (size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
}

SymbolForm& SymbolForm::operator*=(cplx s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

SymbolForm SymbolForm::shift(const RVec& d) const {
    SymbolForm out = *this;
    for (auto& c : out.coeffs_) c = c.shift(d);
    return out;
}

SymbolForm SymbolForm::substitute(const CMat& P, const CVec& c) const {
    SymbolForm out = *this;
    for (auto& co : out.coeffs_) co = co.substitute(P, c);
    return out;
}

double SymbolForm::max_coeff() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, c.max_coeff());
    return m;
}

bool SymbolForm::is_constant() const {
    for (const auto& c : coeffs_)
        if (!c.is_constant()) return false;
    return true;
}

CMat SymbolForm::constant_matrix() const {
    if (degree_ != 2) fail(ErrorCode::PreconditionFailed, "constant_matrix needs a 2-form");
    int d = 2 * n_;
    CMat K = CMat::Zero(d, d);
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            cplx v = coeffs_[pair_index(n_, a, b)].constant_value();
            K(a, b) = v;
            K(b, a) = -v;
        }
    return K;
}

CVec SymbolForm::constant_vector() const {
    if (degree_ != 1) fail(ErrorCode::PreconditionFailed, "constant_vector needs a 1-form");
    CVec v(2 * n_);
    for (int a = 0; a < 2 * n_; ++a) v(a) = coeffs_[a].constant_value();
    return v;
}

std::vector<cplx> SymbolForm::eval(const RVec& w) const {
    std::vector<cplx> out;
    for (const auto& c : coeffs_) out.push_back(c.eval(w));
    return out;
}

SymbolForm exterior_d(const SymbolSum& f) {
    SymbolForm out(f.n(), 1);
    for (int k = 0; k < 2 * f.n(); ++k) out.coeff(k) = f.derivative(k);
    return out;
}

SymbolForm exterior_d(const SymbolForm& f) {
    const int n = f.n();
    if (f.degree() == 0) return exterior_d(f.coeff(0));
    if (f.degree() != 1) fail(ErrorCode::DimensionMismatch, "exterior_d of a 2-form leaves the supported range");
    SymbolForm out(n, 2);
    // d(u_b e_b) = sum_a d_a u_b e_a ^ e_b
    for (int a = 0; a < 2 * n; ++a)
        for (int b = a + 1; b < 2 * n; ++b)
            out.coeff(SymbolForm::pair_index(n, a, b)) = f.coeff(b).derivative(a) - f.coeff(a).derivative(b);
    return out;
}

SymbolForm wedge_star(const SymbolForm& a, const SymbolForm& b, const RMat& theta) {
    if (a.n() != b.n()) fail(ErrorCode::DimensionMismatch, "form dimensions differ");
    const int n = a.n();
    if (a.degree() == 0) {
        SymbolForm out(n, b.degree());
        for (int i = 0; i < b.size(); ++i) out.coeff(i) = moyal_star(a.coeff(0), b.coeff(i), theta);
        return out;
    }
    if (b.degree() == 0) {
        SymbolForm out(n, a.degree());
        for (int i = 0; i < a.size(); ++i) out.coeff(i) = moyal_star(a.coeff(i), b.coeff(0), theta);
        return out;
    }
    if (a.degree() != 1 || b.degree() != 1) fail(ErrorCode::DimensionMismatch, "wedge degree exceeds 2");
    SymbolForm out(n, 2);
    for (int i = 0; i < 2 * n; ++i)
        for (int j = i + 1; j < 2 * n; ++j)
            out.coeff(SymbolForm::pair_index(n, i, j)) =
                moyal_star(a.coeff(i), b.coeff(j), theta) - moyal_star(a.coeff(j), b.coeff(i), theta);
    return out;
}

namespace {

// D maps e = (dx, dy) to f = (dz, dzbar)
CMat coframe(const CMat& T) {
    const int n = static_cast<int>(T.rows());
    CMat D(2 * n, 2 * n);
    CMat Id = CMat::Identity(n, n);
    D << Id, T, Id, T.conjugate();
    return D;
}

CMat projector(const CMat& T, bool antiholomorphic) {
    const int n = static_cast<int>(T.rows());
    if (T.cols() != n) fail(ErrorCode::DimensionMismatch, "T must be square");
    CMat D = coframe(T);
    Eigen::FullPivLU<CMat> lu(D);
    if (!lu.isInvertible()) fail(ErrorCode::SingularT, "coframe is degenerate, Im T must be invertible");
    CMat C = lu.inverse();
    CMat Pi = CMat::Zero(2 * n, 2 * n);
    if (antiholomorphic)
        Pi.bottomRightCorner(n, n).setIdentity();
    else
        Pi.topLeftCorner(n, n).setIdentity();
    return D.transpose() * Pi * C.transpose();
}

SymbolForm apply_projector(const SymbolForm& f, const CMat& Q) {
    const int n = f.n();
    const int d = 2 * n;
    auto small = [](cplx z) { return std::abs(z) < 1e-15; };
    if (f.degree() == 1) {
        SymbolForm out(n, 1);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                if (!small(Q(a, b))) out.coeff(a) += f.coeff(b) * Q(a, b);
        return out;
    }
    if (f.degree() == 2) {
        SymbolForm out(n, 2);
        for (int a = 0; a < d; ++a)
            for (int b = a + 1; b < d; ++b) {
                SymbolSum acc(n);
                for (int c = 0; c < d; ++c)
                    for (int e = c + 1; e < d; ++e) {
                        cplx w = Q(a, c) * Q(b, e) - Q(a, e) * Q(b, c);
                        if (!small(w)) acc += f.coeff(SymbolForm::pair_index(n, c, e)) * w;
                    }
                out.coeff(SymbolForm::pair_index(n, a, b)) = acc;
            }
        return out;
    }
    return f;
}

}  // namespace

CMat antiholomorphic_projector(const CMat& T) { return projector(T, true); }

SymbolForm dolbeault_project(const SymbolForm& f, const CMat& T, int k) {
    if (T.rows() != f.n()) fail(ErrorCode::DimensionMismatch, "T size differs from form dimension");
    if (k != f.degree()) fail(ErrorCode::DimensionMismatch, "requested (0,k) type differs from form degree");
    return apply_projector(f, projector(T, true));
}

SymbolForm holomorphic_project(const SymbolForm& f, const CMat& T) {
    if (T.rows() != f.n()) fail(ErrorCode::DimensionMismatch, "T size differs from form dimension");
    return apply_projector(f, projector(T, false));
}

SymbolForm dbar(const SymbolSum& f, const CMat& T) { return dolbeault_project(exterior_d(f), T, 1); }

Residual residual(const SymbolForm& a, const SymbolForm& b) {
    if (a.n() != b.n() || a.degree() != b.degree()) fail(ErrorCode::DimensionMismatch, "form shapes differ");
    Residual r;
    for (int i = 0; i < a.size(); ++i) {
        Residual ri = residual(a.coeff(i), b.coeff(i));
        r.abs = std::max(r.abs, ri.abs);
        r.scale = std::max(r.scale, ri.scale);
    }
    return r;
}

}  // namespace ncsyz
