#pragma once

#include <map>
#include <string>
#include <vector>

#include "ncsyz/matcore.hpp"

namespace ncsyz {

inline constexpr int kMaxPolyDegree = 4;

using MultiIndex = std::vector<int>;

// polynomial in dim complex-coefficient variables
class Poly {
public:
    Poly() = default;
    explicit Poly(int dim) : dim_(dim) {}

    static Poly constant(int dim, cplx c);
    static Poly variable(int dim, int k);
    static Poly linear(int dim, const CVec& coeffs, cplx c0);

    int dim() const { return dim_; }
    const std::map<MultiIndex, cplx>& terms() const { return terms_; }

    void add_term(const MultiIndex& a, cplx c);
    int degree() const;
    int degree_in(int begin, int end) const;
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    cplx constant_term() const;
    double max_coeff() const;

    Poly derivative(int k) const;
    cplx eval(const CVec& w) const;
    // w -> P w + c
    Poly substitute(const CMat& P, const CVec& c) const;

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(cplx s);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, cplx s) { return a *= s; }
    friend Poly operator*(cplx s, Poly a) { return a *= s; }
    friend Poly operator*(const Poly& a, const Poly& b);

private:
    int dim_ = 0;
    std::map<MultiIndex, cplx> terms_;
};

// poly(w) * exp(w^t S w / 2 + l^t w + kappa), w = (x, y) with n + n entries
class Symbol {
public:
    Symbol() = default;
    explicit Symbol(int n);
    Symbol(Poly poly, CMat S, CVec l, cplx kappa);

    static Symbol constant(int n, cplx c);
    static Symbol polynomial(int n, Poly p);
    static Symbol exp_quadratic(int n, const CMat& S, const CVec& l, cplx kappa);
    // exp(x^t Sxx x / 2 + x^t Sxy y + y^t Syy y / 2 + lx^t x + ly^t y + kappa)
    static Symbol exp_blocks(int n, const CMat& Sxx, const CMat& Sxy, const CMat& Syy,
                             const CVec& lx, const CVec& ly, cplx kappa);

    int n() const { return n_; }
    int dim() const { return 2 * n_; }
    const Poly& poly() const { return poly_; }
    const CMat& S() const { return S_; }
    const CVec& l() const { return l_; }
    cplx kappa() const { return kappa_; }

    cplx eval(const CVec& w) const;
    cplx eval(const RVec& w) const { return eval(CVec(w.cast<cplx>())); }
    cplx exponent_at(const CVec& w) const;

    // exponent is at most affine in y
    bool y_affine() const;
    // neither poly nor exponent depend on y
    bool exponent_y_free() const;
    int poly_y_degree() const { return poly_.degree_in(n_, 2 * n_); }

    Symbol derivative(int k) const;
    Symbol substitute(const CMat& P, const CVec& c) const;
    Symbol shift(const RVec& d) const;
    Symbol scaled(cplx s) const;
    // 1 / f for a nonvanishing constant poly
    Symbol reciprocal() const;
    // fold exp(kappa) into the poly
    Symbol folded() const;

    void check_degree() const;

    friend Symbol operator*(const Symbol& a, const Symbol& b);

    Poly& mutable_poly() { return poly_; }

private:
    int n_ = 0;
    Poly poly_;
    CMat S_;
    CVec l_;
    cplx kappa_{0.0, 0.0};
};

// exponent gradient (S w + l)_k as a linear poly
Poly exponent_gradient(const Symbol& s, int k);

// Moyal product with hbar = -i; throws MoyalNotClosed outside the closed fragment
Symbol moyal_star(const Symbol& f, const Symbol& g, const RMat& theta);
// star inverse for exponential-affine-in-y symbols with constant poly
Symbol star_inverse(const Symbol& f, const RMat& theta);

// finite sum of symbols; terms with equal exponents are merged
class SymbolSum {
public:
    SymbolSum() = default;
    explicit SymbolSum(int n) : n_(n) {}
    SymbolSum(const Symbol& s);  // NOLINT(google-explicit-constructor)

    static SymbolSum constant(int n, cplx c);

    int n() const { return n_; }
    const std::vector<Symbol>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void add(const Symbol& s);
    SymbolSum& operator+=(const SymbolSum& o);
    SymbolSum& operator-=(const SymbolSum& o);
    SymbolSum& operator*=(cplx s);
    friend SymbolSum operator+(SymbolSum a, const SymbolSum& b) { return a += b; }
    friend SymbolSum operator-(SymbolSum a, const SymbolSum& b) { return a -= b; }
    friend SymbolSum operator*(SymbolSum a, cplx s) { return a *= s; }
    friend SymbolSum operator*(cplx s, SymbolSum a) { return a *= s; }
    friend SymbolSum operator*(const SymbolSum& a, const SymbolSum& b);

    cplx eval(const CVec& w) const;
    cplx eval(const RVec& w) const { return eval(CVec(w.cast<cplx>())); }
    SymbolSum derivative(int k) const;
    SymbolSum substitute(const CMat& P, const CVec& c) const;
    SymbolSum shift(const RVec& d) const;
    double max_coeff() const;
    bool is_zero() const { return terms_.empty(); }
    // constant value if the sum is a constant, throws otherwise
    cplx constant_value() const;
    bool is_constant() const;

private:
    int n_ = 0;
    std::vector<Symbol> terms_;
};

SymbolSum moyal_star(const SymbolSum& f, const SymbolSum& g, const RMat& theta);

struct Residual {
    double abs = 0.0;
    double scale = 0.0;
    double scaled() const { return abs / std::max(1.0, scale); }
    bool ok(const Tol& tol) const { return tol.ok(abs, scale); }
    Residual& merge(const Residual& o) {
        if (o.scaled() > scaled()) { abs = o.abs; scale = o.scale; }
        return *this;
    }
};

// coefficient-level distance
Residual residual(const SymbolSum& a, const SymbolSum& b);
// pointwise distance at sample points, used as a fallback oracle
Residual sampled_residual(const SymbolSum& a, const SymbolSum& b, const std::vector<RVec>& points);

// differential form of degree 0, 1 or 2 in dx_1..dx_n, dy_1..dy_n
class SymbolForm {
public:
    SymbolForm() = default;
    SymbolForm(int n, int degree);

    static SymbolForm function(const SymbolSum& f);
    // (w^t L + c^t) e, with e = (dx, dy)
    static SymbolForm linear_one_form(int n, const CMat& L, const CVec& c);
    // e^t N e = sum N_ab e_a ^ e_b
    static SymbolForm constant_two_form(int n, const CMat& N);
    // f e_a
    static SymbolForm one_form(int n, int a, const SymbolSum& f);

    int n() const { return n_; }
    int degree() const { return degree_; }
    int size() const { return static_cast<int>(coeffs_.size()); }
    static int pair_index(int n, int a, int b);
    static std::pair<int, int> pair_of(int n, int idx);

    SymbolSum& coeff(int idx) { return coeffs_[idx]; }
    const SymbolSum& coeff(int idx) const { return coeffs_[idx]; }
    // signed coefficient of e_a ^ e_b for any a != b
    SymbolSum pair_coeff(int a, int b) const;

    SymbolForm& operator+=(const SymbolForm& o);
    SymbolForm& operator-=(const SymbolForm& o);
    SymbolForm& operator*=(cplx s);
    friend SymbolForm operator+(SymbolForm a, const SymbolForm& b) { return a += b; }
    friend SymbolForm operator-(SymbolForm a, const SymbolForm& b) { return a -= b; }
    friend SymbolForm operator*(SymbolForm a, cplx s) { return a *= s; }
    friend SymbolForm operator*(cplx s, SymbolForm a) { return a *= s; }

    SymbolForm shift(const RVec& d) const;
    SymbolForm substitute(const CMat& P, const CVec& c) const;
    double max_coeff() const;
    bool is_constant() const;
    // antisymmetric K with form = e^t K e / 2, constant 2-forms only
    CMat constant_matrix() const;
    // coefficient vector of a constant 1-form
    CVec constant_vector() const;
    std::vector<cplx> eval(const RVec& w) const;

private:
    void require_same(const SymbolForm& o) const;
    int n_ = 0;
    int degree_ = 0;
    std::vector<SymbolSum> coeffs_;
};

SymbolForm exterior_d(const SymbolForm& f);
SymbolForm exterior_d(const SymbolSum& f);
// wedge with the Moyal product on coefficients
SymbolForm wedge_star(const SymbolForm& a, const SymbolForm& b, const RMat& theta);
// (0,k)-part for the complex structure with coframe dz = dx + T dy
SymbolForm dolbeault_project(const SymbolForm& f, const CMat& T, int k);
// (k,0)-part
SymbolForm holomorphic_project(const SymbolForm& f, const CMat& T);
SymbolForm dbar(const SymbolSum& f, const CMat& T);
// projection matrix acting on 1-form coefficient vectors
CMat antiholomorphic_projector(const CMat& T);

Residual residual(const SymbolForm& a, const SymbolForm& b);

}  // namespace ncsyz
