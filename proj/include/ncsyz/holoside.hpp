#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncsyz/symcalc.hpp"

namespace ncsyz {

struct ComplexTorus {
    int n = 0;
    CMat T;
};

ComplexTorus make_complex_torus(const CMat& T, const Tol& tol = {});
CMat standard_period(int n);

enum class FactorKind { commutative, nc, twisted, nc_twisted, gerby_tau1, gerby_tau2 };

const char* factor_kind_name(FactorKind k);
FactorKind parse_factor_kind(const std::string& s);
bool is_gerby(FactorKind k);

struct BundleParams {
    int n = 0;
    RMat A;
    RVec p, q;
    RMat theta;
    RMat Acal;
    RMat tau;
    CMat T;

    // zero data on the square torus T = iI
    static BundleParams standard(int n);
};

// Acal (I + theta Acal / 2pi)^{-1}
RMat deformed_param(const RMat& Acal, const RMat& theta);
double deformation_determinant(const RMat& Acal, const RMat& theta);
// (1/2pi)^2 Acal^theta theta (Acal^theta)^t
RMat integrality_matrix(const RMat& Acal, const RMat& theta);
// Lambda(T, tau): type 1 uses C^t T^t tau T C, type 2 uses C^t tau^t T C with C = (T - Tbar)^{-1}
CMat tau_lambda(const CMat& T, const RMat& tau, int type);

// lattice generators are indexed 0..n-1 for e_i and n..2n-1 for T e_i
RVec generator_shift(int n, int g);

struct FactorOfAutomorphy {
    FactorKind kind = FactorKind::commutative;
    BundleParams params;
    std::vector<Symbol> gens;
    RMat star_theta;
};

FactorOfAutomorphy make_factor(FactorKind kind, const BundleParams& params);
// theta used by the Moyal product for this kind
RMat star_theta(FactorKind kind, const BundleParams& params);

struct CocycleReport {
    bool pass = false;
    Residual residual;
    RMat integrality;
    bool integral = true;
    std::vector<std::string> failures;
};

// alpha(g, h) multiplies the left side for gerby kinds
CocycleReport check_cocycle(const FactorOfAutomorphy& f, const RMat& theta, const CMat* alpha = nullptr,
                            const Tol& tol = {});

SymbolForm make_connection(FactorKind kind, const BundleParams& params);
// 0-connections s g(gamma)^t Lambda dzbar of the gerby kinds
std::vector<SymbolForm> gerby_zero_connection(FactorKind kind, const BundleParams& params);
// 2 pi i B^{(0,2)}
SymbolForm gerby_two_form(FactorKind kind, const BundleParams& params);

struct CheckReport {
    bool pass = false;
    Residual residual;
    std::vector<std::string> failures;
};

CheckReport check_compatibility(const FactorOfAutomorphy& f, const SymbolForm& omega, const RMat& theta,
                                const std::vector<SymbolForm>* zero_conn = nullptr, const Tol& tol = {});

SymbolForm curvature(const SymbolForm& omega, const RMat& theta, const SymbolForm* gerbe_2form = nullptr);
SymbolForm curvature_closed_form(FactorKind kind, const BundleParams& params);

struct Obstruction {
    bool vanishes = false;
    CMat matrix;
    SymbolForm part;
};

Obstruction holomorphicity_obstruction(const SymbolForm& Omega, const CMat& T, const Tol& tol = {});

struct BundleObject {
    FactorOfAutomorphy factor;
    SymbolForm omega;
    std::optional<SymbolForm> gerbe_2form;
    std::optional<std::vector<SymbolForm>> zero_conn;
};

BundleObject make_bundle(FactorKind kind, const BundleParams& params, const Tol& tol = {});

enum class IsoKind { phi_A, phi_theta_A };
Symbol make_iso(IsoKind kind, const BundleParams& params, const Tol& tol = {});

struct MorphismReport {
    bool pass = false;
    Residual automorphy;
    Residual dbar;
    std::vector<std::string> failures;
};

MorphismReport verify_morphism(const Symbol& phi, const BundleObject& src, const BundleObject& dst, const RMat& theta,
                               const Tol& tol = {});

// phi for the shift (k, l) of the moduli lattice
Symbol moduli_morphism(const BundleParams& params, const RVec& k, const RVec& l);

struct HomSolution {
    Symbol phi;
    IVec k, l;
    MorphismReport report;
};

enum class Exec { serial, parallel };

std::optional<HomSolution> solve_hom(const BundleParams& src, const RVec& p_prime, const RVec& q_prime, int window,
                                     const Tol& tol = {}, Exec exec = Exec::parallel);

}  // namespace ncsyz
