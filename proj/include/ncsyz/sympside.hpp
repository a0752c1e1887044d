#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncsyz/holoside.hpp"

namespace ncsyz {

enum class MirrorVariant { plain, nc, tau1, tau2 };

const char* mirror_variant_name(MirrorVariant v);

// symbols and forms on the mirror use w = (xv, yv)
struct MirrorTorus {
    int n = 0;
    MirrorVariant variant = MirrorVariant::plain;
    CMat T;
    // omega = dxv^t omega_matrix dyv, B = dxv^t b_matrix dyv
    RMat omega_matrix;
    RMat b_matrix;
    // B_theta = dyv^t theta_b dyv / 2
    RMat theta_b;
    // extra dxv^t (.) dxv blocks of the tau variants
    RMat tau_omega;
    RMat tau_b;
    RMat param;
};

MirrorTorus make_mirror(const CMat& T, MirrorVariant variant, const RMat& param = RMat());

// total complexified 2-form B + B_theta + tau blocks
SymbolForm mirror_b_form(const MirrorTorus& m);

struct Lagrangian {
    RMat A;
    RVec p;
    // A + tau^t for the tau2 deformation
    RMat slope;
    bool fukaya = false;
};

Lagrangian make_lagrangian(const RMat& A, const RVec& p, const CMat& T, const std::optional<RMat>& tau = std::nullopt,
                           const Tol& tol = {});

bool fukaya_object_check(const RMat& A, const CMat& T, const Tol& tol = {});

// pullback of a constant 2-form along xv -> (xv, A xv + p)
SymbolForm restrict_to_lagrangian(const SymbolForm& form, const RMat& A);

struct PeriodReport {
    RMat period_matrix;
    bool integral = false;
};

PeriodReport b_restriction_periods(const RMat& A, const MirrorTorus& mirror, const Tol& tol = {});

enum class GerbeKind { dual_theta, tau1_dual, tau1_holo, tau2_holo };

const char* gerbe_kind_name(GerbeKind k);

struct GerbeDatum {
    GerbeKind kind = GerbeKind::dual_theta;
    int n = 0;
    // generators: e_i on the Lagrangian (n of them) or e_i, T e_i on the torus (2n)
    int generators = 0;
    CMat alpha;
    std::vector<SymbolSum> xi;
    std::vector<SymbolForm> zero_conn;
    SymbolForm beta;
    SymbolForm one_conn;
    CMat T;
};

// dual_theta uses A and theta; tau kinds use tau and T
GerbeDatum make_gerbe(GerbeKind kind, const BundleParams& params);

// shift of generator g in w coordinates
RVec gerbe_generator(const GerbeDatum& g, int gen);

CheckReport verify_gerbe(const GerbeDatum& g, const Tol& tol = {});

struct TwistedLocalSystem {
    int n = 0;
    BundleParams params;
    std::vector<Symbol> j_dual;
    SymbolForm omega_dual;
    RMat integrality;
    bool integral = true;
};

TwistedLocalSystem make_twisted_local_system(const BundleParams& params, bool enforce_integrality = true,
                                             const Tol& tol = {});

struct LocalSystemReport {
    bool pass = false;
    Residual cocycle;
    Residual connection;
    std::vector<std::string> failures;
};

LocalSystemReport verify_local_system(const TwistedLocalSystem& sys, const GerbeDatum& gerbe, const Tol& tol = {});

struct DualCurvature {
    SymbolForm Omega;
    SymbolForm closed_form;
    Residual residual;
    bool generalized_condition_pass = false;
};

DualCurvature dual_curvature(const TwistedLocalSystem& sys, const GerbeDatum& gerbe, const MirrorTorus& mirror,
                             const Tol& tol = {});
SymbolForm dual_curvature_closed_form(const BundleParams& params);

// global tau1-type gerbe with tau = theta pulled back along (xv, yv) -> (yv, -xv) and restricted to L
CheckReport fm_gerbe_pullback_check(const RMat& A, const RMat& theta, const Tol& tol = {});

}  // namespace ncsyz
