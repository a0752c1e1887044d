#pragma once

#include <vector>

#include "ncsyz/holoside.hpp"

namespace ncsyz {

enum class Side { holo, symp };

const char* side_name(Side s);

struct ModuliContext {
    RMat A;
    RMat Acal;
    RMat theta;
};

struct ModuliPoint {
    RVec p, q;
    Side side = Side::holo;
    ModuliContext context;
};

ModuliPoint make_moduli_point(const RVec& p, const RVec& q, Side side, const ModuliContext& ctx);

// I - (theta Acal / 2pi)^2
RMat moduli_deformation(const RMat& Acal, const RMat& theta);

// columns generate the shifts of (p, q) that preserve the deformed bundle
LatticeBasis holo_lattice(const RMat& A, const RMat& Acal, const RMat& theta);

bool moduli_equiv(const ModuliPoint& x, const ModuliPoint& y, const Tol& tol = {});

// symp -> holo forward, holo -> symp inverse
ModuliPoint syz_map(const ModuliPoint& x);

// (p, q) reduced into the fundamental cell of the side's lattice
ModuliPoint canonical(const ModuliPoint& x);

bool curvature_match(const RMat& Acal, const RMat& Bcal, const RMat& theta, const Tol& tol = {});

struct IntersectionReport {
    std::vector<RVec> points;
    int count = 0;
};

// solutions of A x + p in Z^n on [0,1)^n
IntersectionReport intersection_points(const RMat& A, const RVec& p);

}  // namespace ncsyz
