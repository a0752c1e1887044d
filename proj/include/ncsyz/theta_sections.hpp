#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncsyz/holoside.hpp"

namespace ncsyz {

// representatives of Z^n / A Z^n reduced into the cell A [0,1)^n, sorted
std::vector<IVec> residue_classes(const RMat& A);

struct ThetaSection {
    int n = 0;
    RMat A;
    RVec p, q;
    RMat theta;
    int N = 10;
    std::vector<IVec> residues;
    std::vector<cplx> C;
    // p as it enters the Gaussian centre; equal to p for a genuine section
    RVec p_gauss;
};

ThetaSection theta_section(const RMat& A, const RVec& p, const RVec& q, const std::vector<cplx>& C, int N,
                           const RMat& theta, const CMat& T);
// C = unit vector at residue index r
ThetaSection basis_section(const RMat& A, const RVec& p, const RVec& q, int r, int N, const RMat& theta,
                           const CMat& T);

cplx eval_section(const ThetaSection& s, const RVec& x, const RVec& y, int radius = -1);
// (0,1)-part of (d + omega) applied to the section, as coefficients of (dx, dy)
CVec dbar_section(const ThetaSection& s, const RVec& x, const RVec& y);

// points are (x, y) stacked; serial and OpenMP paths give identical results
std::vector<cplx> eval_section_batch(const ThetaSection& s, const std::vector<RVec>& points, Exec exec);

struct SectionReport {
    bool pass = false;
    double automorphy_residual = 0.0;
    double dbar_residual = 0.0;
    bool dbar_checked = false;
    double truncation_error = 0.0;
    double scale = 0.0;
    std::vector<std::string> failures;
};

SectionReport verify_section(const ThetaSection& s, int samples, double tol, std::uint64_t seed,
                             Exec exec = Exec::parallel);

}  // namespace ncsyz
