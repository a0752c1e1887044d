#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncsyz/matcore.hpp"

namespace ncsyz {

// 4n x 4n matrix on the frame (d/dx, d/dy, dx, dy)
struct GCStructure {
    int n = 0;
    RMat J;
};

enum class TransformKind { mirror, beta, bfield_tau1, bfield_tau2, fm_complex, fm_symplectic };

const char* transform_kind_name(TransformKind k);

// acts by J -> M J M^{-1}
struct Transform {
    TransformKind kind = TransformKind::mirror;
    RMat M;
};

GCStructure build_IT(const CMat& T);
// the mirror structure assembled directly from X = Re T, Y = Im T
GCStructure build_mirror_IT(const CMat& T);

struct GcsAxioms {
    double square = 0.0;   // |J^2 + I|
    double pairing = 0.0;  // |J^t P J - P|
};

GcsAxioms gcs_axioms(const GCStructure& J);

// unit upper/lower block matrices with t in block (r, c), blocks counted from 0
RMat block_shear(int n, int r, int c, const RMat& t);
RMat mirror_matrix(int n);
// B2(t) with t in block (2,1) and -t^t in block (3,0)
RMat tau2_shear(const RMat& t);

Transform mirror_transform(int n);
Transform beta_transform(const RMat& theta);
Transform bfield_tau1_transform(const RMat& tau);
Transform bfield_tau2_transform(const RMat& tau);
Transform fm_complex_transform(int n);
Transform fm_symplectic_transform(int n);

GCStructure apply_transform(const GCStructure& J, const Transform& t);

struct IdentityParams {
    CMat T;
    RMat theta;
    RMat tau;
    std::uint64_t seed = 1;
    int samples = 20;
    double tol = 1e-9;
};

struct IdentityReport {
    std::string name;
    bool pass = false;
    double max_entry_residual = 0.0;
    std::vector<std::string> failures;
};

const std::vector<std::string>& identity_names();
IdentityReport verify_identity(const std::string& name, const IdentityParams& params);

}  // namespace ncsyz
