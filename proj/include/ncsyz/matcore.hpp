#pragma once

#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncsyz/errors.hpp"

namespace ncsyz {

using cplx = std::complex<double>;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using IVec = Eigen::VectorXi;

inline const cplx I_UNIT{0.0, 1.0};
inline constexpr double PI = 3.14159265358979323846;

struct Tol {
    double rel = 1e-9;
    double abs = 1e-12;

    double window(double scale) const { return abs + rel * scale; }
    bool ok(double residual, double scale) const { return residual <= window(scale); }
    bool close(double a, double b) const {
        return std::abs(a - b) <= window(std::max(std::abs(a), std::abs(b)));
    }
};

template <class M>
double max_abs(const M& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_symmetric(const RMat& m, const Tol& tol = {});
bool is_symmetric(const CMat& m, const Tol& tol = {});
bool is_antisymmetric(const RMat& m, const Tol& tol = {});
bool is_zero(const RMat& m, const Tol& tol = {});
bool is_positive_definite(const RMat& m, const Tol& tol = {});

// max distance of an entry to the nearest integer
double integer_distance(const RMat& m);
bool near_integer(const RMat& m, const Tol& tol = {});
RMat round_matrix(const RMat& m);

RMat require_square(const RMat& m, int n, const std::string& what);
RMat require_antisymmetric(const RMat& m, int n, const std::string& what, const Tol& tol = {});
RMat require_symmetric(const RMat& m, int n, const std::string& what, const Tol& tol = {});
RMat require_integer(const RMat& m, int n, const std::string& what, const Tol& tol = {});

double condition_number(const RMat& m);
double condition_number(const CMat& m);

// columns are the lattice generators
class LatticeBasis {
public:
    explicit LatticeBasis(RMat basis, double max_condition = 1e12);
    const RMat& basis() const { return basis_; }
    int dim() const { return static_cast<int>(basis_.rows()); }
    RVec coordinates(const RVec& v) const { return lu_.solve(v); }

private:
    RMat basis_;
    Eigen::FullPivLU<RMat> lu_;
};

struct LatticeDecision {
    bool inside = false;
    RVec real_coords;
    std::optional<IVec> coords;
    double max_fractional = 0.0;
};

LatticeDecision lattice_member(const RVec& v, const LatticeBasis& lattice, const Tol& tol = {});

// reduce v into the fundamental cell [0,1)^d of the lattice
RVec canonical_representative(const RVec& v, const LatticeBasis& lattice);

// assemble a block matrix row by row
RMat blocks(const std::vector<std::vector<RMat>>& rows);
CMat blocks(const std::vector<std::vector<CMat>>& rows);

RMat zeros(int r, int c);
RMat eye(int n);

RMat random_matrix(std::mt19937_64& rng, int r, int c, double scale);
RMat random_antisymmetric(std::mt19937_64& rng, int n, double scale);
RMat random_symmetric(std::mt19937_64& rng, int n, double scale);
RMat random_spd(std::mt19937_64& rng, int n, double min_eig, double max_eig);
RMat random_integer_matrix(std::mt19937_64& rng, int n, int bound, bool invertible);
RVec random_vector(std::mt19937_64& rng, int n, double lo, double hi);
CMat random_period_matrix(std::mt19937_64& rng, int n);

}  // namespace ncsyz
