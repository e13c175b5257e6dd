#pragma once

#include <Eigen/Dense>

#include <complex>

#include "amdet/errors.hpp"

namespace amdet {

using cplx = std::complex<double>;

// Dense complex matrix, column-major. Everything in the library flows through
// this one type; shapes are dynamic because the problem dimensions are runtime
// configuration.
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

// Relative eigenvalue floor: a Hermitian matrix counts as positive definite
// only if min_eig > kPdFloorRel * max_eig. Matrices here are small (N <= 32),
// so spectral checks are affordable.
inline constexpr double kPdFloorRel = 1e-12;

// Relative Frobenius tolerance for the hermiticity check at HpdMat construction.
inline constexpr double kHermTolRel = 1e-12;

// Hermitian positive definite matrix. Construction validates hermiticity and
// definiteness and caches the eigendecomposition, which the factorization ops
// below reuse.
class HpdMat {
public:
    explicit HpdMat(const CMat& s);

    const CMat& mat() const { return mat_; }
    const RVec& evals() const { return evals_; }
    const CMat& evecs() const { return evecs_; }
    Eigen::Index n() const { return mat_.rows(); }
    double min_eig() const { return evals_(0); }
    double max_eig() const { return evals_(evals_.size() - 1); }

private:
    CMat mat_;    // symmetrized input
    RVec evals_;  // ascending
    CMat evecs_;
};

// P_A = A (A^H A)^{-1} A^H. A zero-column A yields the zero matrix, which is
// the correct projector onto the trivial subspace and keeps no-interference
// formulas branch-free. Throws RankDeficient when A^H A fails the PD floor.
CMat projector(const CMat& a);

// I - P_A.
CMat complement_projector(const CMat& a);

// Unique Hermitian PD X with X S X = I, via the eigendecomposition. The
// Hermitian (principal) root is deliberate: it makes whitened-view identities
// hold matrix-by-matrix, not only in the final scalar statistics.
HpdMat hpd_inv_sqrt(const HpdMat& s);

// Principal Hermitian square root, used for disturbance synthesis and the
// unwhitening factors in a few detector forms.
HpdMat hpd_sqrt(const HpdMat& s);

// S^{-1} B via Cholesky.
CMat solve_hpd(const HpdMat& s, const CMat& b);

// log det S as the sum of eigenvalue logs; determinant ratios downstream are
// formed as exp of logdet differences so large K cannot overflow.
double logdet_hpd(const HpdMat& s);

}  // namespace amdet
