#include "amdet/matlin.hpp"

#include <cmath>
#include <string>

namespace amdet {

namespace {

// V f(lambda) V^H for a decomposed Hermitian matrix.
template <typename F>
CMat eig_apply(const CMat& evecs, const RVec& evals, F f) {
    RVec mapped(evals.size());
    for (Eigen::Index i = 0; i < evals.size(); ++i) mapped(i) = f(evals(i));
    CMat out = evecs * mapped.cast<cplx>().asDiagonal() * evecs.adjoint();
    return 0.5 * (out + out.adjoint());
}

std::string shape_str(const CMat& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

HpdMat::HpdMat(const CMat& s) {
    if (s.rows() != s.cols()) {
        throw NotPositiveDefinite("HpdMat: matrix is not square (" + shape_str(s) + ")");
    }
    const double nrm = s.norm();
    const double herm_gap = (s - s.adjoint()).norm();
    if (!(nrm > 0.0) || herm_gap > kHermTolRel * nrm) {
        throw NotPositiveDefinite("HpdMat: matrix is not Hermitian within tolerance");
    }
    mat_ = 0.5 * (s + s.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(mat_);
    if (es.info() != Eigen::Success) {
        throw NotPositiveDefinite("HpdMat: eigendecomposition failed");
    }
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
    const double mx = max_eig();
    if (!(mx > 0.0) || min_eig() <= kPdFloorRel * mx) {
        throw NotPositiveDefinite("HpdMat: matrix fails the positive-definite floor (min eig "
                                  + std::to_string(min_eig()) + ", max eig " + std::to_string(mx) + ")");
    }
}

CMat projector(const CMat& a) {
    const Eigen::Index n = a.rows();
    if (a.cols() == 0) {
        return CMat::Zero(n, n);
    }
    CMat gram = a.adjoint() * a;
    gram = 0.5 * (gram + gram.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(gram);
    if (es.info() != Eigen::Success) {
        throw RankDeficient("projector: Gram eigendecomposition failed");
    }
    const double mx = es.eigenvalues().maxCoeff();
    if (!(mx > 0.0) || es.eigenvalues().minCoeff() <= kPdFloorRel * mx) {
        throw RankDeficient("projector: matrix " + shape_str(a) + " is rank deficient");
    }
    CMat gram_inv = eig_apply(es.eigenvectors(), es.eigenvalues(), [](double x) { return 1.0 / x; });
    CMat p = a * gram_inv * a.adjoint();
    return 0.5 * (p + p.adjoint());
}

CMat complement_projector(const CMat& a) {
    return CMat::Identity(a.rows(), a.rows()) - projector(a);
}

HpdMat hpd_inv_sqrt(const HpdMat& s) {
    if (s.min_eig() <= kPdFloorRel * s.max_eig()) {
        throw NotPositiveDefinite("hpd_inv_sqrt: eigenvalue below floor");
    }
    return HpdMat(eig_apply(s.evecs(), s.evals(), [](double x) { return 1.0 / std::sqrt(x); }));
}

HpdMat hpd_sqrt(const HpdMat& s) {
    return HpdMat(eig_apply(s.evecs(), s.evals(), [](double x) { return std::sqrt(x); }));
}

CMat solve_hpd(const HpdMat& s, const CMat& b) {
    if (s.n() != b.rows()) {
        throw NotPositiveDefinite("solve_hpd: shape mismatch (" + shape_str(s.mat()) + " vs "
                                  + shape_str(b) + ")");
    }
    Eigen::LLT<CMat> llt(s.mat());
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("solve_hpd: Cholesky failed");
    }
    return llt.solve(b);
}

double logdet_hpd(const HpdMat& s) {
    return s.evals().array().log().sum();
}

}  // namespace amdet
