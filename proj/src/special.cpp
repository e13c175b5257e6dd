#include <amdet/special.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>
#include <string>

#include <amdet/errors.hpp>

namespace amdet {

namespace {

CMat hermitize(const CMat& x) { return 0.5 * (x + x.adjoint()); }

HpdMat hpd_or_singular(const CMat& s, const char* what) {
    try {
        return HpdMat(s);
    } catch (const NotPositiveDefinite& ex) {
        throw SingularBlock(std::string(what) + ": " + ex.what());
    }
}

Eigen::LLT<CMat> chol(const CMat& s, const char* what) {
    Eigen::LLT<CMat> llt(hermitize(s));
    if (llt.info() != Eigen::Success) {
        throw SingularBlock(std::string(what) + ": Cholesky factorization failed");
    }
    return llt;
}

double real_qform(const CMat& x, const CMat& m, const CMat& y) {
    return (x.adjoint() * (m * y))(0, 0).real();
}

HpdMat secondary_scatter(const CMat& Zs, const char* what) {
    return hpd_or_singular(hermitize(Zs * Zs.adjoint()), what);
}

}  // namespace

KellyGlr kelly_eta(const PointLikeData& d, const CMat& A) {
    if (d.zp.cols() != 1 || d.zp.rows() != d.Zs.rows() || A.rows() != d.zp.rows()) {
        throw std::invalid_argument("kelly_eta: inconsistent shapes");
    }
    HpdMat sc = secondary_scatter(d.Zs, "kelly secondary scatter");
    CMat sc_is = hpd_inv_sqrt(sc).mat();
    CMat zp1 = sc_is * d.zp;
    CMat P = projector(sc_is * A);
    const double num = real_qform(zp1, P, zp1);
    const double den = 1.0 + (zp1.adjoint() * zp1)(0, 0).real();
    KellyGlr out;
    out.eta = num / den;
    out.t_glr = 1.0 / (1.0 - out.eta);
    return out;
}

double amf(const PointLikeData& d, const CMat& a) {
    if (a.cols() != 1 || a.rows() != d.zp.rows()) {
        throw std::invalid_argument("amf: a must be N x 1");
    }
    HpdMat sc = secondary_scatter(d.Zs, "amf secondary scatter");
    CMat w = solve_hpd(sc, a);
    const double den = (a.adjoint() * w)(0, 0).real();
    return std::norm((d.zp.adjoint() * w)(0, 0)) / den;
}

double rao_point_like(const PointLikeData& d, const CMat& A) {
    if (d.zp.cols() != 1 || A.rows() != d.zp.rows()) {
        throw std::invalid_argument("rao_point_like: inconsistent shapes");
    }
    const double K = 1.0 + static_cast<double>(d.Zs.cols());
    HpdMat sc = secondary_scatter(d.Zs, "rao secondary scatter");
    // rank-one update: S0^{-1} = Sc^{-1} - w w^H / (1 + zp^H w), w = Sc^{-1} zp
    CMat w = solve_hpd(sc, d.zp);
    const cplx zw = (d.zp.adjoint() * w)(0, 0);
    const double den = 1.0 + zw.real();
    CMat Aw = solve_hpd(sc, A);                       // Sc^{-1} A
    CMat G = A.adjoint() * Aw - (A.adjoint() * w) * (w.adjoint() * A) / den;
    CMat q = (A.adjoint() * w) / den;                 // A^H S0^{-1} zp
    const double eta_rao = (q.adjoint() * chol(G, "rao Gram").solve(q))(0, 0).real();
    return K * eta_rao;
}

PointLikeReport point_like_equivalences(const PointLikeData& d, const CMat& A, int t) {
    const Eigen::Index N = d.zp.rows();
    if (d.zp.cols() != 1 || A.rows() != N || t < 0 || t >= A.cols()) {
        throw std::invalid_argument("point_like_equivalences: inconsistent shapes");
    }
    const double K = 1.0 + static_cast<double>(d.Zs.cols());
    HpdMat sc = secondary_scatter(d.Zs, "point-like secondary scatter");
    CMat sc_is = hpd_inv_sqrt(sc).mat();
    CMat sc_s = hpd_sqrt(sc).mat();
    CMat Et = A.leftCols(t);
    CMat P0 = projector(sc_is * Et);
    CMat P1 = projector(sc_is * A);
    CMat zp1 = sc_is * d.zp;

    const double u = real_qform(zp1, P1 - P0, zp1);
    const double d0 = 1.0 + real_qform(zp1, CMat::Identity(N, N) - P0, zp1);
    const double d1 = 1.0 + real_qform(zp1, CMat::Identity(N, N) - P1, zp1);

    PointLikeReport rep{};
    rep.eta = u / d0;
    rep.t_glr = 1.0 / (1.0 - rep.eta);
    rep.t_wald = u;
    rep.t_lh = u / d1;

    // null-fit covariance estimate: the cell column displaced by its
    // interference fit, added back into the secondary scatter
    CMat q = d.zp - sc_s * (P0 * zp1);
    HpdMat r0 = hpd_or_singular(hermitize((sc.mat() + q * q.adjoint()) / K),
                                "point-like H0 covariance estimate");
    CMat r0_is = hpd_inv_sqrt(r0).mat();
    CMat zp0 = r0_is * d.zp;
    CMat Pb0 = projector(r0_is * Et);
    CMat Pb1 = projector(r0_is * A);
    rep.t_rao = real_qform(zp0, Pb1 - Pb0, zp0);
    rep.t_grad = real_qform(zp1, (P1 - P0) * (sc_s * r0_is), zp0);

    rep.grad_gap = std::abs(rep.t_grad - K * rep.eta) / std::max(1.0, std::abs(rep.t_grad));
    rep.lh_gap = std::abs(rep.t_lh - rep.t_glr * rep.eta) / std::max(1.0, std::abs(rep.t_lh));
    rep.consistent = rep.grad_gap <= 1e-8 && rep.lh_gap <= 1e-9;
    return rep;
}

std::map<std::string, double> multidim_detectors(const SpreadData& d) {
    if (d.Ze.rows() != d.Zs.rows()) {
        throw std::invalid_argument("multidim_detectors: row mismatch");
    }
    const double K = static_cast<double>(d.Ze.cols() + d.Zs.cols());
    HpdMat sc = secondary_scatter(d.Zs, "multidim secondary scatter");
    HpdMat s0 = hpd_or_singular(hermitize(d.Ze * d.Ze.adjoint() + sc.mat()),
                                "multidim total scatter");
    const double t_glr = std::exp(logdet_hpd(s0) - logdet_hpd(sc));
    const double t_rao = K * (d.Ze.adjoint() * solve_hpd(s0, d.Ze)).trace().real();
    const double t_wald = (d.Ze.adjoint() * solve_hpd(sc, d.Ze)).trace().real();
    return {
        {"glr", t_glr},   {"rao", t_rao},    {"wald", t_wald}, {"gradient", t_rao},
        {"durbin", t_rao}, {"2s-glr", t_wald}, {"lh", t_wald},
    };
}

std::map<std::string, double> range_spread_detectors(const SpreadData& d, const CMat& a) {
    const Eigen::Index M = d.Ze.cols();
    if (a.cols() != 1 || a.rows() != d.Ze.rows() || d.Ze.rows() != d.Zs.rows()) {
        throw std::invalid_argument("range_spread_detectors: inconsistent shapes");
    }
    const double K = static_cast<double>(M + d.Zs.cols());
    HpdMat sc = secondary_scatter(d.Zs, "range-spread secondary scatter");
    CMat w = solve_hpd(sc, a);
    const double den = (a.adjoint() * w)(0, 0).real();
    CMat v = d.Ze.adjoint() * w;                                  // M x 1
    CMat D0 = CMat::Identity(M, M) + d.Ze.adjoint() * solve_hpd(sc, d.Ze);
    const double eta = (v.adjoint() * chol(D0, "range-spread D0").solve(v))(0, 0).real() / den;

    HpdMat s0 = hpd_or_singular(hermitize(d.Ze * d.Ze.adjoint() + sc.mat()),
                                "range-spread total scatter");
    CMat w0 = solve_hpd(s0, a);
    const double t_rao =
        K * (d.Ze.adjoint() * w0).squaredNorm() / (a.adjoint() * w0)(0, 0).real();
    const double t_wald = v.squaredNorm() / den;
    const double t_glr = 1.0 / (1.0 - eta);
    return {
        {"glr", t_glr},          {"rao", t_rao},    {"wald", t_wald},
        {"gradient", K * eta},   {"durbin", t_rao}, {"2s-glr", t_wald},
        {"lh", eta / (1.0 - eta)}, {"eta", eta},
    };
}

std::map<std::string, double> gmanova_detectors(const CMat& Z, const ProblemDims& dims) {
    validate_dims(dims);
    if (dims.t != 0) {
        throw std::invalid_argument("gmanova_detectors: requires t = 0");
    }
    if (Z.rows() != dims.N || Z.cols() != dims.K) {
        throw std::invalid_argument("gmanova_detectors: Z must be N x K");
    }
    const int M = dims.M;
    const double K = dims.K;
    CanonicalBases b = canonical_bases(dims);
    CMat Zc = Z.leftCols(M);
    CMat Zs = Z.rightCols(dims.K - M);
    HpdMat sc = secondary_scatter(Zs, "secondary scatter");
    CMat sc_is = hpd_inv_sqrt(sc).mat();
    CMat sc_s = hpd_sqrt(sc).mat();
    CMat P1 = projector(sc_is * b.A);
    CMat Y1 = sc_is * Zc;

    CMat U1 = Y1 - P1 * Y1;
    auto chol_d1 = chol(CMat::Identity(M, M) + U1.adjoint() * U1, "D1");
    auto chol_dfull = chol(CMat::Identity(M, M) + Y1.adjoint() * Y1, "full Gram");
    const double ld1 = 2.0 * chol_d1.matrixLLT().diagonal().real().array().log().sum();
    const double ldf = 2.0 * chol_dfull.matrixLLT().diagonal().real().array().log().sum();
    const double t_glr = std::exp(ldf - ld1);

    // with no interference the H0 covariance estimate is the full scatter / K
    HpdMat r0 = hpd_or_singular(hermitize(Z * Z.adjoint()) / K, "H0 covariance estimate");
    CMat r0_is = hpd_inv_sqrt(r0).mat();
    CMat Y0 = r0_is * Zc;
    CMat Pb1 = projector(r0_is * b.A);
    const double t_rao = (Y0.adjoint() * (Pb1 * Y0)).trace().real();
    const double t_wald = (Y1.adjoint() * (P1 * Y1)).trace().real();
    const double t_grad = (Y1.adjoint() * (P1 * ((sc_s * r0_is) * Y0))).trace().real();
    const double t_lh = chol_d1.solve(Y1.adjoint() * (P1 * Y1)).trace().real();
    return {
        {"glr", t_glr},      {"rao", t_rao},    {"wald", t_wald}, {"gradient", t_grad},
        {"durbin", t_rao},   {"2s-glr", t_wald}, {"lh", t_lh},
    };
}

}  // namespace amdet
