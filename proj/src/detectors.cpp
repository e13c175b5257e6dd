#include <amdet/detectors.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <amdet/errors.hpp>

namespace amdet {

namespace {

CMat hermitize(const CMat& x) { return 0.5 * (x + x.adjoint()); }

// Cholesky with failures mapped onto the detector-level error type. The
// matrices passed here are PD by construction on sane inputs; a failure means
// the trial is numerically degenerate and should be discarded upstream.
Eigen::LLT<CMat> chol(const CMat& s, const char* what) {
    Eigen::LLT<CMat> llt(hermitize(s));
    if (llt.info() != Eigen::Success) {
        throw SingularBlock(std::string(what) + ": Cholesky factorization failed");
    }
    return llt;
}

double chol_logdet(const Eigen::LLT<CMat>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().real().array().log().sum();
}

double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double rel_mat_gap(const CMat& a, const CMat& b) {
    if (a.size() == 0 && b.size() == 0) return 0.0;
    return (a - b).norm() / std::max({1.0, a.norm(), b.norm()});
}

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

// Displaced-data fits and the two covariance estimates, shared by
// ml_estimates and the detector workspace so the formulas exist once.
struct CovEst {
    CMat sc_s, sc_is, sc_inv;
    CMat P_A0, P_A1;
    CMat Y1;    // Sc^{-1/2} Zc
    CMat X0c;   // Zc - Sc^{1/2} P_A0 Sc^{-1/2} Zc  (displaced primary columns, H0 fit)
    CMat r0, r1;
};

CovEst covariance_estimates(const DataSplit& split, const CanonicalBases& b,
                            const ProblemDims& dims) {
    CovEst e;
    e.sc_s = hpd_sqrt(split.Sc).mat();
    e.sc_is = hpd_inv_sqrt(split.Sc).mat();
    e.sc_inv = hermitize(e.sc_is * e.sc_is);
    e.P_A0 = projector(e.sc_is * b.Et);
    e.P_A1 = projector(e.sc_is * b.A);
    e.Y1 = e.sc_is * split.Zc;
    const double K = dims.K;
    e.X0c = split.Zc - e.sc_s * (e.P_A0 * e.Y1);
    CMat X1c = split.Zc - e.sc_s * (e.P_A1 * e.Y1);
    e.r0 = hermitize((split.Sc.mat() + e.X0c * e.X0c.adjoint()) / K);
    e.r1 = hermitize((split.Sc.mat() + X1c * X1c.adjoint()) / K);
    return e;
}

HpdMat hpd_or_singular(const CMat& s, const char* what) {
    try {
        return HpdMat(s);
    } catch (const NotPositiveDefinite& ex) {
        throw SingularBlock(std::string(what) + ": " + ex.what());
    }
}

// Everything the standard-form statistics need, computed once per Z.
struct Ctx {
    ProblemDims dims;
    CanonicalBases bases;
    CMat Z;
    CMat Zc;
    CMat sc;
    CovEst cov;
    CMat Pdelta;
    CMat r0_is, r0_inv;
    CMat Y0;  // R0_hat^{-1/2} Zc
    CMat Abar0, Abar1, P_Ab0, P_Ab1;
    MisPair mp;
};

Ctx make_ctx(const CMat& Z, const ProblemDims& dims) {
    validate_dims(dims);
    if (Z.rows() != dims.N || Z.cols() != dims.K) {
        throw std::invalid_argument("detector input: Z must be N x K");
    }
    Ctx c;
    c.dims = dims;
    c.bases = canonical_bases(dims);
    c.Z = Z;
    DataSplit split = split_data(Z, dims);
    c.Zc = split.Zc;
    c.sc = split.Sc.mat();
    c.cov = covariance_estimates(split, c.bases, dims);
    c.Pdelta = c.cov.P_A1 - c.cov.P_A0;

    HpdMat r0h = hpd_or_singular(c.cov.r0, "H0 covariance estimate");
    c.r0_is = hpd_inv_sqrt(r0h).mat();
    c.r0_inv = hermitize(c.r0_is * c.r0_is);
    c.Y0 = c.r0_is * c.Zc;
    c.Abar0 = c.r0_is * c.bases.Et;
    c.Abar1 = c.r0_is * c.bases.A;
    c.P_Ab0 = projector(c.Abar0);
    c.P_Ab1 = projector(c.Abar1);

    c.mp = compute_mis(partition_blocks(split, dims), dims);
    return c;
}

// ---- standard (data-domain) forms ----

double glr_std(const Ctx& c) {
    const int M = c.dims.M;
    const CMat I = CMat::Identity(M, M);
    // residuals against each fitted subspace; Gram keeps D0, D1 PSD exactly
    CMat U0 = c.cov.Y1 - c.cov.P_A0 * c.cov.Y1;
    CMat U1 = c.cov.Y1 - c.cov.P_A1 * c.cov.Y1;
    const double ld0 = chol_logdet(chol(I + U0.adjoint() * U0, "glr D0"));
    const double ld1 = chol_logdet(chol(I + U1.adjoint() * U1, "glr D1"));
    return std::exp(ld0 - ld1);
}

double rao_std(const Ctx& c) {
    return (c.Y0.adjoint() * ((c.P_Ab1 - c.P_Ab0) * c.Y0)).trace().real();
}

double wald_std(const Ctx& c) {
    return (c.cov.Y1.adjoint() * (c.Pdelta * c.cov.Y1)).trace().real();
}

double gradient_std(const Ctx& c) {
    // mixed form: H1-whitened data against the H0-whitened fit
    CMat cross = c.cov.sc_s * c.r0_is;
    return (c.cov.Y1.adjoint() * (c.Pdelta * (cross * c.Y0))).trace().real();
}

double lh_std(const Ctx& c) {
    const int M = c.dims.M;
    CMat U1 = c.cov.Y1 - c.cov.P_A1 * c.cov.Y1;
    CMat D1 = CMat::Identity(M, M) + U1.adjoint() * U1;
    CMat num = c.cov.Y1.adjoint() * (c.Pdelta * c.cov.Y1);
    return chol(D1, "lh D1").solve(num).trace().real();
}

// Gamma0 = (A^H R0_hat^{-1} A)^{-1}, the H0-information matrix inverse whose
// trailing r x r block normalizes the score.
CMat gamma0(const Ctx& c) {
    CMat G = c.bases.A.adjoint() * (c.r0_inv * c.bases.A);
    return chol(G, "H0 information").solve(CMat::Identity(G.rows(), G.cols()));
}

double durbin_std(const Ctx& c) {
    // Estimate the free block under the constrained (null) fit, then weight
    // it with the Kronecker-structured information factors. Deliberately a
    // different route from rao_std: their agreement is a tested theorem.
    const auto& b = c.bases;
    const int t = c.dims.t, r = c.dims.r, M = c.dims.M;
    CMat CCt = b.C * b.C.adjoint();
    auto chol_cct = chol(CCt, "durbin CC^H");
    CMat W = b.Er.adjoint() * (c.r0_inv * b.Er);
    CMat G22 = gamma0(c).block(t, t, r, r);
    CMat rhs = b.Er.adjoint() * (c.r0_inv * c.cov.X0c);
    CMat B0 = chol(W, "durbin weighting").solve(rhs);
    B0 = chol_cct.solve(B0.adjoint()).adjoint();  // B0 (CC^H)^{-1}
    CMat icc = chol_cct.solve(CMat::Identity(M, M));
    CMat T0 = kron(icc.transpose(), G22);
    CMat Tbar0 = kron(CCt.transpose(), W);
    Eigen::Map<const Eigen::VectorXcd> v(B0.data(), B0.size());
    return (v.adjoint() * (Tbar0 * (T0 * (Tbar0 * v))))(0).real();
}

double two_step_std(const CMat& Z, const ProblemDims& dims) {
    // Known-covariance statistic evaluated at the scaled secondary estimate,
    // then divided by the same constant the final proportional form drops.
    // Runs its own whitening end to end so agreement with wald_std is a
    // genuine cross-check, not a shared intermediate.
    CanonicalBases b = canonical_bases(dims);
    DataSplit split = split_data(Z, dims);
    const double km = dims.K - dims.M;
    HpdMat rsd = hpd_or_singular(split.Sc.mat() / km, "two-step covariance estimate");
    CMat w = hpd_inv_sqrt(rsd).mat();
    CMat pd = projector(w * b.A) - projector(w * b.Et);
    CMat Yw = w * split.Zc;
    return (Yw.adjoint() * (pd * Yw)).trace().real() / km;
}

DetectorReport make_report(DetectorId id, double std_val, double mis_val) {
    return DetectorReport{id, std_val, mis_val, rel_gap(std_val, mis_val)};
}

}  // namespace

const char* to_string(DetectorId id) {
    switch (id) {
        case DetectorId::glr: return "glr";
        case DetectorId::rao: return "rao";
        case DetectorId::wald: return "wald";
        case DetectorId::gradient: return "gradient";
        case DetectorId::durbin: return "durbin";
        case DetectorId::two_step_glr: return "2s-glr";
        case DetectorId::lh: return "lh";
    }
    return "?";
}

std::optional<DetectorId> detector_from_string(std::string_view name) {
    for (DetectorId id : kAllDetectors) {
        if (name == to_string(id)) return id;
    }
    return std::nullopt;
}

MlEstimates ml_estimates(const CMat& Z, const ProblemDims& dims) {
    validate_dims(dims);
    if (Z.rows() != dims.N || Z.cols() != dims.K) {
        throw std::invalid_argument("ml_estimates: Z must be N x K");
    }
    CanonicalBases b = canonical_bases(dims);
    DataSplit split = split_data(Z, dims);

    CMat sc_inv_A = solve_hpd(split.Sc, b.A);
    CMat G1 = b.A.adjoint() * sc_inv_A;
    CMat Bs = chol(G1, "signal Gram").solve(sc_inv_A.adjoint() * split.Zc);

    CMat Bt0(dims.t, dims.M);
    if (dims.t > 0) {
        CMat sc_inv_Et = solve_hpd(split.Sc, b.Et);
        CMat G0 = b.Et.adjoint() * sc_inv_Et;
        Bt0 = chol(G0, "interference Gram").solve(sc_inv_Et.adjoint() * split.Zc);
    }

    CovEst e = covariance_estimates(split, b, dims);
    return MlEstimates{std::move(Bs), std::move(Bt0),
                       hpd_or_singular(e.r1, "H1 covariance estimate"),
                       hpd_or_singular(e.r0, "H0 covariance estimate")};
}

WhitenedViews whitened_views(const CMat& Z, const ProblemDims& dims) {
    Ctx c = make_ctx(Z, dims);
    WhitenedViews v;
    v.A0 = c.cov.sc_is * c.bases.Et;
    v.A1 = c.cov.sc_is * c.bases.A;
    v.Zw1 = c.cov.sc_is * Z;
    v.Zw0 = c.r0_is * Z;
    v.Abar0 = c.Abar0;
    v.Abar1 = c.Abar1;
    v.Pdelta = c.Pdelta;
    return v;
}

DetectorReport glr(const CMat& Z, const ProblemDims& dims) {
    Ctx c = make_ctx(Z, dims);
    return make_report(DetectorId::glr, glr_std(c), mis_statistics(c.mp, dims.K).glr);
}

DetectorReport rao(const CMat& Z, const ProblemDims& dims) {
    Ctx c = make_ctx(Z, dims);
    return make_report(DetectorId::rao, rao_std(c), mis_statistics(c.mp, dims.K).rao);
}

DetectorReport wald(const CMat& Z, const ProblemDims& dims) {
    Ctx c = make_ctx(Z, dims);
    return make_report(DetectorId::wald, wald_std(c), mis_statistics(c.mp, dims.K).wald);
}

DetectorReport gradient(const CMat& Z, const ProblemDims& dims) {
    Ctx c = make_ctx(Z, dims);
    return make_report(DetectorId::gradient, gradient_std(c),
                       mis_statistics(c.mp, dims.K).gradient);
}

DetectorReport durbin(const CMat& Z, const ProblemDims& dims) {
    Ctx c = make_ctx(Z, dims);
    return make_report(DetectorId::durbin, durbin_std(c), mis_statistics(c.mp, dims.K).rao);
}

DetectorReport two_step_glr(const CMat& Z, const ProblemDims& dims) {
    Ctx c = make_ctx(Z, dims);
    return make_report(DetectorId::two_step_glr, two_step_std(Z, dims),
                       mis_statistics(c.mp, dims.K).wald);
}

DetectorReport lh(const CMat& Z, const ProblemDims& dims) {
    Ctx c = make_ctx(Z, dims);
    return make_report(DetectorId::lh, lh_std(c), mis_statistics(c.mp, dims.K).lh);
}

std::vector<DetectorReport> evaluate_all(const CMat& Z, const ProblemDims& dims) {
    Ctx c = make_ctx(Z, dims);
    MisStatistics m = mis_statistics(c.mp, dims.K);
    std::vector<DetectorReport> out;
    out.reserve(kAllDetectors.size());
    out.push_back(make_report(DetectorId::glr, glr_std(c), m.glr));
    out.push_back(make_report(DetectorId::rao, rao_std(c), m.rao));
    out.push_back(make_report(DetectorId::wald, wald_std(c), m.wald));
    out.push_back(make_report(DetectorId::gradient, gradient_std(c), m.gradient));
    out.push_back(make_report(DetectorId::durbin, durbin_std(c), m.rao));
    out.push_back(make_report(DetectorId::two_step_glr, two_step_std(Z, dims), m.wald));
    out.push_back(make_report(DetectorId::lh, lh_std(c), m.lh));
    return out;
}

double MisStatistics::value(DetectorId id) const {
    switch (id) {
        case DetectorId::glr: return glr;
        case DetectorId::rao: return rao;
        case DetectorId::wald: return wald;
        case DetectorId::gradient: return gradient;
        case DetectorId::durbin: return rao;
        case DetectorId::two_step_glr: return wald;
        case DetectorId::lh: return lh;
    }
    return 0.0;
}

MisStatistics mis_statistics(const MisPair& mp, int K) {
    const Eigen::Index M = mp.Ta.rows();
    const CMat I = CMat::Identity(M, M);
    CMat S = mp.Ta + mp.Tb;
    auto cS = chol(I + S, "I + Ta + Tb");
    auto cB = chol(I + mp.Tb, "I + Tb");
    CMat iS = cS.solve(I);
    CMat iB = cB.solve(I);
    const double k = K;
    MisStatistics out{};
    out.glr = std::exp(chol_logdet(cS) - chol_logdet(cB));
    out.rao = k * (mp.Ta - S * iS * S + mp.Tb * iB * mp.Tb).trace().real();
    out.wald = mp.Ta.trace().real();
    out.gradient = k * (mp.Ta * (I - iS * S)).trace().real();
    out.lh = (mp.Ta * iB).trace().real();
    return out;
}

std::map<std::string, double> detectors_from_mis(const MisPair& mp, int K) {
    MisStatistics m = mis_statistics(mp, K);
    std::map<std::string, double> out;
    for (DetectorId id : kAllDetectors) {
        out.emplace(to_string(id), m.value(id));
    }
    return out;
}

IdentityGaps identity_gaps(const CMat& Z, const ProblemDims& dims) {
    Ctx c = make_ctx(Z, dims);
    const auto& b = c.bases;
    const double K = dims.K;
    const int t = dims.t, r = dims.r;
    const CMat I_N = CMat::Identity(dims.N, dims.N);
    IdentityGaps g{};

    g.ml_inverse_r1 = rel_mat_gap(chol(c.cov.r1, "R1 estimate").solve(b.A),
                             K * (c.cov.sc_inv * b.A));
    g.ml_inverse_r0 = rel_mat_gap(chol(c.cov.r0, "R0 estimate").solve(b.Et),
                             K * (c.cov.sc_inv * b.Et));

    // score route against the compact projector-difference form
    CMat G22 = gamma0(c).block(t, t, r, r);
    CMat core0 = c.r0_inv * b.Er * G22 * b.Er.adjoint() * c.r0_inv;
    const double rao_score = (c.cov.X0c.adjoint() * (core0 * c.cov.X0c)).trace().real();
    g.rao_score_form = rel_gap(rao_score, rao_std(c));

    // FIM route against the compact form, plus the middle-matrix collapse
    CMat G1 = b.A.adjoint() * chol(c.cov.r1, "R1 estimate").solve(b.A);
    CMat Gam1 = chol(G1, "H1 information").solve(CMat::Identity(G1.rows(), G1.cols()));
    CMat G122 = Gam1.block(t, t, r, r);
    CMat P0p = I_N - c.cov.P_A0;
    CMat core1 = K * (P0p * c.cov.sc_is * b.Er * G122 * b.Er.adjoint() * c.cov.sc_is * P0p);
    const double wald_fim = (c.cov.Y1.adjoint() * (core1 * c.cov.Y1)).trace().real();
    g.wald_fim_form = rel_gap(wald_fim, wald_std(c));
    g.wald_middle = rel_mat_gap(core1, c.Pdelta);

    g.rao_whitening = rel_mat_gap(c.r0_is * c.cov.X0c, (I_N - c.P_Ab0) * c.Y0);
    CMat P0bp = I_N - c.P_Ab0;
    CMat mid0 = P0bp * c.r0_is * b.Er * G22 * b.Er.adjoint() * c.r0_is * P0bp;
    g.rao_middle = rel_mat_gap(mid0, c.P_Ab1 - c.P_Ab0);

    g.grad_displaced = rel_mat_gap(c.r0_inv * c.cov.X0c,
                                   c.cov.sc_is * (P0p * ((c.cov.sc_s * c.r0_inv) * c.Zc)));

    g.pdelta_idem = (c.Pdelta * c.Pdelta - c.Pdelta).norm();
    g.pdelta_trace = std::abs(c.Pdelta.trace().real() - r);
    return g;
}

}  // namespace amdet
