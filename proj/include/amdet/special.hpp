// Closed-form specializations of the detector suite: single-cell (point-like)
// targets with and without structured interference, multidimensional signals,
// range-spread targets, and the classical no-interference model. Each formula
// here is written directly from its reduced form; tests assert agreement with
// the general-path detectors on the same assembled data.
#pragma once

#include <map>
#include <string>

#include <amdet/matlin.hpp>
#include <amdet/model.hpp>

namespace amdet {

// Single cell under test plus secondary data (the M = 1 geometry).
struct PointLikeData {
    CMat zp;  // N x 1
    CMat Zs;  // N x (K-1)

    CMat full() const {
        CMat z(zp.rows(), 1 + Zs.cols());
        z << zp, Zs;
        return z;
    }
};

// A block of target cells plus secondary data; covers the multidimensional
// (J = N) and range-spread (r = 1) geometries.
struct SpreadData {
    CMat Ze;  // N x M
    CMat Zs;  // N x (K-M)

    CMat full() const {
        CMat z(Ze.rows(), Ze.cols() + Zs.cols());
        z << Ze, Zs;
        return z;
    }
};

struct KellyGlr {
    double eta;    // in [0, 1)
    double t_glr;  // 1 / (1 - eta)
};

// Subspace GLR for a single cell, no interference. A is the N x r signal
// basis.
KellyGlr kelly_eta(const PointLikeData& d, const CMat& A);

// |zp^H Sc^{-1} a|^2 / (a^H Sc^{-1} a), the adaptive matched filter (the
// Wald statistic at r = 1, t = 0).
double amf(const PointLikeData& d, const CMat& a);

// Score statistic for a single cell, no interference, any signal rank. Uses
// the rank-one update of the null covariance inverse rather than refactoring
// it; scaled to equal the general-path rao statistic exactly.
double rao_point_like(const PointLikeData& d, const CMat& A);

// All five statistics for a single cell, with t leading columns of A treated
// as interference (t = 0 gives the interference-free case), plus the scalar
// relations that tie them together.
struct PointLikeReport {
    double eta;
    double t_glr;
    double t_rao;
    double t_wald;
    double t_grad;
    double t_lh;
    double grad_gap;  // |t_grad - K*eta| relative; zero in exact arithmetic
    double lh_gap;    // |t_lh - t_glr*eta| relative; zero in exact arithmetic
    bool consistent;  // grad_gap <= 1e-8 and lh_gap <= 1e-9
};

PointLikeReport point_like_equivalences(const PointLikeData& d, const CMat& A, int t = 0);

// J = N, t = 0: projectors collapse and only three distinct values remain
// (rao = gradient, wald = lh, both pairs listed under all seven ids).
std::map<std::string, double> multidim_detectors(const SpreadData& d);

// r = 1, t = 0 extended target along steering vector a. The returned map
// carries the seven detector ids plus "eta", the scalar that drives the
// glr / gradient / lh family.
std::map<std::string, double> range_spread_detectors(const SpreadData& d, const CMat& a);

// t = 0, arbitrary r: the classical no-interference model, where the null
// projector vanishes and the H0 covariance estimate is Z Z^H / K.
std::map<std::string, double> gmanova_detectors(const CMat& Z, const ProblemDims& dims);

}  // namespace amdet
