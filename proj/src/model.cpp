#include "amdet/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "amdet/mis.hpp"

namespace amdet {

void validate_dims(const ProblemDims& d) {
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("dims(N=" + std::to_string(d.N) + ",K=" + std::to_string(d.K)
                                    + ",M=" + std::to_string(d.M) + ",r=" + std::to_string(d.r)
                                    + ",t=" + std::to_string(d.t) + "): " + why);
    };
    if (d.M < 1 || d.M > d.K) fail("need 1 <= M <= K");
    if (d.K - d.M < d.N) fail("need (K - M) >= N");
    if (d.r < 1) fail("need r >= 1");
    if (d.t < 0) fail("need t >= 0");
    if (d.J() < 1 || d.J() > d.N) fail("need 1 <= r + t <= N");
}

ProblemDims make_dims(int N, int K, int M, int r, int t) {
    ProblemDims d{N, K, M, r, t};
    validate_dims(d);
    return d;
}

CanonicalBases canonical_bases(const ProblemDims& dims) {
    validate_dims(dims);
    const int N = dims.N, K = dims.K, M = dims.M, r = dims.r, t = dims.t, J = dims.J();
    CanonicalBases b;
    b.Et = CMat::Zero(N, t);
    b.Et.topRows(t) = CMat::Identity(t, t);
    b.Er = CMat::Zero(N, r);
    b.Er.block(t, 0, r, r) = CMat::Identity(r, r);
    b.A = CMat::Zero(N, J);
    b.A.topRows(J) = CMat::Identity(J, J);
    b.C = CMat::Zero(M, K);
    b.C.leftCols(M) = CMat::Identity(M, M);
    b.Vc1 = CMat::Zero(K, M);
    b.Vc1.topRows(M) = CMat::Identity(M, M);
    b.Vc2 = CMat::Zero(K, K - M);
    b.Vc2.bottomRows(K - M) = CMat::Identity(K - M, K - M);
    return b;
}

namespace {

inline std::uint64_t avalanche(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial) {
    std::uint64_t k = avalanche(seed + 0x9E3779B97F4A7C15ULL);
    k = avalanche(k ^ (stream + 0x9E3779B97F4A7C15ULL));
    k = avalanche(k ^ (trial + 0x9E3779B97F4A7C15ULL));
    return k;
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial)
    : eng_(stream_key(seed, stream, trial)) {}

double StreamRng::unit_open() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double StreamRng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // Marsaglia polar: only sqrt and log touch libm, keeping the stream
    // reproducible for a given toolchain without trig dependencies.
    double u, v, s;
    do {
        u = 2.0 * unit_open() - 1.0;
        v = 2.0 * unit_open() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * m;
    has_cached_ = true;
    return u * m;
}

cplx StreamRng::cnormal() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
}

CMat StreamRng::cnormal_matrix(Eigen::Index rows, Eigen::Index cols) {
    CMat out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            out(i, j) = cnormal();
        }
    }
    return out;
}

HpdMat clutter_covariance(int N, double sigma_n2, double cnr_db, double corr) {
    if (!(sigma_n2 > 0.0)) {
        throw std::invalid_argument("clutter_covariance: sigma_n2 must be positive");
    }
    if (!(std::abs(corr) < 1.0)) {
        throw InvalidCorrelation("clutter_covariance: |corr| must be < 1, got "
                                 + std::to_string(corr));
    }
    const double sigma_c2 = sigma_n2 * std::pow(10.0, cnr_db / 10.0);
    CMat R(N, N);
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            double v = sigma_c2 * std::pow(corr, std::abs(i - j));
            if (i == j) v += sigma_n2;
            R(i, j) = v;
        }
    }
    return HpdMat(R);
}

CMat sample_disturbance_sqrt(const CMat& r_sqrt, int K, StreamRng& rng) {
    return r_sqrt * rng.cnormal_matrix(r_sqrt.rows(), K);
}

CMat sample_disturbance(const HpdMat& R, int K, StreamRng& rng) {
    return sample_disturbance_sqrt(hpd_sqrt(R).mat(), K, rng);
}

CMat scale_signal_to_sinr(const CMat& Bg, const HpdMat& R, const ProblemDims& dims,
                          double rho_target) {
    if (rho_target < 0.0) {
        throw std::invalid_argument("scale_signal_to_sinr: rho_target must be >= 0");
    }
    if (rho_target == 0.0) {
        return CMat::Zero(Bg.rows(), Bg.cols());
    }
    if (Bg.norm() == 0.0) {
        throw ZeroSignal("scale_signal_to_sinr: zero generator matrix");
    }
    const double denom = sinr(Bg, R, dims);
    return std::sqrt(rho_target / denom) * Bg;
}

void add_signal_support(CMat& Z, const ProblemDims& dims, const CMat& Bt, const CMat& B) {
    // A [Bt; B] C is the (t+r) x M stack dropped into the first J rows of the
    // first M columns; everything else is zero.
    if (dims.t > 0) {
        Z.block(0, 0, dims.t, dims.M) += Bt;
    }
    if (B.size() > 0) {
        Z.block(dims.t, 0, dims.r, dims.M) += B;
    }
}

CMat synthesize(const Scenario& scn, Hypothesis hyp, StreamRng& rng) {
    CMat Z = sample_disturbance(scn.R, scn.dims.K, rng);
    if (hyp == Hypothesis::H0) {
        add_signal_support(Z, scn.dims, scn.Bt0, CMat::Zero(scn.dims.r, scn.dims.M));
    } else {
        add_signal_support(Z, scn.dims, scn.Bt1, scn.B);
    }
    return Z;
}

}  // namespace amdet
