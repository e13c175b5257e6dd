#pragma once

#include <cstdint>
#include <random>

#include "amdet/matlin.hpp"

namespace amdet {

// Canonical-form dimension tuple. N channels, K snapshots, M columns carrying
// signal, r signal-subspace rank, t interference-subspace rank, J = r + t.
struct ProblemDims {
    int N = 0;
    int K = 0;
    int M = 0;
    int r = 0;
    int t = 0;

    int J() const { return r + t; }
};

// Validating factory: 1 <= M <= K, (K - M) >= N, 1 <= J <= N, r >= 1, t >= 0.
ProblemDims make_dims(int N, int K, int M, int r, int t);
void validate_dims(const ProblemDims& dims);

// Identity-selector bases of the canonical coordinates.
//   Et = [I_t; 0]  (N x t)     interference left subspace
//   Er = [0; I_r; 0] (N x r)   signal left subspace
//   A  = [Et Er] = [I_J; 0]    joint left subspace
//   C  = [I_M 0]  (M x K)      right regressor
//   Vc1, Vc2: orthonormal bases with P_{C^H} = Vc1 Vc1^H, complement Vc2 Vc2^H.
struct CanonicalBases {
    CMat Et, Er, A, C, Vc1, Vc2;
};

CanonicalBases canonical_bases(const ProblemDims& dims);

// Ground truth for one synthetic experiment: signal matrix B (r x M),
// interference matrices under each hypothesis (t x M), disturbance covariance.
struct Scenario {
    ProblemDims dims;
    CMat B;
    CMat Bt0;
    CMat Bt1;
    HpdMat R;
};

enum class Hypothesis { H0, H1 };

// Deterministic random stream addressed by (seed, stream, trial). The engine
// is std::mt19937_64 (bit-stable by the standard) keyed through a splitmix64
// avalanche; Gaussian variates use the Marsaglia polar method because the
// stdlib normal distribution is implementation-defined and would break
// run-to-run reproducibility guarantees across toolchains.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t trial);

    double normal();
    // CN(0,1): independent real and imaginary parts, each N(0, 1/2).
    cplx cnormal();
    std::uint64_t next_u64() { return eng_(); }

    // Matrix of i.i.d. CN(0,1) entries, filled column-major.
    CMat cnormal_matrix(Eigen::Index rows, Eigen::Index cols);

private:
    double unit_open();  // uniform in [0, 1)
    std::mt19937_64 eng_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// R = sigma_n2 * I_N + sigma_c2 * Mc with sigma_c2 = sigma_n2 * 10^(cnr_db/10)
// and (Mc)_{ij} = corr^|i-j|. Throws InvalidCorrelation when |corr| >= 1.
HpdMat clutter_covariance(int N, double sigma_n2, double cnr_db, double corr);

// N x K disturbance with i.i.d. columns ~ CN(0, R), generated as R^{1/2} G.
CMat sample_disturbance(const HpdMat& R, int K, StreamRng& rng);

// Same, with the principal square root precomputed by the caller (hot path).
CMat sample_disturbance_sqrt(const CMat& r_sqrt, int K, StreamRng& rng);

// alpha * Bg with alpha = sqrt(rho_target / tr[Bg^H R_{2.3}^{-1} Bg]), so the
// induced invariant trace of the result equals rho_target exactly.
// rho_target = 0 returns the zero matrix. Throws ZeroSignal when Bg == 0.
CMat scale_signal_to_sinr(const CMat& Bg, const HpdMat& R, const ProblemDims& dims,
                          double rho_target);

// Mean part of the canonical observation: A [Bt; B] C materialized into the
// top-left J x M corner. Shared by synthesize and the Monte Carlo engine so
// the two never drift apart.
void add_signal_support(CMat& Z, const ProblemDims& dims, const CMat& Bt, const CMat& B);

// Z = A [Bt0; 0] C + N  (H0)   or   Z = A [Bt1; B] C + N  (H1).
CMat synthesize(const Scenario& scn, Hypothesis hyp, StreamRng& rng);

}  // namespace amdet
