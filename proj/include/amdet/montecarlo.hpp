// Threshold calibration, P_fa / P_d estimation and CFAR verification.
//
// Determinism contract: every trial draws from its own substream addressed by
// (seed, stream, trial index), so results are bit-identical for a given
// (config, seed) no matter how trials are partitioned across threads. Stream
// ids: kStreamBt fixes the nuisance interference matrix, kStreamCal feeds
// calibration, the g-th smallest grid point of a sweep uses kStreamPdBase + g,
// CFAR re-estimation variant v uses kStreamCfarBase + v.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <amdet/detectors.hpp>
#include <amdet/model.hpp>

namespace amdet {

inline constexpr std::uint64_t kStreamBt = 0;
inline constexpr std::uint64_t kStreamCal = 1;
inline constexpr std::uint64_t kStreamPdBase = 2;
inline constexpr std::uint64_t kStreamCfarBase = std::uint64_t{1} << 32;
inline constexpr std::uint64_t kStreamInvariance = std::uint64_t{1} << 48;

struct McConfig {
    ProblemDims dims;
    double pfa_target = 1e-2;
    long long cal_trials = 100000;
    long long pd_trials = 5000;
    std::vector<double> sinr_grid_db;
    std::uint64_t seed = 1;
    double cnr_db = 30.0;
    double corr = 0.95;
    double sigma_n2 = 1.0;
    std::vector<DetectorId> detectors;  // empty selects all seven
    int threads = 0;                    // 0 = hardware concurrency
};

// Throws ConfigError on hard violations; returns protocol warnings (e.g.
// cal_trials below 100/pfa_target) for the caller to surface.
std::vector<std::string> validate_config(const McConfig& cfg);

// Explicit selection, or all seven in declaration order when none given.
std::vector<DetectorId> selected_detectors(const McConfig& cfg);

// Disturbance covariance implied by the scenario parameters.
HpdMat config_covariance(const McConfig& cfg);

// The fixed nonzero interference matrix used during calibration. CFARness
// makes the choice immaterial (cfar_check verifies exactly that), but
// determinism requires pinning it; it is drawn once from the seed.
CMat fixed_interference(const ProblemDims& dims, std::uint64_t seed);

struct ThresholdTable {
    std::vector<DetectorId> detectors;
    std::vector<double> thresholds;  // parallel to detectors
    long long trials = 0;            // calibration trials attempted
    long long discarded = 0;
    std::uint64_t seed = 0;
};

struct PdPoint {
    DetectorId id;
    double rho_db;
    double pd;
    double pd_stderr;  // binomial standard error
    long long trials;  // valid (non-discarded) trials behind the estimate
};

struct PdCurve {
    ThresholdTable thresholds;
    std::vector<PdPoint> rows;  // detector-major, rho ascending within detector
};

struct NuisanceVariant {
    HpdMat R;
    CMat Bt;  // t x M
};

struct CfarVariantResult {
    double pfa_hat = 0.0;
    double band = 0.0;  // 3 sigma binomial half-width around pfa_target
    long long trials = 0;
    bool pass = false;
};

struct CfarReport {
    std::vector<CfarVariantResult> reestimates;  // one per variant beyond the first
    double max_bt_gap = 0.0;  // deterministic invariance: max relative statistic
                              // change under interference replacement
    bool deterministic_pass = false;
    bool pass = false;
};

// H0 simulation; threshold per detector at the ascending order statistic of
// index ceil(cal_trials * (1 - pfa_target)), 1-based. Exceedance downstream
// is strict (>). Throws TooManyDiscards when more than 0.1% of trials fail
// numerically.
ThresholdTable calibrate(const McConfig& cfg);

// One sweep point: H1 trials at the given SINR (dB), all selected detectors
// evaluated on the same per-trial dataset.
std::vector<PdPoint> estimate_pd(const McConfig& cfg, const ThresholdTable& thr,
                                 double rho_db, std::uint64_t stream = kStreamPdBase);

// Fresh-trial P_fa estimate at externally supplied thresholds under an
// arbitrary (R, Bt) pair; backbone of the empirical CFAR check.
std::vector<PdPoint> estimate_pfa(const McConfig& cfg, const ThresholdTable& thr,
                                  const NuisanceVariant& variant, std::uint64_t stream);

// Calibrate under variants[0], re-estimate P_fa under each other variant,
// plus the deterministic invariance test (same noise, replaced Bt must leave
// every statistic unchanged).
CfarReport cfar_check(const McConfig& cfg, const std::vector<NuisanceVariant>& variants);

// Full curve: one calibration, then every grid point, rows ordered by
// detector declaration order and ascending SINR.
PdCurve pd_vs_sinr(const McConfig& cfg);

}  // namespace amdet
