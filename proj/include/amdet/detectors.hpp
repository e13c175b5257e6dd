// The seven detector statistics, each computable two ways: a "standard" form
// working on the raw data matrix and a form that depends on the data only
// through the maximal invariant pair (Ta, Tb). Agreement between the two is a
// tested contract, so nothing in here may shortcut one route through the
// other.
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <amdet/matlin.hpp>
#include <amdet/mis.hpp>
#include <amdet/model.hpp>

namespace amdet {

enum class DetectorId {
    glr,
    rao,
    wald,
    gradient,
    durbin,
    two_step_glr,
    lh,
};

inline constexpr std::array<DetectorId, 7> kAllDetectors = {
    DetectorId::glr,      DetectorId::rao,          DetectorId::wald,
    DetectorId::gradient, DetectorId::durbin,       DetectorId::two_step_glr,
    DetectorId::lh,
};

// Stable textual ids used in configs, CSV output and test names.
const char* to_string(DetectorId id);
std::optional<DetectorId> detector_from_string(std::string_view name);

// Closed-form ML estimates of the regression blocks and the disturbance
// covariance under each hypothesis.
struct MlEstimates {
    CMat Bs_hat;    // J x M, signal-plus-interference coordinates under H1
    CMat Bt0_hat;   // t x M, interference coordinates under H0
    HpdMat R1_hat;  // disturbance covariance estimate under H1
    HpdMat R0_hat;  // disturbance covariance estimate under H0
};

// Secondary-data and null-estimate whitened quantities shared by the
// standard-form detectors.
struct WhitenedViews {
    CMat A0;      // Sc^{-1/2} Et
    CMat A1;      // Sc^{-1/2} A
    CMat Zw1;     // Sc^{-1/2} Z
    CMat Zw0;     // R0_hat^{-1/2} Z
    CMat Abar0;   // R0_hat^{-1/2} Et
    CMat Abar1;   // R0_hat^{-1/2} A
    CMat Pdelta;  // P_{A1} - P_{A0}; Hermitian idempotent, trace r
};

struct DetectorReport {
    DetectorId id;
    double value_standard;
    double value_mis;
    double dual_form_gap;  // |standard - mis| / max(1, |standard|, |mis|)
};

MlEstimates ml_estimates(const CMat& Z, const ProblemDims& dims);
WhitenedViews whitened_views(const CMat& Z, const ProblemDims& dims);

DetectorReport glr(const CMat& Z, const ProblemDims& dims);
DetectorReport rao(const CMat& Z, const ProblemDims& dims);
DetectorReport wald(const CMat& Z, const ProblemDims& dims);
DetectorReport gradient(const CMat& Z, const ProblemDims& dims);
// Independent score-in-the-constrained-model route; must not delegate to
// rao() -- their equality is a verified theorem, not an implementation alias.
DetectorReport durbin(const CMat& Z, const ProblemDims& dims);
// Plug-in route with its own scaled secondary covariance estimate; equality
// with wald() is likewise a verified identity.
DetectorReport two_step_glr(const CMat& Z, const ProblemDims& dims);
DetectorReport lh(const CMat& Z, const ProblemDims& dims);

// All seven reports with the shared whitening work done once.
std::vector<DetectorReport> evaluate_all(const CMat& Z, const ProblemDims& dims);

// The five distinct invariant-domain statistics. Aliased detectors share a
// value: durbin carries rao's, two_step_glr carries wald's.
struct MisStatistics {
    double glr;
    double rao;
    double wald;
    double gradient;
    double lh;

    double value(DetectorId id) const;
};

// Hot path used by the Monte Carlo engine: (Ta, Tb, K) -> all statistics.
MisStatistics mis_statistics(const MisPair& mp, int K);

// Convenience map keyed by textual id (all seven ids present).
std::map<std::string, double> detectors_from_mis(const MisPair& mp, int K);

// Relative gaps of the alternative derivation routes and whitening
// identities. All of these are mathematically zero; the verification suite
// asserts they stay below tolerance on random data.
struct IdentityGaps {
    double ml_inverse_r1;        // R1_hat^{-1} A     vs K Sc^{-1} A
    double ml_inverse_r0;        // R0_hat^{-1} Et    vs K Sc^{-1} Et
    double rao_score_form;  // score-form rao    vs projector-form rao
    double wald_fim_form;   // FIM-form wald     vs projector-form wald
    double rao_whitening;   // null-whitened displaced data identity
    double rao_middle;      // score middle matrix vs P_{Abar1} - P_{Abar0}
    double wald_middle;     // FIM middle matrix vs Pdelta
    double grad_displaced;  // displaced-data identity in the gradient form
    double pdelta_idem;     // ||Pdelta^2 - Pdelta||_F
    double pdelta_trace;    // |trace(Pdelta) - r|
};

IdentityGaps identity_gaps(const CMat& Z, const ProblemDims& dims);

}  // namespace amdet
