#include <amdet/montecarlo.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <thread>

#include <amdet/errors.hpp>
#include <amdet/matlin.hpp>
#include <amdet/mis.hpp>

namespace amdet {

namespace {

struct Batch {
    std::vector<std::vector<double>> values;  // [detector][trial], NaN = discarded
    long long discarded = 0;
};

// One H0/H1 trial stream. Draw order inside a trial is fixed: the signal
// matrix (H1 only) first, then the disturbance, so a trial is reproducible
// from its (seed, stream, index) address alone.
Batch run_trials(const McConfig& cfg, const std::vector<DetectorId>& dets,
                 const HpdMat& R, const CMat& Bt, std::uint64_t stream,
                 long long n, bool under_h1, double rho_lin) {
    const ProblemDims& dims = cfg.dims;
    const CMat r_sqrt = hpd_sqrt(R).mat();
    const CMat zero_b = CMat::Zero(dims.r, dims.M);

    Batch batch;
    batch.values.assign(dets.size(), std::vector<double>(static_cast<std::size_t>(n)));
    std::atomic<long long> discarded{0};

    auto worker = [&](long long lo, long long hi) {
        long long local_discards = 0;
        for (long long trial = lo; trial < hi; ++trial) {
            StreamRng rng(cfg.seed, stream, static_cast<std::uint64_t>(trial));
            try {
                CMat b_sig;
                if (under_h1) {
                    CMat bg = rng.cnormal_matrix(dims.r, dims.M);
                    b_sig = scale_signal_to_sinr(bg, R, dims, rho_lin);
                }
                CMat z = sample_disturbance_sqrt(r_sqrt, dims.K, rng);
                add_signal_support(z, dims, Bt, under_h1 ? b_sig : zero_b);
                const MisStatistics st = mis_statistics(mis_from_data(z, dims), dims.K);
                for (std::size_t d = 0; d < dets.size(); ++d) {
                    batch.values[d][static_cast<std::size_t>(trial)] = st.value(dets[d]);
                }
            } catch (const NumericalError&) {
                ++local_discards;
                for (std::size_t d = 0; d < dets.size(); ++d) {
                    batch.values[d][static_cast<std::size_t>(trial)] =
                        std::numeric_limits<double>::quiet_NaN();
                }
            }
        }
        discarded += local_discards;
    };

    long long nthreads = cfg.threads > 0
                             ? cfg.threads
                             : static_cast<long long>(std::thread::hardware_concurrency());
    nthreads = std::clamp<long long>(nthreads, 1, std::max<long long>(n, 1));
    if (nthreads == 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        const long long chunk = (n + nthreads - 1) / nthreads;
        for (long long t = 0; t < nthreads; ++t) {
            const long long lo = t * chunk;
            const long long hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    batch.discarded = discarded.load();
    return batch;
}

double order_statistic_threshold(const std::vector<double>& raw, double pfa) {
    std::vector<double> vals;
    vals.reserve(raw.size());
    for (double v : raw) {
        if (!std::isnan(v)) vals.push_back(v);
    }
    if (vals.empty()) throw TooManyDiscards("calibration produced no valid trials");
    std::sort(vals.begin(), vals.end());
    const long long n = static_cast<long long>(vals.size());
    long long idx = static_cast<long long>(
        std::ceil(static_cast<double>(n) * (1.0 - pfa)));  // 1-based rank
    idx = std::clamp<long long>(idx, 1, n);
    return vals[static_cast<std::size_t>(idx - 1)];
}

// Exceedance is strictly greater-than; discarded trials drop out of both
// numerator and denominator.
PdPoint exceedance_point(DetectorId id, const std::vector<double>& vals,
                         double threshold, double rho_db) {
    long long valid = 0;
    long long hits = 0;
    for (double v : vals) {
        if (std::isnan(v)) continue;
        ++valid;
        if (v > threshold) ++hits;
    }
    PdPoint p;
    p.id = id;
    p.rho_db = rho_db;
    p.trials = valid;
    p.pd = valid > 0 ? static_cast<double>(hits) / static_cast<double>(valid) : 0.0;
    p.pd_stderr = valid > 0 ? std::sqrt(p.pd * (1.0 - p.pd) / static_cast<double>(valid)) : 0.0;
    return p;
}

double threshold_for(const ThresholdTable& thr, DetectorId id) {
    for (std::size_t i = 0; i < thr.detectors.size(); ++i) {
        if (thr.detectors[i] == id) return thr.thresholds[i];
    }
    throw ConfigError("threshold table has no entry for detector '" +
                      std::string(to_string(id)) + "'");
}

ThresholdTable calibrate_with(const McConfig& cfg, const HpdMat& R, const CMat& Bt) {
    const auto dets = selected_detectors(cfg);
    Batch batch = run_trials(cfg, dets, R, Bt, kStreamCal, cfg.cal_trials, false, 0.0);

    if (batch.discarded * 1000 > cfg.cal_trials) {
        throw TooManyDiscards("calibration discarded " + std::to_string(batch.discarded) +
                              " of " + std::to_string(cfg.cal_trials) + " trials");
    }

    ThresholdTable table;
    table.detectors = dets;
    table.thresholds.reserve(dets.size());
    for (std::size_t d = 0; d < dets.size(); ++d) {
        table.thresholds.push_back(order_statistic_threshold(batch.values[d], cfg.pfa_target));
    }
    table.trials = cfg.cal_trials;
    table.discarded = batch.discarded;
    table.seed = cfg.seed;
    return table;
}

std::vector<PdPoint> h0_exceedances(const McConfig& cfg, const ThresholdTable& thr,
                                    const HpdMat& R, const CMat& Bt, std::uint64_t stream) {
    const auto dets = selected_detectors(cfg);
    Batch batch = run_trials(cfg, dets, R, Bt, stream, cfg.cal_trials, false, 0.0);
    std::vector<PdPoint> rows;
    rows.reserve(dets.size());
    for (std::size_t d = 0; d < dets.size(); ++d) {
        rows.push_back(exceedance_point(dets[d], batch.values[d],
                                        threshold_for(thr, dets[d]),
                                        -std::numeric_limits<double>::infinity()));
    }
    return rows;
}

}  // namespace

std::vector<std::string> validate_config(const McConfig& cfg) {
    validate_dims(cfg.dims);
    if (!(cfg.pfa_target > 0.0 && cfg.pfa_target < 1.0)) {
        throw ConfigError("pfa_target must lie strictly between 0 and 1");
    }
    if (cfg.cal_trials < 1) throw ConfigError("cal_trials must be positive");
    if (cfg.pd_trials < 1) throw ConfigError("pd_trials must be positive");
    if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
    if (!(cfg.sigma_n2 > 0.0)) throw ConfigError("sigma_n2 must be positive");
    if (!(std::abs(cfg.corr) < 1.0)) throw ConfigError("corr must satisfy |corr| < 1");
    for (double rho : cfg.sinr_grid_db) {
        if (!std::isfinite(rho)) throw ConfigError("sinr_grid_db entries must be finite");
    }

    std::vector<std::string> warnings;
    const double recommended = 100.0 / cfg.pfa_target;
    if (static_cast<double>(cfg.cal_trials) < recommended) {
        warnings.push_back("cal_trials = " + std::to_string(cfg.cal_trials) +
                           " is below the recommended 100/pfa_target = " +
                           std::to_string(static_cast<long long>(recommended)) +
                           "; threshold estimates will be noisy");
    }
    return warnings;
}

std::vector<DetectorId> selected_detectors(const McConfig& cfg) {
    if (cfg.detectors.empty()) {
        return std::vector<DetectorId>(kAllDetectors.begin(), kAllDetectors.end());
    }
    std::vector<DetectorId> dets;
    for (DetectorId id : cfg.detectors) {
        if (std::find(dets.begin(), dets.end(), id) == dets.end()) dets.push_back(id);
    }
    return dets;
}

HpdMat config_covariance(const McConfig& cfg) {
    return clutter_covariance(cfg.dims.N, cfg.sigma_n2, cfg.cnr_db, cfg.corr);
}

CMat fixed_interference(const ProblemDims& dims, std::uint64_t seed) {
    StreamRng rng(seed, kStreamBt, 0);
    return rng.cnormal_matrix(dims.t, dims.M);
}

ThresholdTable calibrate(const McConfig& cfg) {
    return calibrate_with(cfg, config_covariance(cfg),
                          fixed_interference(cfg.dims, cfg.seed));
}

std::vector<PdPoint> estimate_pd(const McConfig& cfg, const ThresholdTable& thr,
                                 double rho_db, std::uint64_t stream) {
    const auto dets = selected_detectors(cfg);
    const HpdMat R = config_covariance(cfg);
    const CMat Bt = fixed_interference(cfg.dims, cfg.seed);
    const double rho_lin = std::pow(10.0, rho_db / 10.0);

    Batch batch = run_trials(cfg, dets, R, Bt, stream, cfg.pd_trials, true, rho_lin);
    std::vector<PdPoint> rows;
    rows.reserve(dets.size());
    for (std::size_t d = 0; d < dets.size(); ++d) {
        rows.push_back(exceedance_point(dets[d], batch.values[d],
                                        threshold_for(thr, dets[d]), rho_db));
    }
    return rows;
}

std::vector<PdPoint> estimate_pfa(const McConfig& cfg, const ThresholdTable& thr,
                                  const NuisanceVariant& variant, std::uint64_t stream) {
    if (variant.Bt.rows() != cfg.dims.t || variant.Bt.cols() != cfg.dims.M) {
        throw ConfigError("nuisance variant Bt must be t x M");
    }
    return h0_exceedances(cfg, thr, variant.R, variant.Bt, stream);
}

CfarReport cfar_check(const McConfig& cfg, const std::vector<NuisanceVariant>& variants) {
    if (variants.size() < 2) {
        throw ConfigError("cfar_check needs at least two nuisance variants");
    }
    const ProblemDims& dims = cfg.dims;
    for (const auto& v : variants) {
        if (v.Bt.rows() != dims.t || v.Bt.cols() != dims.M) {
            throw ConfigError("nuisance variant Bt must be t x M");
        }
        if (v.R.mat().rows() != dims.N) {
            throw ConfigError("nuisance variant R must be N x N");
        }
    }

    const auto dets = selected_detectors(cfg);
    CfarReport report;

    ThresholdTable thr = calibrate_with(cfg, variants[0].R, variants[0].Bt);

    const double band = 3.0 * std::sqrt(cfg.pfa_target * (1.0 - cfg.pfa_target) /
                                        static_cast<double>(cfg.cal_trials));
    bool all_pass = true;
    for (std::size_t v = 1; v < variants.size(); ++v) {
        auto rows = h0_exceedances(cfg, thr, variants[v].R, variants[v].Bt,
                                   kStreamCfarBase + v);
        for (const auto& row : rows) {
            CfarVariantResult res;
            res.pfa_hat = row.pd;
            res.trials = row.trials;
            res.band = band;
            res.pass = std::abs(row.pd - cfg.pfa_target) <= band;
            all_pass = all_pass && res.pass;
            report.reestimates.push_back(res);
        }
    }

    // Deterministic invariance: with the disturbance realization held fixed,
    // replacing the interference matrix must leave every statistic unchanged.
    StreamRng rng(cfg.seed, kStreamInvariance, 0);
    const CMat noise = sample_disturbance(variants[0].R, dims.K, rng);
    const CMat zero_b = CMat::Zero(dims.r, dims.M);
    auto stats_for = [&](const CMat& bt) {
        CMat z = noise;
        add_signal_support(z, dims, bt, zero_b);
        return mis_statistics(mis_from_data(z, dims), dims.K);
    };
    const MisStatistics base = stats_for(variants[0].Bt);
    double max_gap = 0.0;
    auto probe = [&](const CMat& bt) {
        const MisStatistics st = stats_for(bt);
        for (DetectorId id : dets) {
            const double a = base.value(id);
            const double b = st.value(id);
            const double gap = std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
            max_gap = std::max(max_gap, gap);
        }
    };
    probe(variants[0].Bt * 0.0);
    probe(variants[0].Bt);
    probe(variants[0].Bt * 100.0);
    for (std::size_t v = 1; v < variants.size(); ++v) probe(variants[v].Bt);

    report.max_bt_gap = max_gap;
    report.deterministic_pass = max_gap <= 1e-9;
    report.pass = all_pass && report.deterministic_pass;
    return report;
}

PdCurve pd_vs_sinr(const McConfig& cfg) {
    PdCurve curve;
    curve.thresholds = calibrate(cfg);

    // Substream ids follow the ascending rank of each grid point, so
    // reordering the grid in the config changes nothing downstream.
    std::vector<std::size_t> order(cfg.sinr_grid_db.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cfg.sinr_grid_db[a] < cfg.sinr_grid_db[b];
    });

    const auto dets = selected_detectors(cfg);
    std::vector<std::vector<PdPoint>> by_point;
    by_point.reserve(order.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        by_point.push_back(estimate_pd(cfg, curve.thresholds,
                                       cfg.sinr_grid_db[order[rank]],
                                       kStreamPdBase + rank));
    }

    for (std::size_t d = 0; d < dets.size(); ++d) {
        for (const auto& rows : by_point) {
            curve.rows.push_back(rows[d]);
        }
    }
    return curve;
}

}  // namespace amdet
