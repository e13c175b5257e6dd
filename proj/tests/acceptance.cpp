// Acceptance gate for the detector suite. Eight checks, one line each, exit 0
// only when every one passes. The first five are algebraic and reuse the
// property suite; the last three run the Monte Carlo harness at a scale that
// finishes on a laptop.
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <amdet/matlin.hpp>
#include <amdet/model.hpp>
#include <amdet/montecarlo.hpp>
#include <amdet/verify.hpp>

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return std::string(buf);
}

const amdet::PropertyResult* find_row(const std::vector<amdet::PropertyResult>& rows,
                                      const std::string& name) {
    for (const auto& r : rows) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

const amdet::PdPoint& find_pd(const amdet::PdCurve& curve, amdet::DetectorId id,
                              double rho_db) {
    for (const auto& p : curve.rows) {
        if (p.id == id && p.rho_db == rho_db) return p;
    }
    std::fprintf(stderr, "missing curve row for %s at %g dB\n",
                 std::string(amdet::to_string(id)).c_str(), rho_db);
    std::exit(3);
}

}  // namespace

int main() {
    bool all = true;
    auto line = [&all](int idx, bool pass, const std::string& text) {
        std::printf("criterion %d %s  %s\n", idx, pass ? "PASS" : "FAIL", text.c_str());
        std::fflush(stdout);
        all = all && pass;
    };

    // ---- Algebraic criteria (1-5) share one property-suite run. ----
    amdet::VerifyOptions opt;
    opt.instances = 170;  // 6 dimension sets, so 1020 instances per property
    opt.seed = 101;
    const auto t_suite = Clock::now();
    const auto rows = amdet::run_property_suite(opt);
    const double suite_s = seconds_since(t_suite);

    {
        double worst = 0.0;
        long long n = LLONG_MAX;
        bool ok = true;
        for (amdet::DetectorId id : amdet::kAllDetectors) {
            const auto* r =
                find_row(rows, "dual-form: " + std::string(amdet::to_string(id)));
            if (!r || !r->pass || r->instances < 1000) ok = false;
            if (r) {
                worst = std::max(worst, r->max_gap);
                n = std::min(n, r->instances);
            }
        }
        ok = ok && suite_s <= 30.0;
        line(1, ok,
             fmt("standard and invariant forms agree within 1e-8 relative "
                 "(max gap %.2e, %lld instances per detector, %.1f s)",
                 worst, n == LLONG_MAX ? 0LL : n, suite_s));
    }

    {
        const auto* w2 = find_row(rows, "wald == 2s-glr");
        const auto* dr = find_row(rows, "durbin == rao");
        const bool ok = w2 && w2->pass && dr && dr->pass && suite_s <= 30.0;
        line(2, ok,
             fmt("wald == 2s-glr within 1e-10 (max gap %.2e) and durbin == rao "
                 "within 1e-8 (max gap %.2e), %.1f s",
                 w2 ? w2->max_gap : 1.0, dr ? dr->max_gap : 1.0, suite_s));
    }

    {
        const auto* r1 = find_row(rows, "R1inv*A == K*Scinv*A");
        const auto* r0 = find_row(rows, "R0inv*Et == K*Scinv*Et");
        const bool ok = r1 && r1->pass && r1->instances >= 1000 && r0 && r0->pass &&
                        r0->instances >= 1000;
        line(3, ok,
             fmt("ML-covariance inverse identities hold within 1e-10 "
                 "(max gaps %.2e, %.2e on %lld instances)",
                 r1 ? r1->max_gap : 1.0, r0 ? r0->max_gap : 1.0,
                 r1 ? r1->instances : 0LL));
    }

    {
        const char* names[] = {"point-like reduction",
                               "point-like gradient = K*eta",
                               "point-like lh chain",
                               "point-like glr via eta",
                               "point-like rao closed form",
                               "matched-filter = wald (r=1)",
                               "multidim reduction",
                               "multidim shared forms",
                               "range-spread reduction",
                               "range-spread lh = glr - 1",
                               "no-interference reduction"};
        bool ok = true;
        double worst_ratio = 0.0;
        for (const char* name : names) {
            const auto* r = find_row(rows, name);
            if (!r || !r->pass) ok = false;
            if (r) worst_ratio = std::max(worst_ratio, r->max_gap / r->tolerance);
        }
        line(4, ok,
             fmt("special-case formulas match the general path at their "
                 "tolerances (worst gap at %.3f of tolerance, 11 checks)",
                 worst_ratio));
    }

    {
        const auto* inv = find_row(rows, "interference invariance");
        const bool ok = inv && inv->pass;
        line(5, ok,
             fmt("with noise fixed, interference x0/x1/x100 moves no statistic "
                 "by more than 1e-9 relative (max gap %.2e)",
                 inv ? inv->max_gap : 1.0));
    }

    // ---- Monte Carlo criteria (6-8). ----
    amdet::McConfig base;
    base.pfa_target = 1e-2;
    base.cal_trials = 100000;
    base.pd_trials = 5000;
    base.sinr_grid_db = {6, 9, 12, 15, 18, 21, 24};
    base.seed = 101;
    base.cnr_db = 30.0;
    base.corr = 0.95;
    base.sigma_n2 = 1.0;
    base.threads = 0;

    {
        amdet::McConfig cfg = base;
        cfg.dims = amdet::make_dims(8, 19, 3, 2, 4);
        const auto t0 = Clock::now();
        std::vector<amdet::NuisanceVariant> variants;
        const amdet::HpdMat r1 = amdet::config_covariance(cfg);
        variants.push_back({r1, amdet::fixed_interference(cfg.dims, cfg.seed)});
        amdet::StreamRng rng(cfg.seed, amdet::kStreamBt, 1);
        variants.push_back({amdet::HpdMat(amdet::CMat(10.0 * r1.mat())),
                            rng.cnormal_matrix(cfg.dims.t, cfg.dims.M)});
        const amdet::CfarReport rep = amdet::cfar_check(cfg, variants);
        const double s = seconds_since(t0);

        double worst = 0.0;
        for (const auto& v : rep.reestimates) {
            worst = std::max(worst, std::abs(v.pfa_hat - cfg.pfa_target));
        }
        const double band = rep.reestimates.empty() ? 0.0 : rep.reestimates[0].band;
        const bool ok = rep.pass && s <= 300.0;
        line(6, ok,
             fmt("false-alarm rate re-estimated under (10*R, new Bt) stays "
                 "within +/-%.2e of 1e-2 for all detectors (max dev %.2e, "
                 "1e5 + 1e5 trials, %.1f s)",
                 band, worst, s));
    }

    amdet::McConfig cfg_b = base;
    cfg_b.dims = amdet::make_dims(8, 19, 3, 2, 4);
    amdet::PdCurve curve_b;

    {
        const auto t0 = Clock::now();
        amdet::McConfig cfg_d = base;
        cfg_d.dims = amdet::make_dims(8, 19, 3, 4, 2);
        amdet::McConfig cfg_c = base;
        cfg_c.dims = amdet::make_dims(8, 12, 3, 4, 2);

        curve_b = amdet::pd_vs_sinr(cfg_b);
        const amdet::PdCurve curve_d = amdet::pd_vs_sinr(cfg_d);
        const amdet::PdCurve curve_c = amdet::pd_vs_sinr(cfg_c);
        const double s = seconds_since(t0);

        // (a) sample-rich cases: all seven detectors track each other.
        double max_gap = 0.0;
        const amdet::PdCurve* panels[] = {&curve_b, &curve_d};
        for (const amdet::PdCurve* curve : panels) {
            for (double rho : base.sinr_grid_db) {
                double lo = 1.0, hi = 0.0;
                for (amdet::DetectorId id : amdet::kAllDetectors) {
                    const double pd = find_pd(*curve, id, rho).pd;
                    lo = std::min(lo, pd);
                    hi = std::max(hi, pd);
                }
                max_gap = std::max(max_gap, hi - lo);
            }
        }
        const bool ok_a = max_gap <= 0.05;

        // (b) sample-starved case: rao and gradient beat wald and lh at mid
        // SINR by more than three combined standard errors.
        double min_margin_se = std::numeric_limits<double>::infinity();
        for (double rho : {12.0, 15.0, 18.0}) {
            const auto& rao = find_pd(curve_c, amdet::DetectorId::rao, rho);
            const auto& grad = find_pd(curve_c, amdet::DetectorId::gradient, rho);
            const auto& wald = find_pd(curve_c, amdet::DetectorId::wald, rho);
            const auto& lh = find_pd(curve_c, amdet::DetectorId::lh, rho);
            const auto& low = rao.pd <= grad.pd ? rao : grad;
            const auto& high = wald.pd >= lh.pd ? wald : lh;
            const double margin = low.pd - high.pd;
            const double se = std::hypot(low.pd_stderr, high.pd_stderr);
            min_margin_se = std::min(min_margin_se, margin / se);
        }
        const bool ok_b = min_margin_se > 3.0;

        const bool ok = ok_a && ok_b && s <= 600.0;
        line(7, ok,
             fmt("K=19 cases: max pairwise Pd gap %.3f (bound 0.05, %s); K=12 "
                 "case: rao/gradient lead wald/lh by %.1f combined standard "
                 "errors at 12-18 dB (needs > 3, %s); %.1f s",
                 max_gap, ok_a ? "met" : "not met", min_margin_se,
                 ok_b ? "met" : "not met", s));
    }

    {
        const auto zero = amdet::estimate_pd(
            cfg_b, curve_b.thresholds, -std::numeric_limits<double>::infinity(),
            amdet::kStreamPdBase + 8);
        bool ok = !zero.empty();
        double worst = 0.0, band = 0.0;
        for (const auto& p : zero) {
            const double dev = std::abs(p.pd - cfg_b.pfa_target);
            const double b =
                3.0 * std::sqrt(cfg_b.pfa_target * (1.0 - cfg_b.pfa_target) /
                                static_cast<double>(p.trials));
            worst = std::max(worst, dev);
            band = std::max(band, b);
            ok = ok && dev <= b;
        }
        line(8, ok,
             fmt("Pd at zero SINR equals Pfa within 3 sigma for every detector "
                 "(max dev %.2e, band %.2e, %lld trials)",
                 worst, band, zero.empty() ? 0LL : zero.front().trials));
    }

    std::printf("acceptance: %s\n", all ? "all criteria passed" : "FAILURES above");
    return all ? 0 : 1;
}
