#include <amdet/verify.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include <amdet/detectors.hpp>
#include <amdet/errors.hpp>
#include <amdet/mis.hpp>
#include <amdet/special.hpp>

namespace amdet {

namespace {

double uniform01(StreamRng& rng) {
    return static_cast<double>(rng.next_u64() >> 11) * 0x1.0p-53;
}

double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

struct Instance {
    CMat Z;
    HpdMat R;
    CMat Bt;
};

Instance make_instance(const ProblemDims& dims, std::uint64_t seed,
                       std::uint64_t salt, std::uint64_t index) {
    StreamRng rng(seed, salt, index);
    const double corr = 0.9 * uniform01(rng);
    const double cnr_db = 5.0 + 20.0 * uniform01(rng);
    HpdMat R = clutter_covariance(dims.N, 1.0, cnr_db, corr);
    CMat Bt = rng.cnormal_matrix(dims.t, dims.M);
    CMat Bg = rng.cnormal_matrix(dims.r, dims.M);
    const double rho = std::pow(10.0, 2.0 * uniform01(rng));
    CMat B = scale_signal_to_sinr(Bg, R, dims, rho);
    CMat Z = sample_disturbance(R, dims.K, rng);
    add_signal_support(Z, dims, Bt, B);
    return Instance{std::move(Z), std::move(R), std::move(Bt)};
}

struct Accum {
    double max_gap = 0.0;
    long long n = 0;
    void add(double g) {
        max_gap = std::max(max_gap, g);
        ++n;
    }
};

bool dims_match(const ProblemDims& d, const std::optional<DimsFilter>& f) {
    if (!f) return true;
    if (f->N && *f->N != d.N) return false;
    if (f->K && *f->K != d.K) return false;
    if (f->M && *f->M != d.M) return false;
    if (f->r && *f->r != d.r) return false;
    if (f->t && *f->t != d.t) return false;
    return true;
}

PropertyResult finish(std::string name, const Accum& acc, double tol) {
    PropertyResult r;
    r.name = std::move(name);
    r.max_gap = acc.max_gap;
    r.tolerance = tol;
    r.instances = acc.n;
    r.pass = acc.n > 0 && acc.max_gap <= tol;
    return r;
}

// Report indices in evaluate_all order.
constexpr std::size_t kGlr = 0;
constexpr std::size_t kRao = 1;
constexpr std::size_t kWald = 2;
constexpr std::size_t kGradient = 3;
constexpr std::size_t kDurbin = 4;
constexpr std::size_t kTwoStep = 5;
constexpr std::size_t kLh = 6;

}  // namespace

DimsFilter parse_dims_filter(const std::string& text) {
    DimsFilter f;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        const std::string part = text.substr(pos, end - pos);
        const std::size_t eq = part.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= part.size()) {
            throw ConfigError("dims filter entries must look like M=1: '" + part + "'");
        }
        const std::string key = part.substr(0, eq);
        int value = 0;
        try {
            value = std::stoi(part.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("dims filter value is not an integer: '" + part + "'");
        }
        if (key == "N") f.N = value;
        else if (key == "K") f.K = value;
        else if (key == "M") f.M = value;
        else if (key == "r") f.r = value;
        else if (key == "t") f.t = value;
        else throw ConfigError("dims filter key must be one of N,K,M,r,t: '" + key + "'");
        pos = end + 1;
    }
    return f;
}

std::vector<PropertyResult> run_property_suite(const VerifyOptions& opt) {
    const std::array<ProblemDims, 6> general_dims = {
        make_dims(8, 19, 3, 2, 4), make_dims(8, 12, 3, 4, 2), make_dims(8, 24, 8, 8, 0),
        make_dims(8, 24, 8, 1, 0), make_dims(8, 13, 1, 2, 4), make_dims(6, 14, 2, 2, 0)};

    std::vector<ProblemDims> gdims;
    for (const auto& d : general_dims) {
        if (dims_match(d, opt.filter)) gdims.push_back(d);
    }

    // Dual forms, exact equivalences, ML-inverse identities and the
    // supplementary route checks all come from the same instance sweep.
    Accum dual[7];
    Accum eq_wald_2s, eq_durbin_rao;
    Accum lem_r1, lem_r0;
    Accum id_rao_score, id_wald_fim, id_rao_whiten, id_rao_middle, id_wald_middle,
        id_grad_disp, id_pdelta_idem, id_pdelta_trace;

    for (std::size_t di = 0; di < gdims.size(); ++di) {
        const ProblemDims& dims = gdims[di];
        for (long long i = 0; i < opt.instances; ++i) {
            Instance inst = make_instance(dims, opt.seed, 100 + di,
                                          static_cast<std::uint64_t>(i));
            const auto reports = evaluate_all(inst.Z, dims);
            for (std::size_t d = 0; d < reports.size(); ++d) {
                double vstd = reports[d].value_standard;
                if (d == kGlr) vstd *= 1.0 + opt.perturb;
                dual[d].add(rel_gap(vstd, reports[d].value_mis));
            }
            eq_wald_2s.add(rel_gap(reports[kWald].value_standard,
                                   reports[kTwoStep].value_standard));
            eq_durbin_rao.add(rel_gap(reports[kDurbin].value_standard,
                                      reports[kRao].value_standard));

            const IdentityGaps gaps = identity_gaps(inst.Z, dims);
            lem_r1.add(gaps.ml_inverse_r1);
            lem_r0.add(gaps.ml_inverse_r0);
            id_rao_score.add(gaps.rao_score_form);
            id_wald_fim.add(gaps.wald_fim_form);
            id_rao_whiten.add(gaps.rao_whitening);
            id_rao_middle.add(gaps.rao_middle);
            id_wald_middle.add(gaps.wald_middle);
            id_grad_disp.add(gaps.grad_displaced);
            id_pdelta_idem.add(gaps.pdelta_idem);
            id_pdelta_trace.add(gaps.pdelta_trace);
        }
    }

    std::vector<PropertyResult> out;
    for (std::size_t d = 0; d < kAllDetectors.size(); ++d) {
        out.push_back(finish(std::string("dual-form: ") +
                                 std::string(to_string(kAllDetectors[d])),
                             dual[d], 1e-8));
    }
    out.push_back(finish("wald == 2s-glr", eq_wald_2s, 1e-10));
    out.push_back(finish("durbin == rao", eq_durbin_rao, 1e-8));
    out.push_back(finish("R1inv*A == K*Scinv*A", lem_r1, 1e-10));
    out.push_back(finish("R0inv*Et == K*Scinv*Et", lem_r0, 1e-10));
    out.push_back(finish("rao score form", id_rao_score, 1e-8));
    out.push_back(finish("wald fim form", id_wald_fim, 1e-8));
    out.push_back(finish("rao whitening route", id_rao_whiten, 1e-8));
    out.push_back(finish("rao middle matrix", id_rao_middle, 1e-8));
    out.push_back(finish("wald middle matrix", id_wald_middle, 1e-8));
    out.push_back(finish("gradient displaced route", id_grad_disp, 1e-8));
    out.push_back(finish("Pdelta idempotent", id_pdelta_idem, 1e-10));
    out.push_back(finish("Pdelta trace", id_pdelta_trace, 1e-10));

    // Point-like specialization (M=1, general J < N).
    {
        const ProblemDims dims = make_dims(8, 13, 1, 2, 4);
        if (dims_match(dims, opt.filter)) {
            Accum red, grad_eta, lh_chain;
            const CanonicalBases bases = canonical_bases(dims);
            for (long long i = 0; i < opt.instances; ++i) {
                Instance inst = make_instance(dims, opt.seed, 200,
                                              static_cast<std::uint64_t>(i));
                PointLikeData d{inst.Z.col(0), inst.Z.rightCols(dims.K - 1)};
                const PointLikeReport rep = point_like_equivalences(d, bases.A, dims.t);
                const auto reports = evaluate_all(inst.Z, dims);
                double g = rel_gap(rep.t_glr, reports[kGlr].value_standard);
                g = std::max(g, rel_gap(rep.t_rao, reports[kRao].value_standard));
                g = std::max(g, rel_gap(rep.t_wald, reports[kWald].value_standard));
                g = std::max(g, rel_gap(rep.t_grad, reports[kGradient].value_standard));
                g = std::max(g, rel_gap(rep.t_lh, reports[kLh].value_standard));
                red.add(g);
                grad_eta.add(rep.grad_gap);
                lh_chain.add(rep.lh_gap);
            }
            out.push_back(finish("point-like reduction", red, 1e-9));
            out.push_back(finish("point-like gradient = K*eta", grad_eta, 1e-8));
            out.push_back(finish("point-like lh chain", lh_chain, 1e-9));
        }
    }

    // Point-like with no interference: eta / matched-filter / score forms.
    {
        const std::array<ProblemDims, 2> kelly_dims = {make_dims(4, 10, 1, 1, 0),
                                                       make_dims(6, 13, 1, 3, 0)};
        Accum glr_red, rao_red, amf_wald;
        for (std::size_t di = 0; di < kelly_dims.size(); ++di) {
            const ProblemDims& dims = kelly_dims[di];
            if (!dims_match(dims, opt.filter)) continue;
            const CanonicalBases bases = canonical_bases(dims);
            for (long long i = 0; i < opt.instances; ++i) {
                Instance inst = make_instance(dims, opt.seed, 300 + di,
                                              static_cast<std::uint64_t>(i));
                PointLikeData d{inst.Z.col(0), inst.Z.rightCols(dims.K - 1)};
                const KellyGlr kg = kelly_eta(d, bases.A);
                const auto reports = evaluate_all(inst.Z, dims);
                glr_red.add(rel_gap(kg.t_glr, reports[kGlr].value_standard));
                rao_red.add(rel_gap(rao_point_like(d, bases.A),
                                    reports[kRao].value_standard));
                if (dims.r == 1) {
                    amf_wald.add(rel_gap(amf(d, bases.A.col(0)),
                                         reports[kWald].value_standard));
                }
            }
        }
        if (glr_red.n > 0) {
            out.push_back(finish("point-like glr via eta", glr_red, 1e-9));
            out.push_back(finish("point-like rao closed form", rao_red, 1e-9));
        }
        if (amf_wald.n > 0) out.push_back(finish("matched-filter = wald (r=1)", amf_wald, 1e-9));
    }

    // Full-space multichannel specialization (J = N, t = 0).
    {
        const ProblemDims dims = make_dims(4, 12, 2, 4, 0);
        if (dims_match(dims, opt.filter)) {
            Accum red, shared;
            for (long long i = 0; i < opt.instances; ++i) {
                Instance inst = make_instance(dims, opt.seed, 400,
                                              static_cast<std::uint64_t>(i));
                SpreadData d{inst.Z.leftCols(dims.M), inst.Z.rightCols(dims.K - dims.M)};
                const auto vals = multidim_detectors(d);
                const auto reports = evaluate_all(inst.Z, dims);
                double g = 0.0;
                for (std::size_t j = 0; j < kAllDetectors.size(); ++j) {
                    g = std::max(g, rel_gap(vals.at(std::string(to_string(kAllDetectors[j]))),
                                            reports[j].value_standard));
                }
                red.add(g);
                double s = rel_gap(vals.at("rao"), vals.at("gradient"));
                s = std::max(s, rel_gap(vals.at("rao"), vals.at("durbin")));
                s = std::max(s, rel_gap(vals.at("wald"), vals.at("lh")));
                s = std::max(s, rel_gap(vals.at("wald"), vals.at("2s-glr")));
                shared.add(s);
            }
            out.push_back(finish("multidim reduction", red, 1e-9));
            out.push_back(finish("multidim shared forms", shared, 1e-12));
        }
    }

    // Rank-one spread specialization (r = 1, t = 0, M > 1).
    {
        const ProblemDims dims = make_dims(5, 12, 3, 1, 0);
        if (dims_match(dims, opt.filter)) {
            Accum red, lh_glr;
            const CanonicalBases bases = canonical_bases(dims);
            for (long long i = 0; i < opt.instances; ++i) {
                Instance inst = make_instance(dims, opt.seed, 500,
                                              static_cast<std::uint64_t>(i));
                SpreadData d{inst.Z.leftCols(dims.M), inst.Z.rightCols(dims.K - dims.M)};
                const auto vals = range_spread_detectors(d, bases.A.col(0));
                const auto reports = evaluate_all(inst.Z, dims);
                double g = 0.0;
                for (std::size_t j = 0; j < kAllDetectors.size(); ++j) {
                    g = std::max(g, rel_gap(vals.at(std::string(to_string(kAllDetectors[j]))),
                                            reports[j].value_standard));
                }
                red.add(g);
                lh_glr.add(rel_gap(vals.at("lh"), vals.at("glr") - 1.0));
            }
            out.push_back(finish("range-spread reduction", red, 1e-9));
            out.push_back(finish("range-spread lh = glr - 1", lh_glr, 1e-9));
        }
    }

    // No-interference model (t = 0) evaluated through its own direct path.
    {
        const ProblemDims dims = make_dims(6, 14, 2, 2, 0);
        if (dims_match(dims, opt.filter)) {
            Accum red;
            for (long long i = 0; i < opt.instances; ++i) {
                Instance inst = make_instance(dims, opt.seed, 600,
                                              static_cast<std::uint64_t>(i));
                const auto vals = gmanova_detectors(inst.Z, dims);
                const auto reports = evaluate_all(inst.Z, dims);
                double g = 0.0;
                for (std::size_t j = 0; j < kAllDetectors.size(); ++j) {
                    g = std::max(g, rel_gap(vals.at(std::string(to_string(kAllDetectors[j]))),
                                            reports[j].value_standard));
                }
                red.add(g);
            }
            out.push_back(finish("no-interference reduction", red, 1e-9));
        }
    }

    // Deterministic CFAR: with the disturbance fixed, rescaling the
    // interference must leave every statistic unchanged.
    {
        const std::array<ProblemDims, 2> inv_dims = {make_dims(8, 19, 3, 2, 4),
                                                     make_dims(8, 12, 3, 4, 2)};
        Accum inv;
        for (std::size_t di = 0; di < inv_dims.size(); ++di) {
            const ProblemDims& dims = inv_dims[di];
            if (!dims_match(dims, opt.filter)) continue;
            const CMat zero_b = CMat::Zero(dims.r, dims.M);
            for (long long i = 0; i < opt.instances; ++i) {
                StreamRng rng(opt.seed, 700 + di, static_cast<std::uint64_t>(i));
                const double corr = 0.9 * uniform01(rng);
                HpdMat R = clutter_covariance(dims.N, 1.0, 15.0, corr);
                const CMat Bt = rng.cnormal_matrix(dims.t, dims.M);
                const CMat noise = sample_disturbance(R, dims.K, rng);
                auto stats_for = [&](double factor) {
                    CMat z = noise;
                    add_signal_support(z, dims, CMat(Bt * factor), zero_b);
                    return mis_statistics(mis_from_data(z, dims), dims.K);
                };
                const MisStatistics base = stats_for(1.0);
                for (double f : {0.0, 100.0}) {
                    const MisStatistics st = stats_for(f);
                    double g = 0.0;
                    for (DetectorId id : kAllDetectors) {
                        g = std::max(g, rel_gap(base.value(id), st.value(id)));
                    }
                    inv.add(g);
                }
            }
        }
        if (inv.n > 0) out.push_back(finish("interference invariance", inv, 1e-9));
    }

    return out;
}

bool all_pass(const std::vector<PropertyResult>& results) {
    if (results.empty()) return false;
    return std::all_of(results.begin(), results.end(),
                       [](const PropertyResult& r) { return r.pass; });
}

std::string render_report(const std::vector<PropertyResult>& results) {
    std::string s = "result  max_gap     tol       instances  property\n";
    char line[192];
    for (const auto& r : results) {
        std::snprintf(line, sizeof line, "%-6s  %-10.3e  %-8.1e  %-9lld  %s\n",
                      r.pass ? "PASS" : "FAIL", r.max_gap, r.tolerance, r.instances,
                      r.name.c_str());
        s += line;
    }
    return s;
}

}  // namespace amdet
