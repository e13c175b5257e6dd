// amdet: adaptive multichannel detection experiments.
//
// Subcommands: calibrate, pd-curve, cfar-check, verify.
// Exit codes: 0 ok, 1 verification failure, 2 config error, 3 numerical error.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <amdet/errors.hpp>
#include <amdet/montecarlo.hpp>
#include <amdet/runconfig.hpp>
#include <amdet/verify.hpp>

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string detectors;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--out", f.out, "output path (default: config 'out', else stdout)");
    cmd->add_option("--seed", f.seed, "seed override");
    cmd->add_option("--threads", f.threads, "worker threads, 0 = auto");
    cmd->add_option("--detectors", f.detectors,
                    "comma-separated detector subset (default: all)");
}

std::vector<amdet::DetectorId> parse_detector_list(const std::string& text) {
    std::vector<amdet::DetectorId> ids;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        std::string name = text.substr(pos, end - pos);
        const auto first = name.find_first_not_of(" \t");
        const auto last = name.find_last_not_of(" \t");
        name = first == std::string::npos ? "" : name.substr(first, last - first + 1);
        if (!name.empty()) {
            const auto id = amdet::detector_from_string(name);
            if (!id) throw amdet::ConfigError("unknown detector '" + name + "'");
            ids.push_back(*id);
        }
        pos = end + 1;
    }
    if (ids.empty()) throw amdet::ConfigError("--detectors selected nothing");
    return ids;
}

// Catch a bad output path before the Monte Carlo work runs, without
// truncating whatever a previous run already wrote there.
void ensure_writable(const std::string& path) {
    if (path.empty()) return;
    std::ofstream probe(path, std::ios::binary | std::ios::app);
    if (!probe) throw amdet::ConfigError("cannot open output file '" + path + "'");
}

amdet::RunConfig load_with_overrides(const CommonFlags& f) {
    amdet::RunConfig cfg = amdet::load_run_config(f.config_path);
    if (f.seed) cfg.mc.seed = *f.seed;
    if (f.threads) cfg.mc.threads = *f.threads;
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.detectors.empty()) cfg.mc.detectors = parse_detector_list(f.detectors);
    for (const std::string& w : amdet::validate_config(cfg.mc)) {
        std::cerr << "warning: " << w << "\n";
    }
    ensure_writable(cfg.out);
    return cfg;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw amdet::ConfigError("cannot open output file '" + path + "'");
    out << text;
    if (!out) throw amdet::ConfigError("failed writing output file '" + path + "'");
}

int cmd_calibrate(const CommonFlags& f) {
    const amdet::RunConfig cfg = load_with_overrides(f);
    const amdet::ThresholdTable table = amdet::calibrate(cfg.mc);
    write_output(cfg.out, amdet::threshold_csv(cfg, table));
    return 0;
}

int cmd_pd_curve(const CommonFlags& f) {
    const amdet::RunConfig cfg = load_with_overrides(f);
    if (cfg.emit_gnuplot && !cfg.out.empty()) ensure_writable(cfg.out + ".gp");
    const amdet::PdCurve curve = amdet::pd_vs_sinr(cfg.mc);
    write_output(cfg.out, amdet::pd_curve_csv(cfg, curve));
    if (cfg.emit_gnuplot && !cfg.out.empty()) {
        write_output(cfg.out + ".gp",
                     amdet::gnuplot_script(cfg.out, amdet::selected_detectors(cfg.mc)));
    }
    return 0;
}

int cmd_cfar_check(const CommonFlags& f) {
    const amdet::RunConfig cfg = load_with_overrides(f);
    const amdet::ProblemDims& dims = cfg.mc.dims;

    // Variant 0 calibrates; variant 1 re-estimates under a rescaled
    // disturbance covariance and a different interference matrix.
    std::vector<amdet::NuisanceVariant> variants;
    const amdet::HpdMat r1 = amdet::config_covariance(cfg.mc);
    variants.push_back({r1, amdet::fixed_interference(dims, cfg.mc.seed)});
    amdet::StreamRng rng(cfg.mc.seed, amdet::kStreamBt, 1);
    variants.push_back({amdet::HpdMat(amdet::CMat(10.0 * r1.mat())),
                        rng.cnormal_matrix(dims.t, dims.M)});

    const amdet::CfarReport report = amdet::cfar_check(cfg.mc, variants);

    const auto dets = amdet::selected_detectors(cfg.mc);
    std::string text;
    text += "cfar-check: pfa_target = " + amdet::format_sig10(cfg.mc.pfa_target) +
            ", band = +/-" + amdet::format_sig10(report.reestimates.empty()
                                                     ? 0.0
                                                     : report.reestimates[0].band) +
            "\n";
    for (std::size_t i = 0; i < report.reestimates.size(); ++i) {
        const auto& row = report.reestimates[i];
        const std::size_t variant = 1 + i / dets.size();
        const auto id = dets[i % dets.size()];
        text += std::string(row.pass ? "PASS" : "FAIL") + "  variant " +
                std::to_string(variant) + "  " + std::string(amdet::to_string(id)) +
                "  pfa_hat = " + amdet::format_sig10(row.pfa_hat) + "  (trials " +
                std::to_string(row.trials) + ")\n";
    }
    text += std::string(report.deterministic_pass ? "PASS" : "FAIL") +
            "  interference invariance, max gap = " +
            amdet::format_sig10(report.max_bt_gap) + "\n";
    text += std::string("overall: ") + (report.pass ? "PASS" : "FAIL") + "\n";
    write_output(cfg.out, text);
    return report.pass ? 0 : 1;
}

struct VerifyFlags {
    long long instances = 60;
    std::uint64_t seed = 7;
    std::string dims_filter;
    double perturb = 0.0;
    std::string out;
};

int cmd_verify(const VerifyFlags& f) {
    amdet::VerifyOptions opt;
    opt.instances = f.instances;
    opt.seed = f.seed;
    opt.perturb = f.perturb;
    if (!f.dims_filter.empty()) opt.filter = amdet::parse_dims_filter(f.dims_filter);
    ensure_writable(f.out);

    const auto results = amdet::run_property_suite(opt);
    const std::string text = amdet::render_report(results);
    write_output(f.out, text);
    if (f.out.empty()) std::cout.flush();
    return amdet::all_pass(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive multichannel detection: calibration, detection curves, "
                 "CFAR checks and algebraic verification"};
    app.require_subcommand(1);

    CommonFlags cal_flags, pd_flags, cfar_flags;
    CLI::App* cal = app.add_subcommand("calibrate", "estimate detection thresholds");
    add_common(cal, cal_flags);
    CLI::App* pd = app.add_subcommand("pd-curve", "detection probability vs SINR");
    add_common(pd, pd_flags);
    CLI::App* cfar = app.add_subcommand("cfar-check", "empirical false-alarm invariance");
    add_common(cfar, cfar_flags);

    VerifyFlags vf;
    CLI::App* ver = app.add_subcommand("verify", "run the algebraic property suite");
    ver->add_option("--instances", vf.instances, "instances per dimension set");
    ver->add_option("--seed", vf.seed, "instance generator seed");
    ver->add_option("--dims", vf.dims_filter, "filter, e.g. M=1 or N=8,M=1");
    ver->add_option("--perturb", vf.perturb,
                    "self-test hook: scale one statistic by (1 + x)");
    ver->add_option("--out", vf.out, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cal->parsed()) return cmd_calibrate(cal_flags);
        if (pd->parsed()) return cmd_pd_curve(pd_flags);
        if (cfar->parsed()) return cmd_cfar_check(cfar_flags);
        if (ver->parsed()) return cmd_verify(vf);
    } catch (const amdet::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const amdet::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
