// Experiment configuration (JSON, versioned schema) and CSV emission.
#pragma once

#include <cstdint>
#include <string>

#include <amdet/montecarlo.hpp>

namespace amdet {

struct RunConfig {
    McConfig mc;
    std::string scenario_id = "default";
    std::string out;  // output path; empty means stdout
    bool emit_gnuplot = false;

    friend bool operator==(const RunConfig&, const RunConfig&);
};

// Parses schema_version 1 JSON. Unknown keys anywhere are a ConfigError, as
// are missing required keys (schema_version, dims) and type mismatches.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

// Canonical form: every key written explicitly, so
// parse(serialize(parse(text))) == parse(text).
std::string serialize_run_config(const RunConfig& cfg);

// Locale-independent decimal with 10 significant digits.
std::string format_sig10(double v);

// Header and separators are fixed: ", " between fields, LF line endings.
std::string pd_csv_header();
std::string pd_curve_csv(const RunConfig& cfg, const PdCurve& curve);
std::string threshold_csv(const RunConfig& cfg, const ThresholdTable& table);

// Companion gnuplot script plotting every detector column of a pd-curve CSV.
std::string gnuplot_script(const std::string& csv_path,
                           const std::vector<DetectorId>& detectors);

}  // namespace amdet
