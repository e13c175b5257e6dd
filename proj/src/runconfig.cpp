#include <amdet/runconfig.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include <amdet/errors.hpp>

namespace amdet {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

void reject_unknown(const json& obj, const char* where,
                    std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (item.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) bad(std::string("unknown key '") + item.key() + "' in " + where);
    }
}

int get_int(const json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) bad(std::string("'") + key + "' must be an integer");
    return v.get<int>();
}

template <typename T>
T get_count(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) {
        bad(std::string("'") + key + "' must be an integer");
    }
    return v.get<T>();
}

double get_double(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
    const McConfig& x = a.mc;
    const McConfig& y = b.mc;
    return x.dims.N == y.dims.N && x.dims.K == y.dims.K && x.dims.M == y.dims.M &&
           x.dims.r == y.dims.r && x.dims.t == y.dims.t &&
           x.pfa_target == y.pfa_target && x.cal_trials == y.cal_trials &&
           x.pd_trials == y.pd_trials && x.sinr_grid_db == y.sinr_grid_db &&
           x.seed == y.seed && x.cnr_db == y.cnr_db && x.corr == y.corr &&
           x.sigma_n2 == y.sigma_n2 && x.detectors == y.detectors &&
           x.threads == y.threads && a.scenario_id == b.scenario_id &&
           a.out == b.out && a.emit_gnuplot == b.emit_gnuplot;
}

RunConfig parse_run_config(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) bad("config is not valid JSON");
    if (!root.is_object()) bad("config root must be a JSON object");

    reject_unknown(root, "config",
                   {"schema_version", "scenario_id", "dims", "pfa_target", "cal_trials",
                    "pd_trials", "sinr_grid_db", "seed", "cnr_db", "corr", "sigma_n2",
                    "detectors", "threads", "out", "gnuplot_script"});

    if (!root.contains("schema_version")) bad("missing 'schema_version'");
    if (!root.at("schema_version").is_number_integer() ||
        root.at("schema_version").get<int>() != 1) {
        bad("unsupported schema_version (expected 1)");
    }
    if (!root.contains("dims")) bad("missing 'dims'");
    const json& jd = root.at("dims");
    if (!jd.is_object()) bad("'dims' must be an object");
    reject_unknown(jd, "dims", {"N", "K", "M", "r", "t"});
    for (const char* k : {"N", "K", "M", "r", "t"}) {
        if (!jd.contains(k)) bad(std::string("dims is missing '") + k + "'");
    }

    RunConfig cfg;
    cfg.mc.dims.N = get_int(jd, "N");
    cfg.mc.dims.K = get_int(jd, "K");
    cfg.mc.dims.M = get_int(jd, "M");
    cfg.mc.dims.r = get_int(jd, "r");
    cfg.mc.dims.t = get_int(jd, "t");

    if (root.contains("scenario_id")) {
        if (!root.at("scenario_id").is_string()) bad("'scenario_id' must be a string");
        cfg.scenario_id = root.at("scenario_id").get<std::string>();
    }
    cfg.mc.pfa_target = get_double(root, "pfa_target", cfg.mc.pfa_target);
    cfg.mc.cal_trials = get_count<long long>(root, "cal_trials", cfg.mc.cal_trials);
    cfg.mc.pd_trials = get_count<long long>(root, "pd_trials", cfg.mc.pd_trials);
    cfg.mc.seed = get_count<std::uint64_t>(root, "seed", cfg.mc.seed);
    cfg.mc.cnr_db = get_double(root, "cnr_db", cfg.mc.cnr_db);
    cfg.mc.corr = get_double(root, "corr", cfg.mc.corr);
    cfg.mc.sigma_n2 = get_double(root, "sigma_n2", cfg.mc.sigma_n2);
    cfg.mc.threads = static_cast<int>(get_count<long long>(root, "threads", cfg.mc.threads));

    if (root.contains("sinr_grid_db")) {
        const json& jg = root.at("sinr_grid_db");
        if (!jg.is_array()) bad("'sinr_grid_db' must be an array of numbers");
        cfg.mc.sinr_grid_db.clear();
        for (const auto& v : jg) {
            if (!v.is_number()) bad("'sinr_grid_db' must contain only numbers");
            cfg.mc.sinr_grid_db.push_back(v.get<double>());
        }
    }
    if (root.contains("detectors")) {
        const json& jdet = root.at("detectors");
        if (!jdet.is_array()) bad("'detectors' must be an array of strings");
        cfg.mc.detectors.clear();
        for (const auto& v : jdet) {
            if (!v.is_string()) bad("'detectors' must contain only strings");
            const auto id = detector_from_string(v.get<std::string>());
            if (!id) bad("unknown detector '" + v.get<std::string>() + "'");
            cfg.mc.detectors.push_back(*id);
        }
    }
    if (root.contains("out")) {
        if (!root.at("out").is_string()) bad("'out' must be a string");
        cfg.out = root.at("out").get<std::string>();
    }
    if (root.contains("gnuplot_script")) {
        if (!root.at("gnuplot_script").is_boolean()) bad("'gnuplot_script' must be a boolean");
        cfg.emit_gnuplot = root.at("gnuplot_script").get<bool>();
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bad("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string serialize_run_config(const RunConfig& cfg) {
    json root;
    root["schema_version"] = 1;
    root["scenario_id"] = cfg.scenario_id;
    root["dims"] = {{"N", cfg.mc.dims.N}, {"K", cfg.mc.dims.K}, {"M", cfg.mc.dims.M},
                    {"r", cfg.mc.dims.r}, {"t", cfg.mc.dims.t}};
    root["pfa_target"] = cfg.mc.pfa_target;
    root["cal_trials"] = cfg.mc.cal_trials;
    root["pd_trials"] = cfg.mc.pd_trials;
    root["sinr_grid_db"] = cfg.mc.sinr_grid_db;
    root["seed"] = cfg.mc.seed;
    root["cnr_db"] = cfg.mc.cnr_db;
    root["corr"] = cfg.mc.corr;
    root["sigma_n2"] = cfg.mc.sigma_n2;
    json dets = json::array();
    for (DetectorId id : cfg.mc.detectors) dets.push_back(std::string(to_string(id)));
    root["detectors"] = dets;
    root["threads"] = cfg.mc.threads;
    root["out"] = cfg.out;
    root["gnuplot_script"] = cfg.emit_gnuplot;
    return root.dump(2) + "\n";
}

std::string format_sig10(double v) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 10);
    if (res.ec != std::errc{}) return "nan";
    return std::string(buf, res.ptr);
}

namespace {

std::string format_int(long long v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_u64(std::uint64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

std::string pd_csv_header() {
    return "scenario_id, detector, rho_db, pd, pd_stderr, trials, threshold, "
           "pfa_target, seed";
}

std::string pd_curve_csv(const RunConfig& cfg, const PdCurve& curve) {
    std::string outtext = pd_csv_header() + "\n";
    for (const PdPoint& p : curve.rows) {
        double threshold = 0.0;
        for (std::size_t i = 0; i < curve.thresholds.detectors.size(); ++i) {
            if (curve.thresholds.detectors[i] == p.id) {
                threshold = curve.thresholds.thresholds[i];
                break;
            }
        }
        outtext += cfg.scenario_id;
        outtext += ", ";
        outtext += to_string(p.id);
        outtext += ", ";
        outtext += format_sig10(p.rho_db);
        outtext += ", ";
        outtext += format_sig10(p.pd);
        outtext += ", ";
        outtext += format_sig10(p.pd_stderr);
        outtext += ", ";
        outtext += format_int(p.trials);
        outtext += ", ";
        outtext += format_sig10(threshold);
        outtext += ", ";
        outtext += format_sig10(cfg.mc.pfa_target);
        outtext += ", ";
        outtext += format_u64(cfg.mc.seed);
        outtext += "\n";
    }
    return outtext;
}

std::string threshold_csv(const RunConfig& cfg, const ThresholdTable& table) {
    std::string outtext =
        "scenario_id, detector, threshold, cal_trials, discarded, pfa_target, seed\n";
    for (std::size_t i = 0; i < table.detectors.size(); ++i) {
        outtext += cfg.scenario_id;
        outtext += ", ";
        outtext += to_string(table.detectors[i]);
        outtext += ", ";
        outtext += format_sig10(table.thresholds[i]);
        outtext += ", ";
        outtext += format_int(table.trials);
        outtext += ", ";
        outtext += format_int(table.discarded);
        outtext += ", ";
        outtext += format_sig10(cfg.mc.pfa_target);
        outtext += ", ";
        outtext += format_u64(table.seed);
        outtext += "\n";
    }
    return outtext;
}

std::string gnuplot_script(const std::string& csv_path,
                           const std::vector<DetectorId>& detectors) {
    std::string s;
    s += "set datafile separator ','\n";
    s += "set xlabel 'SINR (dB)'\n";
    s += "set ylabel 'P_d'\n";
    s += "set yrange [0:1]\n";
    s += "set key bottom right\n";
    s += "set grid\n";
    s += "plot \\\n";
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        const std::string name(to_string(detectors[i]));
        s += "  '" + csv_path + "' using 3:(strcol(2) eq ' " + name +
             "' ? $4 : NaN) with linespoints title '" + name + "'";
        s += (i + 1 < detectors.size()) ? ", \\\n" : "\n";
    }
    return s;
}

}  // namespace amdet
