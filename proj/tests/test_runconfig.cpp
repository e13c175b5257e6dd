#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include <amdet/errors.hpp>
#include <amdet/runconfig.hpp>

using namespace amdet;

namespace {

const char* kMinimal = R"({
  "schema_version": 1,
  "dims": {"N": 8, "K": 19, "M": 3, "r": 2, "t": 4}
})";

const char* kFull = R"({
  "schema_version": 1,
  "scenario_id": "caseb",
  "dims": {"N": 8, "K": 19, "M": 3, "r": 2, "t": 4},
  "pfa_target": 0.01,
  "cal_trials": 20000,
  "pd_trials": 1000,
  "sinr_grid_db": [6, 9, 12],
  "seed": 77,
  "cnr_db": 30.0,
  "corr": 0.95,
  "sigma_n2": 1.0,
  "detectors": ["glr", "rao", "2s-glr"],
  "threads": 2,
  "out": "x.csv",
  "gnuplot_script": true
})";

}  // namespace

TEST_CASE("minimal config parses with documented defaults") {
    const RunConfig cfg = parse_run_config(kMinimal);
    REQUIRE(cfg.mc.dims.N == 8);
    REQUIRE(cfg.mc.dims.K == 19);
    REQUIRE(cfg.mc.dims.M == 3);
    REQUIRE(cfg.mc.dims.r == 2);
    REQUIRE(cfg.mc.dims.t == 4);
    REQUIRE(cfg.mc.pfa_target == 0.01);
    REQUIRE(cfg.mc.cal_trials == 100000);
    REQUIRE(cfg.mc.pd_trials == 5000);
    REQUIRE(cfg.mc.sinr_grid_db.empty());
    REQUIRE(cfg.mc.detectors.empty());
    REQUIRE(cfg.scenario_id == "default");
    REQUIRE(cfg.out.empty());
    REQUIRE_FALSE(cfg.emit_gnuplot);
}

TEST_CASE("full config parses every field") {
    const RunConfig cfg = parse_run_config(kFull);
    REQUIRE(cfg.scenario_id == "caseb");
    REQUIRE(cfg.mc.cal_trials == 20000);
    REQUIRE(cfg.mc.pd_trials == 1000);
    REQUIRE(cfg.mc.sinr_grid_db == std::vector<double>{6.0, 9.0, 12.0});
    REQUIRE(cfg.mc.seed == 77);
    REQUIRE(cfg.mc.detectors ==
            std::vector<DetectorId>{DetectorId::glr, DetectorId::rao,
                                    DetectorId::two_step_glr});
    REQUIRE(cfg.mc.threads == 2);
    REQUIRE(cfg.out == "x.csv");
    REQUIRE(cfg.emit_gnuplot);
}

TEST_CASE("unknown keys are rejected at both levels") {
    REQUIRE_THROWS_AS(parse_run_config(R"({"schema_version":1,
        "dims":{"N":8,"K":19,"M":3,"r":2,"t":4}, "extra": 1})"),
                      ConfigError);
    REQUIRE_THROWS_AS(parse_run_config(R"({"schema_version":1,
        "dims":{"N":8,"K":19,"M":3,"r":2,"t":4,"q":0}})"),
                      ConfigError);
}

TEST_CASE("schema violations are config errors") {
    REQUIRE_THROWS_AS(parse_run_config("not json"), ConfigError);
    REQUIRE_THROWS_AS(parse_run_config("[1,2]"), ConfigError);
    REQUIRE_THROWS_AS(parse_run_config(R"({"dims":{"N":8,"K":19,"M":3,"r":2,"t":4}})"),
                      ConfigError);  // missing schema_version
    REQUIRE_THROWS_AS(parse_run_config(R"({"schema_version":2,
        "dims":{"N":8,"K":19,"M":3,"r":2,"t":4}})"),
                      ConfigError);
    REQUIRE_THROWS_AS(parse_run_config(R"({"schema_version":1})"), ConfigError);
    REQUIRE_THROWS_AS(parse_run_config(R"({"schema_version":1,
        "dims":{"N":8,"K":19,"M":3,"r":2}})"),
                      ConfigError);  // t missing
    REQUIRE_THROWS_AS(parse_run_config(R"({"schema_version":1,
        "dims":{"N":8,"K":19,"M":3,"r":2,"t":4}, "cal_trials": "many"})"),
                      ConfigError);
    REQUIRE_THROWS_AS(parse_run_config(R"({"schema_version":1,
        "dims":{"N":8,"K":19,"M":3,"r":2,"t":4}, "detectors": ["glr", "bogus"]})"),
                      ConfigError);
    REQUIRE_THROWS_AS(parse_run_config(R"({"schema_version":1,
        "dims":{"N":8.5,"K":19,"M":3,"r":2,"t":4}})"),
                      ConfigError);  // non-integer dim
}

TEST_CASE("config round-trips through serialization") {
    for (const char* text : {kMinimal, kFull}) {
        const RunConfig a = parse_run_config(text);
        const RunConfig b = parse_run_config(serialize_run_config(a));
        REQUIRE(a == b);
        // and serialization is a fixed point
        REQUIRE(serialize_run_config(a) == serialize_run_config(b));
    }
}

TEST_CASE("numeric formatting carries 10 significant digits") {
    REQUIRE(format_sig10(0.0) == "0");
    REQUIRE(format_sig10(1.0) == "1");
    REQUIRE(format_sig10(0.01) == "0.01");
    REQUIRE(format_sig10(1.0 / 3.0) == "0.3333333333");
    REQUIRE(format_sig10(12345.678901234) == "12345.6789");
    REQUIRE(format_sig10(1e-9) == "1e-09");
}

TEST_CASE("pd csv emits the exact header and one row per point") {
    RunConfig cfg = parse_run_config(kFull);
    PdCurve curve;
    curve.thresholds.detectors = {DetectorId::glr, DetectorId::rao};
    curve.thresholds.thresholds = {1.5, 2.25};
    curve.thresholds.trials = 100;
    curve.thresholds.seed = 77;
    curve.rows = {{DetectorId::glr, 6.0, 0.5, 0.05, 1000},
                  {DetectorId::glr, 9.0, 0.75, 0.04, 1000},
                  {DetectorId::rao, 6.0, 0.25, 0.03, 1000}};

    const std::string text = pd_curve_csv(cfg, curve);
    REQUIRE(text.rfind("scenario_id, detector, rho_db, pd, pd_stderr, trials, "
                       "threshold, pfa_target, seed\n",
                       0) == 0);
    REQUIRE(text.find("caseb, glr, 6, 0.5, 0.05, 1000, 1.5, 0.01, 77\n") !=
            std::string::npos);
    REQUIRE(text.find("caseb, rao, 6, 0.25, 0.03, 1000, 2.25, 0.01, 77\n") !=
            std::string::npos);
    // header + 3 rows, LF endings only
    REQUIRE(std::count(text.begin(), text.end(), '\n') == 4);
    REQUIRE(text.find('\r') == std::string::npos);
}

TEST_CASE("threshold csv lists one calibrated row per detector") {
    RunConfig cfg = parse_run_config(kMinimal);
    ThresholdTable table;
    table.detectors = {DetectorId::glr, DetectorId::two_step_glr};
    table.thresholds = {1.25, 0.5};
    table.trials = 1000;
    table.discarded = 1;
    table.seed = 1;
    const std::string text = threshold_csv(cfg, table);
    REQUIRE(text.rfind("scenario_id, detector, threshold, cal_trials, discarded, "
                       "pfa_target, seed\n",
                       0) == 0);
    REQUIRE(text.find("default, glr, 1.25, 1000, 1, 0.01, 1\n") != std::string::npos);
    REQUIRE(text.find("default, 2s-glr, 0.5, 1000, 1, 0.01, 1\n") !=
            std::string::npos);
}

TEST_CASE("gnuplot script references the csv and the detector names") {
    const std::string s =
        gnuplot_script("out.csv", {DetectorId::glr, DetectorId::lh});
    REQUIRE(s.find("out.csv") != std::string::npos);
    REQUIRE(s.find("'glr'") != std::string::npos);
    REQUIRE(s.find("'lh'") != std::string::npos);
    REQUIRE(s.find("plot") != std::string::npos);
}
