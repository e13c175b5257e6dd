#include <catch2/catch_amalgamated.hpp>

#include <amdet/errors.hpp>
#include <amdet/verify.hpp>

using namespace amdet;

TEST_CASE("property suite passes on clean builds") {
    VerifyOptions opt;
    opt.instances = 6;
    const auto results = run_property_suite(opt);
    REQUIRE(results.size() >= 20);
    for (const auto& r : results) {
        INFO(r.name << " gap " << r.max_gap << " tol " << r.tolerance);
        REQUIRE(r.pass);
        REQUIRE(r.instances > 0);
    }
    REQUIRE(all_pass(results));

    const std::string report = render_report(results);
    REQUIRE(report.find("PASS") != std::string::npos);
    REQUIRE(report.find("FAIL") == std::string::npos);
    REQUIRE(report.find("dual-form: glr") != std::string::npos);
    REQUIRE(report.find("wald == 2s-glr") != std::string::npos);
}

TEST_CASE("injected perturbation is caught") {
    VerifyOptions opt;
    opt.instances = 3;
    opt.perturb = 1e-3;
    const auto results = run_property_suite(opt);
    REQUIRE_FALSE(all_pass(results));
    bool glr_failed = false;
    for (const auto& r : results) {
        if (r.name == "dual-form: glr") glr_failed = !r.pass;
    }
    REQUIRE(glr_failed);
}

TEST_CASE("dims filter restricts the suites that run") {
    VerifyOptions opt;
    opt.instances = 3;
    opt.filter = parse_dims_filter("M=1");
    const auto results = run_property_suite(opt);
    REQUIRE(all_pass(results));
    bool saw_point_like = false;
    for (const auto& r : results) {
        REQUIRE(r.name.find("multidim") == std::string::npos);
        REQUIRE(r.name.find("range-spread") == std::string::npos);
        REQUIRE(r.name.find("no-interference") == std::string::npos);
        REQUIRE(r.name.find("interference invariance") == std::string::npos);
        if (r.name.find("point-like") != std::string::npos) saw_point_like = true;
    }
    REQUIRE(saw_point_like);

    // dual-form rows survive, now restricted to the single M = 1 dims set
    for (const auto& r : results) {
        if (r.name.rfind("dual-form", 0) == 0) REQUIRE(r.instances == 3);
    }
}

TEST_CASE("dims filter parsing") {
    const DimsFilter f = parse_dims_filter("N=8,M=1,t=0");
    REQUIRE(f.N == 8);
    REQUIRE(f.M == 1);
    REQUIRE(f.t == 0);
    REQUIRE_FALSE(f.K.has_value());
    REQUIRE_FALSE(f.r.has_value());

    REQUIRE_THROWS_AS(parse_dims_filter("M"), ConfigError);
    REQUIRE_THROWS_AS(parse_dims_filter("M="), ConfigError);
    REQUIRE_THROWS_AS(parse_dims_filter("Q=1"), ConfigError);
    REQUIRE_THROWS_AS(parse_dims_filter("M=x"), ConfigError);
}

TEST_CASE("all_pass needs at least one result") {
    REQUIRE_FALSE(all_pass({}));
}
