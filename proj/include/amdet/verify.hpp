// Self-contained property suite behind the `verify` subcommand: algebraic
// identities every build must satisfy, evaluated on randomized instances with
// a PASS/FAIL table as output.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <amdet/model.hpp>

namespace amdet {

struct PropertyResult {
    std::string name;
    double max_gap = 0.0;
    double tolerance = 0.0;
    long long instances = 0;
    bool pass = false;
};

// Conjunction of pinned dimension components; a suite runs only on dimension
// sets matching every pinned value (e.g. M=1 keeps just the point-like ones).
struct DimsFilter {
    std::optional<int> N, K, M, r, t;
};

// Accepts "M=1" or "N=8,M=1,t=0"; throws ConfigError on malformed input.
DimsFilter parse_dims_filter(const std::string& text);

struct VerifyOptions {
    long long instances = 60;  // per dimension set per property
    std::uint64_t seed = 7;
    std::optional<DimsFilter> filter;
    // Self-test hook: scales one computed statistic by (1 + perturb) so that a
    // nonzero value must be caught as a FAIL by the dual-form property.
    double perturb = 0.0;
};

std::vector<PropertyResult> run_property_suite(const VerifyOptions& opt);

bool all_pass(const std::vector<PropertyResult>& results);

std::string render_report(const std::vector<PropertyResult>& results);

}  // namespace amdet
