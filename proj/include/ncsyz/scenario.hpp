#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncsyz/holoside.hpp"

namespace ncsyz {

using Json = nlohmann::json;

struct Scenario {
    std::string name;
    int n = 0;
    CMat T;
    RMat theta;
    RMat Acal;
    RMat A;
    RVec p, q, p_prime, q_prime;
    RMat tau;
    bool has_tau = false;
    double tolerance = 1e-9;
    int samples = 16;
    std::uint64_t seed = 1;
    std::vector<std::string> checks;
};

// throws ValidationError naming the offending field path
Scenario parse_scenario(const Json& j);
Scenario load_scenario(const std::string& path);
Json scenario_to_json(const Scenario& s);
BundleParams scenario_params(const Scenario& s);

// every runnable check, sorted; "all" is accepted on input and expanded
const std::vector<std::string>& check_names();
// empty string when the check applies to the scenario, otherwise the reason it does not
std::string check_inapplicable_reason(const Scenario& s, const std::string& name);
std::vector<std::string> expand_checks(const Scenario& s);

struct CheckResult {
    std::string name;
    bool pass = false;
    double max_residual = 0.0;
    Json details;
};

struct Report {
    Json scenario;
    std::vector<CheckResult> results;
    bool pass = true;
    double seconds = 0.0;
};

CheckResult run_check(const Scenario& s, const std::string& name);
Report run_scenario(const Scenario& s);
Report run_scenario(const std::string& path);

// timing is left out so equal inputs give byte-identical output
Json report_to_json(const Report& r);
std::string report_table(const Report& r);

}  // namespace ncsyz
