#include "ncsyz/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace ncsyz {

namespace {

constexpr int MAX_DIM = 4;

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

double number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path, "expected a number");
    return j.get<double>();
}

const Json& sized_array(const Json& j, int n, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path, "expected an array");
    if (static_cast<int>(j.size()) != n)
        throw ValidationError(path, "expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
    return j;
}

RVec real_vector(const Json& j, int n, const std::string& path) {
    sized_array(j, n, path);
    RVec v(n);
    for (int i = 0; i < n; ++i) v(i) = number(j[i], at(path, i));
    return v;
}

RMat real_matrix(const Json& j, int n, const std::string& path) {
    sized_array(j, n, path);
    RMat m(n, n);
    for (int i = 0; i < n; ++i) m.row(i) = real_vector(j[i], n, at(path, i)).transpose();
    return m;
}

cplx complex_entry(const Json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_object()) throw ValidationError(path, "expected a number or {\"re\", \"im\"}");
    for (const auto& [key, v] : j.items())
        if (key != "re" && key != "im") throw ValidationError(path + "." + key, "unknown key");
    double re = j.contains("re") ? number(j["re"], path + ".re") : 0.0;
    double im = j.contains("im") ? number(j["im"], path + ".im") : 0.0;
    return {re, im};
}

CMat complex_matrix(const Json& j, int n, const std::string& path) {
    sized_array(j, n, path);
    CMat m(n, n);
    for (int i = 0; i < n; ++i) {
        sized_array(j[i], n, at(path, i));
        for (int k = 0; k < n; ++k) m(i, k) = complex_entry(j[i][k], at(at(path, i), k));
    }
    return m;
}

Json to_json(const RVec& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json to_json(const RMat& m) {
    Json a = Json::array();
    for (int i = 0; i < m.rows(); ++i) a.push_back(to_json(RVec(m.row(i).transpose())));
    return a;
}

Json to_json(const CMat& m) {
    Json a = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back({{"re", m(i, k).real()}, {"im", m(i, k).imag()}});
        a.push_back(row);
    }
    return a;
}

}  // namespace

Scenario parse_scenario(const Json& j) {
    if (!j.is_object()) throw ValidationError("$", "scenario must be a JSON object");
    static const std::set<std::string> known = {"name", "description", "n",     "T",     "theta",
                                                "Acal", "A",           "p",     "q",     "p_prime",
                                                "q_prime", "tau",      "tolerance", "samples", "seed",
                                                "checks"};
    for (const auto& [key, v] : j.items())
        if (!known.count(key)) throw ValidationError(key, "unknown field");

    Scenario s;
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw ValidationError("name", "expected a string");
        s.name = j["name"].get<std::string>();
    }
    if (!j.contains("n")) throw ValidationError("n", "missing");
    if (!j["n"].is_number_integer()) throw ValidationError("n", "expected an integer");
    s.n = j["n"].get<int>();
    if (s.n < 1 || s.n > MAX_DIM) throw ValidationError("n", "must lie in 1.." + std::to_string(MAX_DIM));
    const int n = s.n;

    s.T = j.contains("T") ? complex_matrix(j["T"], n, "T") : standard_period(n);
    if (!is_positive_definite(RMat(0.5 * (s.T.imag() + s.T.imag().transpose()))))
        throw ValidationError("T", "Im T must be positive definite");

    s.theta = j.contains("theta") ? real_matrix(j["theta"], n, "theta") : zeros(n, n);
    if (!is_antisymmetric(s.theta)) throw ValidationError("theta", "must be antisymmetric");
    s.Acal = j.contains("Acal") ? real_matrix(j["Acal"], n, "Acal") : zeros(n, n);
    if (!is_symmetric(s.Acal)) throw ValidationError("Acal", "must be symmetric");
    s.A = j.contains("A") ? real_matrix(j["A"], n, "A") : eye(n);
    if (!near_integer(s.A)) throw ValidationError("A", "must have integer entries");
    s.A = round_matrix(s.A);

    s.p = j.contains("p") ? real_vector(j["p"], n, "p") : RVec(RVec::Zero(n));
    s.q = j.contains("q") ? real_vector(j["q"], n, "q") : RVec(RVec::Zero(n));
    s.p_prime = j.contains("p_prime") ? real_vector(j["p_prime"], n, "p_prime") : s.p;
    s.q_prime = j.contains("q_prime") ? real_vector(j["q_prime"], n, "q_prime") : s.q;
    s.has_tau = j.contains("tau");
    s.tau = s.has_tau ? real_matrix(j["tau"], n, "tau") : zeros(n, n);

    if (j.contains("tolerance")) {
        s.tolerance = number(j["tolerance"], "tolerance");
        if (!(s.tolerance > 0.0 && s.tolerance < 1.0)) throw ValidationError("tolerance", "must lie in (0, 1)");
    }
    if (j.contains("samples")) {
        if (!j["samples"].is_number_integer()) throw ValidationError("samples", "expected an integer");
        s.samples = j["samples"].get<int>();
        if (s.samples < 1 || s.samples > 10000) throw ValidationError("samples", "must lie in 1..10000");
    }
    if (j.contains("seed")) {
        const Json& v = j["seed"];
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
            throw ValidationError("seed", "expected a non-negative integer");
        s.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("checks")) {
        const Json& c = j["checks"];
        if (!c.is_array()) throw ValidationError("checks", "expected an array");
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!c[i].is_string()) throw ValidationError(at("checks", i), "expected a string");
            std::string name = c[i].get<std::string>();
            const auto& names = check_names();
            if (name != "all" && std::find(names.begin(), names.end(), name) == names.end())
                throw ValidationError(at("checks", i), "unknown check '" + name + "'");
            s.checks.push_back(name);
        }
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("$", "cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw ValidationError("$", std::string("malformed JSON: ") + e.what());
    }
    return parse_scenario(j);
}

Json scenario_to_json(const Scenario& s) {
    Json j;
    j["name"] = s.name;
    j["n"] = s.n;
    j["T"] = to_json(s.T);
    j["theta"] = to_json(s.theta);
    j["Acal"] = to_json(s.Acal);
    j["A"] = to_json(s.A);
    j["p"] = to_json(s.p);
    j["q"] = to_json(s.q);
    j["p_prime"] = to_json(s.p_prime);
    j["q_prime"] = to_json(s.q_prime);
    if (s.has_tau) j["tau"] = to_json(s.tau);
    j["tolerance"] = s.tolerance;
    j["samples"] = s.samples;
    j["seed"] = s.seed;
    j["checks"] = s.checks;
    return j;
}

BundleParams scenario_params(const Scenario& s) {
    BundleParams b = BundleParams::standard(s.n);
    b.A = s.A;
    b.p = s.p;
    b.q = s.q;
    b.theta = s.theta;
    b.Acal = s.Acal;
    b.tau = s.tau;
    b.T = s.T;
    return b;
}

std::vector<std::string> expand_checks(const Scenario& s) {
    std::set<std::string> out;
    for (const auto& c : s.checks) {
        if (c != "all") {
            out.insert(c);
            continue;
        }
        for (const auto& name : check_names())
            if (check_inapplicable_reason(s, name).empty()) out.insert(name);
    }
    return {out.begin(), out.end()};
}

Report run_scenario(const Scenario& s) {
    auto start = std::chrono::steady_clock::now();
    Report r;
    r.scenario = scenario_to_json(s);
    std::vector<std::string> names = expand_checks(s);
    r.results.resize(names.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(names.size()); ++i) r.results[i] = run_check(s, names[i]);
    for (const auto& c : r.results) r.pass = r.pass && c.pass;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

Report run_scenario(const std::string& path) { return run_scenario(load_scenario(path)); }

Json report_to_json(const Report& r) {
    Json j;
    j["scenario"] = r.scenario;
    j["results"] = Json::array();
    for (const auto& c : r.results)
        j["results"].push_back(
            {{"name", c.name}, {"pass", c.pass}, {"max_residual", c.max_residual}, {"details", c.details}});
    j["pass"] = r.pass;
    return j;
}

std::string report_table(const Report& r) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %-6s %14s\n", "check", "result", "max_residual");
    out << line;
    for (const auto& c : r.results) {
        std::snprintf(line, sizeof line, "%-16s %-6s %14.3e\n", c.name.c_str(), c.pass ? "pass" : "FAIL",
                      c.max_residual);
        out << line;
        if (!c.pass && c.details.contains("failures"))
            for (const auto& f : c.details["failures"]) out << "    " << f.get<std::string>() << "\n";
    }
    std::snprintf(line, sizeof line, "overall: %s (%zu checks, %.2f s)\n", r.pass ? "pass" : "FAIL",
                  r.results.size(), r.seconds);
    out << line;
    return out.str();
}

}  // namespace ncsyz
