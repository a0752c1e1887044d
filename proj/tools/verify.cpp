#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>

#include "ncsyz/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Run the verification checks of a scenario file"};
    std::string path, out;
    std::vector<std::string> checks;
    double tol = 0.0;
    std::uint64_t seed = 0;
    int samples = 0;
    app.add_option("scenario", path, "scenario JSON file")->required();
    app.add_option("--check", checks, "check to run (repeatable; overrides the file's list)");
    auto* tol_opt = app.add_option("--tol", tol, "tolerance override");
    auto* seed_opt = app.add_option("--seed", seed, "seed override");
    auto* samples_opt = app.add_option("--samples", samples, "sample count override");
    app.add_option("--out", out, "write the JSON report here");
    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream in(path);
        if (!in) throw ncsyz::ValidationError("$", "cannot open " + path);
        ncsyz::Json j;
        try {
            in >> j;
        } catch (const ncsyz::Json::parse_error& e) {
            throw ncsyz::ValidationError("$", std::string("malformed JSON: ") + e.what());
        }
        if (!j.is_object()) throw ncsyz::ValidationError("$", "scenario must be a JSON object");
        if (!checks.empty()) j["checks"] = checks;
        if (*tol_opt) j["tolerance"] = tol;
        if (*seed_opt) j["seed"] = seed;
        if (*samples_opt) j["samples"] = samples;
        ncsyz::Scenario s = ncsyz::parse_scenario(j);
        ncsyz::Report r = ncsyz::run_scenario(s);
        std::cout << ncsyz::report_table(r);
        if (!out.empty()) {
            std::ofstream o(out);
            if (!o) {
                std::cerr << "cannot write " << out << "\n";
                return 2;
            }
            o << ncsyz::report_to_json(r).dump(2) << "\n";
        }
        return r.pass ? 0 : 1;
    } catch (const ncsyz::Error& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
}
