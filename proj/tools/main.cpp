#include "experiments.hpp"

#include "cubeskel/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>

using cubeskel::tools::ExperimentConfig;
using nlohmann::json;

namespace {

struct FlagSpec {
    const char* name;
    const char* help;
};

// Numeric and list flags per subcommand; lists are given as "1,2,3".
const std::map<std::string, std::vector<FlagSpec>>& flag_table()
{
    static const std::map<std::string, std::vector<FlagSpec>> t = {
        {"energy-scaling",
         {{"N", "dimension (2 or 3)"}, {"p", "energy exponent, default N-1"}, {"lmax", "largest ell"},
          {"base-depth", "quadrature base depth"}, {"depth-cap", "quadrature depth cap"},
          {"budget-cells", "quadrature cell budget"}, {"rel-tol", "relative tolerance of the identity"}}},
        {"degrees",
         {{"N", "dimensions"}, {"ells", "block sizes"}, {"shells", "shells per block size"},
          {"base-depth", "quadrature base depth"}, {"depth-cap", "quadrature depth cap"}}},
        {"hopf", {{"n", "only 1 is supported"}, {"pairs", "regular-value pairs"}, {"resolution", "cells per edge"}}},
        {"cone-estimate", {{"N", "dimension"}, {"ells", "block sizes"}, {"depth-cap", "quadrature depth cap"}}},
        {"rearrangement",
         {{"N", "dimensions"}, {"instances", "random instances per dimension"}, {"max-points", "largest point set"},
          {"k-max", "largest full cube edge"}}},
        {"balls",
         {{"families", "random families"}, {"max-balls", "balls per family"}, {"times", "sampled times"},
          {"pairs", "random merge pairs"}, {"coarea-families", "families for the co-area check"},
          {"max-dim", "largest dimension"}, {"sphere-depth", "sphere quadrature depth"}}},
        {"transport",
         {{"N", "dimension"}, {"alpha", "cost exponent, default 1-1/N"}, {"l", "edge for the exact solve"},
          {"b", "uniform supply"}, {"flow-cap", "largest |d| in the exact search"},
          {"node-budget", "exact search node budget"}, {"ells", "ladder for the scaling study"},
          {"solver", "naive, dyadic, dyadic+local"}, {"min-r2", "required R^2"}}},
        {"manifold",
         {{"n", "torus dimension"}, {"m", "fiber dimension"}, {"lambda", "level"}, {"samples", "sample count"},
          {"fd-tol", "finite-difference tolerance"}}},
        {"cylinder",
         {{"m", "cube dimension"}, {"p", "energy exponent"}, {"pairs", "random (u, v) pairs"},
          {"base-depth", "quadrature base depth"}, {"depth-cap", "quadrature depth cap"}}},
    };
    return t;
}

std::string key_of(std::string flag)
{
    for (char& c : flag)
        if (c == '-') c = '_';
    return flag;
}

/// "2" -> 2, "0.5" -> 0.5, "1,2" -> [1, 2], anything else stays a string.
json parse_value(const std::string& text)
{
    const std::string candidate = text.find(',') != std::string::npos ? "[" + text + "]" : text;
    auto j = json::parse(candidate, nullptr, false);
    if (j.is_discarded()) return text;
    return j;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"cubeskel experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file, out_dir, format;
    std::uint64_t seed = 0;
    auto* config_opt = app.add_option("--config", config_file, "JSON config file")->check(CLI::ExistingFile);
    auto* seed_opt = app.add_option("--seed", seed, "64-bit seed");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    auto* format_opt = app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));

    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, CLI::App*> subs;
    bool exact = false, scaling = false, no_controls = false;
    for (const auto& name : cubeskel::tools::experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        subs[name] = sub;
        for (const auto& f : flag_table().at(name))
            sub->add_option(std::string("--") + f.name, values[name][f.name], f.help);
        if (name == "transport") {
            sub->add_flag("--exact", exact, "exact minimum on [0, l]^N");
            sub->add_flag("--scaling", scaling, "scaling study over the ell ladder");
        }
        if (name == "hopf") sub->add_flag("--no-controls", no_controls, "skip the Hopf fibration and constant maps");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        ExperimentConfig config;
        if (*config_opt) {
            std::ifstream in(config_file);
            config = ExperimentConfig::from_json(json::parse(in));
        }
        for (const auto& [name, sub] : subs) {
            if (!sub->parsed()) continue;
            if (!config.command.empty() && config.command != name)
                throw cubeskel::ParameterError("config is for '" + config.command + "', not '" + name + "'");
            config.command = name;
            for (const auto& f : flag_table().at(name))
                if (sub->count(std::string("--") + f.name)) config.params[key_of(f.name)] = parse_value(values[name][f.name]);
        }
        if (exact) config.params["exact"] = true;
        if (scaling) config.params["scaling"] = true;
        if (no_controls) config.params["controls"] = false;
        if (*seed_opt) config.seed = seed;
        if (*out_opt) config.out = out_dir;
        if (*format_opt) config.format = format;

        const auto summary = cubeskel::tools::run_experiment(config);
        const auto j = summary.to_json();
        for (const auto& [id, entry] : j["assertions"].items())
            std::cout << id << (entry["pass"].get<bool>() ? " PASS" : " FAIL") << "\n";
        for (const auto& [id, entry] : j["checks"].items())
            std::cout << "check " << id << (entry["pass"].get<bool>() ? " PASS" : " FAIL") << "\n";
        std::cout << "summary written to " << (config.out / "summary.json").string() << "\n";
        return summary.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
