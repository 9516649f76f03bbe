#include "experiments.hpp"

#include "cubeskel/errors.hpp"
#include "cubeskel/io.hpp"

#include <fstream>
#include <functional>
#include <system_error>

namespace cubeskel::tools {

using nlohmann::json;

json ExperimentConfig::to_json() const
{
    return {{"command", command}, {"seed", seed}, {"format", format}, {"params", params}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j)
{
    if (!j.is_object()) throw ParameterError("config must be a JSON object");
    ExperimentConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "command") c.command = value.get<std::string>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "format") c.format = value.get<std::string>();
        else if (key == "out") c.out = value.get<std::string>();
        else if (key == "params") {
            if (!value.is_object()) throw ParameterError("params must be an object");
            for (const auto& [k, v] : value.items()) c.params[k] = v;
        } else {
            c.params[key] = value;
        }
    }
    return c;
}

json rounded(const json& j)
{
    if (j.is_number_float()) return round_sig(j.get<double>());
    if (j.is_array()) {
        json out = json::array();
        for (const auto& v : j) out.push_back(rounded(v));
        return out;
    }
    if (j.is_object()) {
        json out = json::object();
        for (const auto& [k, v] : j.items()) out[k] = rounded(v);
        return out;
    }
    return j;
}

Summary::Summary(const ExperimentConfig& config) : config_(config.to_json()) {}

namespace {

void record(std::map<std::string, json>& into, const std::string& id, bool pass, json detail)
{
    if (!detail.is_object()) detail = json{{"value", detail}};
    auto it = into.find(id);
    if (it == into.end()) {
        detail["pass"] = pass;
        into.emplace(id, std::move(detail));
        return;
    }
    json& entry = it->second;
    const bool merged = entry["pass"].get<bool>() && pass;
    if (!entry.contains("parts")) {
        json first = entry;
        first.erase("pass");
        entry = json{{"parts", json::array({first})}};
    }
    entry["parts"].push_back(detail);
    entry["pass"] = merged;
}

} // namespace

void Summary::assertion(const std::string& id, bool pass, json detail)
{
    record(assertions_, id, pass, std::move(detail));
}

void Summary::check(const std::string& name, bool pass, json detail)
{
    record(checks_, name, pass, std::move(detail));
}

bool Summary::assertion_pass(const std::string& id) const
{
    auto it = assertions_.find(id);
    return it != assertions_.end() && it->second["pass"].get<bool>();
}

bool Summary::all_pass() const
{
    for (const auto& [id, entry] : assertions_)
        if (!entry["pass"].get<bool>()) return false;
    for (const auto& [id, entry] : checks_)
        if (!entry["pass"].get<bool>()) return false;
    return true;
}

json Summary::to_json() const
{
    json a = json::object(), c = json::object();
    for (const auto& [id, entry] : assertions_) a[id] = entry;
    for (const auto& [id, entry] : checks_) c[id] = entry;
    return rounded(json{{"config", config_}, {"results", results_}, {"assertions", a}, {"checks", c},
                        {"pass", all_pass()}});
}

std::string Summary::dump() const { return to_json().dump(2) + "\n"; }

void Table::row(const std::vector<json>& cells)
{
    if (cells.size() != columns_.size()) throw ShapeError("table row has the wrong number of cells");
    rows_.push_back(cells);
}

void Table::write(const ExperimentConfig& config, const std::string& stem) const
{
    if (config.format == "json") {
        json arr = json::array();
        for (const auto& r : rows_) {
            json obj = json::object();
            for (std::size_t i = 0; i < columns_.size(); ++i) obj[columns_[i]] = rounded(r[i]);
            arr.push_back(std::move(obj));
        }
        write_text_file(config.out / (stem + ".json"), arr.dump(2) + "\n");
        return;
    }
    std::string s;
    for (std::size_t i = 0; i < columns_.size(); ++i) s += (i ? "," : "") + columns_[i];
    s += "\n";
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) s += ",";
            if (r[i].is_number_float()) s += format_double(r[i].get<double>());
            else if (r[i].is_string()) s += r[i].get<std::string>();
            else s += r[i].dump();
        }
        s += "\n";
    }
    write_text_file(config.out / (stem + ".csv"), s);
}

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names = {"energy-scaling", "degrees",   "hopf",
                                                   "cone-estimate",  "rearrangement", "balls",
                                                   "transport",      "manifold",  "cylinder"};
    return names;
}

Summary run_experiment(const ExperimentConfig& config)
{
    static const std::map<std::string, std::function<Summary(const ExperimentConfig&)>> table = {
        {"energy-scaling", run_energy_scaling}, {"degrees", run_degrees},
        {"hopf", run_hopf},                     {"cone-estimate", run_cone_estimate},
        {"rearrangement", run_rearrangement},   {"balls", run_balls},
        {"transport", run_transport},           {"manifold", run_manifold},
        {"cylinder", run_cylinder},
    };
    auto it = table.find(config.command);
    if (it == table.end()) throw ParameterError("unknown experiment '" + config.command + "'");
    if (config.format != "csv" && config.format != "json")
        throw ParameterError("format must be csv or json, got '" + config.format + "'");

    std::error_code ec;
    std::filesystem::create_directories(config.out, ec);
    if (ec || !std::filesystem::is_directory(config.out))
        throw std::runtime_error("cannot create output directory " + config.out.string());

    Summary summary = it->second(config);
    write_text_file(config.out / "summary.json", summary.dump());
    return summary;
}

ExperimentConfig smoke_config(const std::string& command, std::uint64_t seed)
{
    ExperimentConfig c;
    c.command = command;
    c.seed = seed;
    if (command == "energy-scaling") c.params = {{"N", 2}, {"lmax", 2}};
    else if (command == "degrees") c.params = {{"N", json::array({2})}, {"ells", json::array({1})}, {"shells", 2}};
    else if (command == "hopf") c.params = {{"n", 1}, {"pairs", 1}, {"resolution", 8}, {"controls", false}};
    else if (command == "cone-estimate") c.params = {{"N", 2}, {"ells", json::array({1})}};
    else if (command == "rearrangement") c.params = {{"N", json::array({2})}, {"instances", 20}, {"max_points", 40}, {"k_max", 4}};
    else if (command == "balls")
        c.params = {{"families", 5}, {"max_balls", 6}, {"times", 10}, {"pairs", 200}, {"coarea_families", 1}};
    else if (command == "transport")
        c.params = {{"N", 2}, {"alpha", 0.5}, {"l", 1}, {"ells", json::array({2, 4, 8})}};
    else if (command == "manifold") c.params = {{"samples", 200}};
    else if (command == "cylinder") c.params = {{"pairs", 2}, {"depth_cap", 6}};
    else throw ParameterError("unknown experiment '" + command + "'");
    return c;
}

} // namespace cubeskel::tools
