#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace cubeskel::tools {

/// Everything needed to reproduce one experiment run. `out` is where artifacts go and is
/// deliberately left out of to_json() so that runs in different directories compare equal.
struct ExperimentConfig {
    std::string command;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 1;
    std::filesystem::path out = "out";
    std::string format = "csv";

    template <class T>
    T get(const std::string& key, T fallback) const
    {
        auto it = params.find(key);
        if (it == params.end() || it->is_null()) return fallback;
        return it->get<T>();
    }

    nlohmann::json to_json() const;
    /// Accepts {"command", "seed", "format", "out", "params": {...}}; unknown top-level keys are
    /// treated as parameters.
    static ExperimentConfig from_json(const nlohmann::json& j);
};

class Summary {
public:
    explicit Summary(const ExperimentConfig& config);

    /// Records the outcome of one acceptance item. Several calls with the same id are and-ed.
    void assertion(const std::string& id, bool pass, nlohmann::json detail = nlohmann::json::object());
    /// Internal consistency checks that do not correspond to an acceptance item.
    void check(const std::string& name, bool pass, nlohmann::json detail = nlohmann::json::object());
    nlohmann::json& results() { return results_; }

    bool all_pass() const;
    bool assertion_pass(const std::string& id) const;
    nlohmann::json to_json() const;
    std::string dump() const;

private:
    nlohmann::json config_;
    nlohmann::json results_ = nlohmann::json::object();
    std::map<std::string, nlohmann::json> assertions_;
    std::map<std::string, nlohmann::json> checks_;
};

/// A table written as CSV or as a JSON array of row objects depending on the config format.
class Table {
public:
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
    /// Numbers are rendered with 12 significant digits.
    void row(const std::vector<nlohmann::json>& cells);
    std::size_t size() const { return rows_.size(); }
    /// Writes <stem>.csv or <stem>.json into the output directory.
    void write(const ExperimentConfig& config, const std::string& stem) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<nlohmann::json>> rows_;
};

/// Rounds every floating-point number in the tree to 12 significant digits.
nlohmann::json rounded(const nlohmann::json& j);

const std::vector<std::string>& experiment_names();

/// Runs the experiment, writes its artifacts and summary.json under config.out and returns the summary.
/// Throws ParameterError for unknown experiments or invalid parameters and std::runtime_error
/// when the output directory cannot be written.
Summary run_experiment(const ExperimentConfig& config);

Summary run_energy_scaling(const ExperimentConfig& config);
Summary run_degrees(const ExperimentConfig& config);
Summary run_hopf(const ExperimentConfig& config);
Summary run_cone_estimate(const ExperimentConfig& config);
Summary run_rearrangement(const ExperimentConfig& config);
Summary run_balls(const ExperimentConfig& config);
Summary run_transport(const ExperimentConfig& config);
Summary run_manifold(const ExperimentConfig& config);
Summary run_cylinder(const ExperimentConfig& config);

/// Small parameter sets that exercise every code path of an experiment in a few seconds.
ExperimentConfig smoke_config(const std::string& command, std::uint64_t seed);

} // namespace cubeskel::tools
