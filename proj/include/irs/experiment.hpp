#pragma once

#include "irs/channel.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace irs::experiment {

/// Invalid configuration; `field` is the JSON path of the offending entry.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class Mode { passive_pm, passive_qos, joint_pm, joint_qos };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

enum class Command { design, sweep, simulate };

Command parse_command(const std::string& text);

struct Sweep {
    /// alpha, beta (units of sigma), P (dBm), N, B or L.
    std::string variable = "alpha";
    std::vector<double> values{2.5};

    bool operator==(const Sweep&) const = default;
};

struct ExperimentSpec {
    channel::ScenarioConfig scenario = channel::ScenarioConfig::standalone();
    Mode mode = Mode::passive_pm;
    /// Strategy names; with a B sweep discrete names omit the bit count ("bnb", "heuristic", "quantize").
    std::vector<std::string> strategies{"continuous"};
    Sweep sweep;
    double alpha = 2.5; // units of sigma
    double beta = 0.5;  // units of sigma
    double power_dbm = 25.0;
    double rho = 1.0;
    double sir_weight = 1.0;
    bool with_sir = true;
    int realizations = 1;
    std::uint64_t trials = 10'000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string output = "out";
    int max_outer = 30;
    int extra_starts = 0;
    std::uint64_t node_budget = 2'000'000;

    void validate() const;
    bool operator==(const ExperimentSpec& other) const;
};

nlohmann::json to_json(const ExperimentSpec& spec);
/// Keys missing from the document keep their defaults; unknown keys are rejected.
ExperimentSpec spec_from_json(const nlohmann::json& doc);

nlohmann::json scenario_to_json(const channel::ScenarioConfig& config);
channel::ScenarioConfig scenario_from_json(const nlohmann::json& doc, const std::string& path = "scenario");

/// Runs the command and writes its CSV files plus manifest.json under spec.output.
/// Returns the paths written.
std::vector<std::filesystem::path> run_experiment(const ExperimentSpec& spec, Command command);

} // namespace irs::experiment
