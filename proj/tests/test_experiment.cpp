#include "irs/experiment.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace irs;
using namespace irs::experiment;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("irs_slp_test_" + name);
    fs::remove_all(dir);
    return dir;
}

ExperimentSpec small_passive()
{
    ExperimentSpec s;
    s.scenario.n_irs_elements = 8;
    s.scenario.n_users = 2;
    s.strategies = {"continuous", "heuristic-2"};
    s.sweep = {"alpha", {1.0, 2.0}};
    s.realizations = 2;
    return s;
}

} // namespace

TEST_CASE("config round trip")
{
    ExperimentSpec s = small_passive();
    s.mode = Mode::passive_qos;
    s.sweep = {"P", {10.0, 20.0}};
    s.seed = 99;
    CHECK(spec_from_json(to_json(s)) == s);

    ExperimentSpec j;
    j.mode = Mode::joint_qos;
    j.scenario = channel::ScenarioConfig::joint();
    j.sweep = {"L", {4, 8}};
    j.sir_weight = 5.0;
    CHECK(spec_from_json(to_json(j)) == j);
    // The preset follows the mode when it is not given.
    CHECK(spec_from_json(nlohmann::json{{"mode", "joint-pm"}, {"sweep", {{"variable", "beta"}, {"values", {0.5}}}}})
              .scenario.n_bs_antennas == channel::ScenarioConfig::joint().n_bs_antennas);
}

TEST_CASE("config errors name the field")
{
    auto field_of = [](const nlohmann::json& doc) {
        try {
            spec_from_json(doc);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    CHECK(field_of({{"bogus", 1}}) == "$.bogus");
    CHECK(field_of({{"scenario", {{"bogus", 1}}}}) == "$.scenario.bogus");
    CHECK(field_of({{"alpha", "high"}}) == "$.alpha");
    CHECK(field_of({{"alpha", -1.0}}) == "$.alpha");
    CHECK(field_of({{"mode", "annealing"}}) == "$.mode");
    CHECK(field_of({{"sweep", {{"variable", "L"}, {"values", {4}}}}}) == "$.sweep.variable");
    CHECK(field_of({{"sweep", {{"variable", "alpha"}, {"values", {2.0, 1.0}}}}}) == "$.sweep.values");
    CHECK(field_of({{"strategies", {"bnb-3"}}}) == "$.strategies[0]");
    CHECK(field_of({{"realizations", 0}}) == "$.realizations");
}

TEST_CASE("sweeps are reproducible byte for byte")
{
    ExperimentSpec s = small_passive();
    s.output = scratch("repro_a").string();
    const auto a = run_experiment(s, Command::sweep);
    s.output = scratch("repro_b").string();
    s.threads = 2;
    const auto b = run_experiment(s, Command::sweep);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].extension() != ".csv") continue;
        CHECK(slurp(a[i]) == slurp(b[i]));
    }
    const std::string power = slurp(fs::path(s.output) / "power.csv");
    CHECK(power.rfind("alpha,strategy,power_dBm,feasible_fraction,mean_iterations,converged_fraction\n", 0) == 0);
    CHECK(fs::exists(fs::path(s.output) / "manifest.json"));
}

TEST_CASE("design and simulate commands")
{
    ExperimentSpec s = small_passive();
    s.realizations = 1;
    s.output = scratch("design").string();
    run_experiment(s, Command::design);
    CHECK(fs::exists(fs::path(s.output) / "continuous_margins.csv"));
    CHECK(fs::exists(fs::path(s.output) / "summary.json"));

    CHECK_THROWS_AS(run_experiment(s, Command::simulate), ConfigError);
    s.sweep = {"P", {0.0, 20.0}};
    s.trials = 500;
    s.output = scratch("simulate").string();
    run_experiment(s, Command::simulate);
    const std::string ser = slurp(fs::path(s.output) / "ser.csv");
    CHECK(ser.rfind("strategy,power_dBm,user_id,ser,half_width,trials\n", 0) == 0);
}

TEST_CASE("infeasible designs are marked")
{
    // One antenna cannot serve three users with independent phases.
    ExperimentSpec s;
    s.mode = Mode::joint_pm;
    s.scenario = channel::ScenarioConfig::joint();
    s.scenario.n_irs_elements = 0;
    s.scenario.n_bs_antennas = 1;
    s.with_sir = false;
    s.sweep = {"alpha", {1.0}};
    s.output = scratch("infeasible").string();
    run_experiment(s, Command::sweep);
    CHECK(slurp(fs::path(s.output) / "power.csv").find("infeasible") != std::string::npos);
}
