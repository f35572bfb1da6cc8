#include "irs/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using nlohmann::json;
namespace ex = irs::experiment;

int fail(const std::string& kind, const std::string& message, const std::string& field, int code)
{
    json record{{"error", kind}, {"message", message}};
    if (!field.empty()) record["field"] = field;
    std::cerr << record.dump() << '\n';
    return code;
}

ex::ExperimentSpec load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ex::ConfigError("--config", "cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ex::ConfigError("--config", std::string("not valid JSON: ") + e.what());
    }
    return ex::spec_from_json(doc);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Symbol-level precoding and reflection design for IRS transmitters"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out;
    for (const char* name : {"design", "sweep", "simulate"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "Experiment config (JSON)")->required();
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
        sub->add_option("--out", out, "Output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        ex::ExperimentSpec spec = load(config);
        if (seed) spec.seed = *seed;
        if (threads) spec.threads = *threads;
        if (out) spec.output = *out;
        spec.validate();
        const auto files = ex::run_experiment(spec, ex::parse_command(app.get_subcommands().front()->get_name()));
        for (const auto& f : files) std::cout << f.string() << '\n';
        return 0;
    } catch (const ex::ConfigError& e) {
        return fail("config", e.what(), e.field(), 2);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), "", 1);
    }
}
