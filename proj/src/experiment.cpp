#include "irs/experiment.hpp"

#include "irs/joint_tx.hpp"
#include "irs/passive_tx.hpp"
#include "irs/rng.hpp"
#include "irs/sim.hpp"

#include <chrono>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#ifndef IRS_SLP_VERSION
#define IRS_SLP_VERSION "0.0.0"
#endif

namespace irs::experiment {

using nlohmann::json;

namespace {

constexpr std::uint64_t design_tag = 0x64657369676e5f31ULL;

const std::vector<std::pair<std::string, Mode>> mode_names = {
    {"passive-pm", Mode::passive_pm}, {"passive-qos", Mode::passive_qos},
    {"joint-pm", Mode::joint_pm},     {"joint-qos", Mode::joint_qos}};

bool is_passive(Mode m) { return m == Mode::passive_pm || m == Mode::passive_qos; }
bool is_pm(Mode m) { return m == Mode::passive_pm || m == Mode::joint_pm; }

// Typed field access with JSON-path error messages.
template <typename T>
void read(const json& doc, const std::string& key, const std::string& path, T& out)
{
    if (!doc.contains(key)) return;
    try {
        out = doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path + "." + key, std::string("wrong type (") + e.what() + ")");
    }
}

void reject_unknown(const json& doc, const std::string& path, std::initializer_list<const char*> known)
{
    if (!doc.is_object()) throw ConfigError(path, "must be an object");
    const std::set<std::string> names(known.begin(), known.end());
    for (const auto& [key, value] : doc.items())
        if (!names.contains(key)) throw ConfigError(path + "." + key, "unknown field");
}

json point_json(const channel::Point2& p) { return json::array({p.x, p.y}); }

channel::Point2 point_from(const json& v, const std::string& path)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(path, "expected [x, y]");
    return {v[0].get<double>(), v[1].get<double>()};
}

const std::vector<std::pair<const char*, channel::LinkModel channel::ScenarioConfig::*>> link_fields = {
    {"bs_irs", &channel::ScenarioConfig::bs_irs},        {"irs_user", &channel::ScenarioConfig::irs_user},
    {"bs_user", &channel::ScenarioConfig::bs_user},      {"generator_irs", &channel::ScenarioConfig::generator_irs},
    {"irs_sir", &channel::ScenarioConfig::irs_sir},      {"bs_sir", &channel::ScenarioConfig::bs_sir}};

std::string csv_number(double v)
{
    std::ostringstream s;
    s.precision(std::numeric_limits<double>::max_digits10);
    s << v;
    return s.str();
}

std::string strategy_at(const std::string& name, const ExperimentSpec& local, bool bit_sweep)
{
    if (!bit_sweep || name == "continuous") return name;
    return name + "-" + std::to_string(static_cast<int>(local.sweep.values.front()));
}

// Copy of the experiment with the sweep variable set to `value` (and a one-point grid).
ExperimentSpec at_point(const ExperimentSpec& spec, double value)
{
    ExperimentSpec local = spec;
    local.sweep.values = {value};
    const std::string& var = spec.sweep.variable;
    if (var == "alpha") local.alpha = value;
    else if (var == "beta") local.beta = value;
    else if (var == "P") local.power_dbm = value;
    else if (var == "N") local.scenario.n_irs_elements = static_cast<int>(value);
    else if (var == "L") local.scenario.embedding_length = static_cast<int>(value);
    return local;
}

struct Outcome {
    bool feasible = false;
    double metric = 0.0; // power in watts (PM) or balanced margin in units of sigma (QoS)
    int iterations = 0;
    bool converged = true;
    passive::PassiveDesignResult passive;
    joint::JointDesignResult joint;
    channel::ChannelSet channels;
    MatrixXcd rows;
};

Outcome design_once(const ExperimentSpec& local, const std::string& strategy, int realization)
{
    const channel::ScenarioConfig& cfg = local.scenario;
    Outcome out;
    out.channels = channel::generate(cfg, static_cast<std::uint64_t>(realization));
    const ci::SymbolBook book = ci::enumerate_symbol_vectors(cfg.constellation_order, cfg.n_users);
    const double sigma = cfg.noise_amplitude();
    const Index K = cfg.n_users;
    const std::uint64_t seed = derive_key(local.seed ^ design_tag, static_cast<std::uint64_t>(realization));

    if (is_passive(local.mode)) {
        out.rows = channel::standalone_rows(out.channels);
        passive::PassiveOptions opts;
        opts.seed = seed;
        opts.extra_starts = local.extra_starts;
        opts.node_budget = local.node_budget;
        const passive::Strategy s = passive::Strategy::parse(strategy);
        if (local.mode == Mode::passive_pm) {
            out.passive = passive::design_power_min(out.rows, VectorXd::Constant(K, local.alpha * sigma), book, s, opts);
            out.metric = out.passive.min_power;
        } else {
            out.passive = passive::design_qos_balance(out.rows, VectorXd::Constant(K, local.rho),
                                                      dbm_to_watts(local.power_dbm), book, s, opts);
            out.metric = out.passive.margin_t / sigma;
        }
        out.feasible = out.passive.feasible;
        out.iterations = out.passive.iterations;
        return out;
    }

    joint::JointOptions opts;
    opts.seed = seed;
    opts.reflection.seed = seed;
    opts.reflection.extra_starts = local.extra_starts;
    opts.max_outer = local.max_outer;
    const passive::Strategy s = passive::Strategy::parse(strategy);
    if (s.kind == passive::Strategy::Kind::quantize) opts.bits = s.bits;
    try {
        if (local.mode == Mode::joint_pm) {
            out.joint = joint::joint_power_min(out.channels, book, VectorXd::Constant(K, local.alpha * sigma),
                                               local.beta * sigma, local.with_sir, opts);
            out.metric = out.joint.average_power;
        } else {
            out.joint = joint::joint_qos_balance(out.channels, book, VectorXd::Constant(K, local.rho),
                                                 local.sir_weight, dbm_to_watts(local.power_dbm), local.with_sir, opts);
            out.metric = out.joint.balanced_t / sigma;
        }
        out.feasible = true;
        out.iterations = out.joint.iterations;
        out.converged = out.joint.converged;
    } catch (const InfeasibleError&) {
        out.feasible = false;
    }
    return out;
}

std::vector<Outcome> design_all(const ExperimentSpec& local, const std::string& strategy)
{
    std::vector<Outcome> out(static_cast<std::size_t>(local.realizations));
    parallel_for(out.size(), local.threads,
                 [&](std::size_t r) { out[r] = design_once(local, strategy, static_cast<int>(r)); });
    return out;
}

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name, const std::string& body)
{
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << body;
    return path;
}

void run_design(const ExperimentSpec& spec, const std::filesystem::path& dir, std::vector<std::filesystem::path>& files)
{
    const ExperimentSpec local = at_point(spec, spec.sweep.values.front());
    const bool bit_sweep = spec.sweep.variable == "B";
    json summary = json::array();
    for (const auto& name : spec.strategies) {
        const std::string strategy = strategy_at(name, local, bit_sweep);
        const Outcome o = design_once(local, strategy, 0);
        json entry{{"strategy", strategy}, {"feasible", o.feasible}, {"iterations", o.iterations}};
        std::ostringstream a, b;
        if (is_passive(spec.mode)) {
            entry["margin_t"] = o.passive.margin_t;
            entry["min_power_dBm"] = o.feasible ? json(watts_to_dbm(o.passive.min_power)) : json("infeasible");
            passive::write_margins_csv(a, o.passive);
            files.push_back(write_file(dir, strategy + "_margins.csv", a.str()));
        } else if (o.feasible) {
            entry["converged"] = o.joint.converged;
            if (is_pm(spec.mode)) entry["power_dBm"] = watts_to_dbm(o.joint.average_power);
            else entry["balanced_t"] = o.joint.balanced_t;
            joint::write_trace_csv(a, o.joint);
            joint::write_phases_csv(b, o.joint);
            files.push_back(write_file(dir, strategy + "_trace.csv", a.str()));
            files.push_back(write_file(dir, strategy + "_phases.csv", b.str()));
        }
        summary.push_back(std::move(entry));
    }
    files.push_back(write_file(dir, "summary.json", summary.dump(2) + "\n"));
}

void run_sweep(const ExperimentSpec& spec, const std::filesystem::path& dir, std::vector<std::filesystem::path>& files)
{
    const bool bit_sweep = spec.sweep.variable == "B";
    std::ostringstream csv;
    csv << spec.sweep.variable << ",strategy," << (is_pm(spec.mode) ? "power_dBm" : "balanced_margin")
        << ",feasible_fraction,mean_iterations,converged_fraction\n";
    for (const double value : spec.sweep.values) {
        const ExperimentSpec local = at_point(spec, value);
        for (const auto& name : spec.strategies) {
            const std::string strategy = strategy_at(name, local, bit_sweep);
            const std::vector<Outcome> runs = design_all(local, strategy);
            double metric = 0.0, iterations = 0.0;
            int feasible = 0, converged = 0;
            for (const auto& o : runs) {
                if (!o.feasible) continue;
                ++feasible;
                metric += o.metric;
                iterations += o.iterations;
                converged += o.converged ? 1 : 0;
            }
            const double n = static_cast<double>(runs.size());
            csv << csv_number(value) << ',' << strategy << ',';
            if (feasible == static_cast<int>(runs.size()))
                csv << csv_number(is_pm(spec.mode) ? watts_to_dbm(metric / n) : metric / n);
            else
                csv << "infeasible";
            csv << ',' << csv_number(feasible / n) << ','
                << csv_number(feasible > 0 ? iterations / feasible : 0.0) << ','
                << csv_number(feasible > 0 ? static_cast<double>(converged) / feasible : 0.0) << '\n';
        }
    }
    files.push_back(write_file(dir, is_pm(spec.mode) ? "power.csv" : "margin.csv", csv.str()));
}

void run_simulate(const ExperimentSpec& spec, const std::filesystem::path& dir, std::vector<std::filesystem::path>& files)
{
    std::ostringstream csv;
    csv << "strategy,power_dBm,user_id,ser,half_width,trials\n";
    const ci::SymbolBook book =
        ci::enumerate_symbol_vectors(spec.scenario.constellation_order, spec.scenario.n_users);
    const Index K = spec.scenario.n_users;
    const auto R = static_cast<std::uint64_t>(spec.realizations);
    for (const auto& strategy : spec.strategies) {
        // Power-minimizing designs do not depend on P; design once and evaluate across the grid.
        std::vector<Outcome> fixed;
        if (is_pm(spec.mode)) fixed = design_all(spec, strategy);
        for (std::size_t g = 0; g < spec.sweep.values.size(); ++g) {
            const double p_dbm = spec.sweep.values[g];
            const ExperimentSpec local = at_point(spec, p_dbm);
            const std::vector<Outcome> runs = is_pm(spec.mode) ? fixed : design_all(local, strategy);
            std::vector<sim::SerResult> per(runs.size());
            std::vector<char> ok(runs.size(), 0);
            parallel_for(runs.size(), spec.threads, [&](std::size_t r) {
                const Outcome& o = runs[r];
                if (!o.feasible) return;
                sim::SimOptions so;
                so.trials = spec.trials;
                so.seed = derive_key(spec.seed, r);
                so.grid_index = static_cast<std::uint32_t>(g);
                const double noise = spec.scenario.noise_power;
                if (is_passive(spec.mode)) {
                    per[r] = sim::simulate_passive(o.passive, o.rows, book, dbm_to_watts(p_dbm), noise, so);
                } else {
                    per[r] = sim::run_ser(o.joint, o.channels, book, {p_dbm}, local.scenario.embedding_length, noise, so)[0];
                    per[r].power_dbm = p_dbm;
                }
                ok[r] = 1;
            });
            if (std::find(ok.begin(), ok.end(), 0) != ok.end()) {
                csv << strategy << ',' << csv_number(p_dbm) << ",all,infeasible,,\n";
                continue;
            }
            VectorXd ser = VectorXd::Zero(K);
            double sir = 0.0;
            for (const auto& r : per) {
                ser += r.user_ser;
                if (r.has_sir()) sir += r.sir_ser;
            }
            ser /= static_cast<double>(R);
            sir /= static_cast<double>(R);
            const std::uint64_t n = per.front().trials * R;
            for (Index k = 0; k < K; ++k)
                csv << strategy << ',' << csv_number(p_dbm) << ',' << k << ',' << csv_number(ser(k)) << ','
                    << csv_number(sim::half_width(ser(k), n)) << ',' << n << '\n';
            const double avg = ser.mean();
            csv << strategy << ',' << csv_number(p_dbm) << ",avg," << csv_number(avg) << ','
                << csv_number(sim::half_width(avg, n * static_cast<std::uint64_t>(K))) << ',' << n << '\n';
            csv << strategy << ',' << csv_number(p_dbm) << ",max," << csv_number(ser.maxCoeff()) << ','
                << csv_number(sim::half_width(ser.maxCoeff(), n)) << ',' << n << '\n';
            if (per.front().has_sir()) {
                const std::uint64_t ns = per.front().sir_trials * R;
                csv << strategy << ',' << csv_number(p_dbm) << ",sir," << csv_number(sir) << ','
                    << csv_number(sim::half_width(sir, ns)) << ',' << ns << '\n';
            }
        }
    }
    files.push_back(write_file(dir, "ser.csv", csv.str()));
}

} // namespace

std::string to_string(Mode mode)
{
    for (const auto& [name, m] : mode_names)
        if (m == mode) return name;
    return "passive-pm";
}

Mode parse_mode(const std::string& text)
{
    for (const auto& [name, m] : mode_names)
        if (name == text) return m;
    throw ConfigError("mode", "unknown mode '" + text + "'");
}

Command parse_command(const std::string& text)
{
    if (text == "design") return Command::design;
    if (text == "sweep") return Command::sweep;
    if (text == "simulate") return Command::simulate;
    throw std::invalid_argument("unknown command '" + text + "'");
}

json scenario_to_json(const channel::ScenarioConfig& c)
{
    json links = json::object();
    for (const auto& [name, field] : link_fields)
        links[name] = {{"exponent", (c.*field).exponent}, {"rician_factor", (c.*field).rician_factor}};
    return {{"n_bs_antennas", c.n_bs_antennas},
            {"n_irs_elements", c.n_irs_elements},
            {"n_users", c.n_users},
            {"constellation_order", c.constellation_order},
            {"noise_power", c.noise_power},
            {"pathloss_ref_gain", c.pathloss_ref_gain},
            {"pathloss_ref_distance", c.pathloss_ref_distance},
            {"bs", point_json(c.bs)},
            {"irs", point_json(c.irs)},
            {"generator_distance", c.generator_distance},
            {"user_distance", c.user_distance},
            {"sir_distance", c.sir_distance},
            {"user_sector", c.user_sector},
            {"links", links},
            {"rng_seed", c.rng_seed},
            {"embedding_length", c.embedding_length}};
}

channel::ScenarioConfig scenario_from_json(const json& doc, const std::string& path)
{
    reject_unknown(doc, path,
                   {"preset", "n_bs_antennas", "n_irs_elements", "n_users", "constellation_order", "noise_power",
                    "pathloss_ref_gain", "pathloss_ref_distance", "bs", "irs", "generator_distance", "user_distance",
                    "sir_distance", "user_sector", "links", "rng_seed", "embedding_length"});
    channel::ScenarioConfig c;
    if (doc.contains("preset")) {
        std::string preset;
        read(doc, "preset", path, preset);
        if (preset == "standalone") c = channel::ScenarioConfig::standalone();
        else if (preset == "joint") c = channel::ScenarioConfig::joint();
        else throw ConfigError(path + ".preset", "expected 'standalone' or 'joint'");
    }
    read(doc, "n_bs_antennas", path, c.n_bs_antennas);
    read(doc, "n_irs_elements", path, c.n_irs_elements);
    read(doc, "n_users", path, c.n_users);
    read(doc, "constellation_order", path, c.constellation_order);
    read(doc, "noise_power", path, c.noise_power);
    read(doc, "pathloss_ref_gain", path, c.pathloss_ref_gain);
    read(doc, "pathloss_ref_distance", path, c.pathloss_ref_distance);
    if (doc.contains("bs")) c.bs = point_from(doc["bs"], path + ".bs");
    if (doc.contains("irs")) c.irs = point_from(doc["irs"], path + ".irs");
    read(doc, "generator_distance", path, c.generator_distance);
    read(doc, "user_distance", path, c.user_distance);
    read(doc, "sir_distance", path, c.sir_distance);
    read(doc, "user_sector", path, c.user_sector);
    if (doc.contains("links")) {
        const json& links = doc["links"];
        const std::string lp = path + ".links";
        reject_unknown(links, lp, {"bs_irs", "irs_user", "bs_user", "generator_irs", "irs_sir", "bs_sir"});
        for (const auto& [name, field] : link_fields) {
            if (!links.contains(name)) continue;
            const std::string p = lp + "." + name;
            reject_unknown(links[name], p, {"exponent", "rician_factor"});
            read(links[name], "exponent", p, (c.*field).exponent);
            read(links[name], "rician_factor", p, (c.*field).rician_factor);
        }
    }
    read(doc, "rng_seed", path, c.rng_seed);
    read(doc, "embedding_length", path, c.embedding_length);
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return c;
}

json to_json(const ExperimentSpec& s)
{
    return {{"mode", to_string(s.mode)},
            {"scenario", scenario_to_json(s.scenario)},
            {"strategies", s.strategies},
            {"sweep", {{"variable", s.sweep.variable}, {"values", s.sweep.values}}},
            {"alpha", s.alpha},
            {"beta", s.beta},
            {"power_dbm", s.power_dbm},
            {"rho", s.rho},
            {"sir_weight", s.sir_weight},
            {"with_sir", s.with_sir},
            {"realizations", s.realizations},
            {"trials", s.trials},
            {"seed", s.seed},
            {"threads", s.threads},
            {"output", s.output},
            {"max_outer", s.max_outer},
            {"extra_starts", s.extra_starts},
            {"node_budget", s.node_budget}};
}

ExperimentSpec spec_from_json(const json& doc)
{
    reject_unknown(doc, "$",
                   {"mode", "scenario", "strategies", "sweep", "alpha", "beta", "power_dbm", "rho", "sir_weight",
                    "with_sir", "realizations", "trials", "seed", "threads", "output", "max_outer", "extra_starts",
                    "node_budget"});
    ExperimentSpec s;
    std::string mode = to_string(s.mode);
    read(doc, "mode", "$", mode);
    try {
        s.mode = parse_mode(mode);
    } catch (const ConfigError& e) {
        throw ConfigError("$.mode", e.what());
    }
    s.scenario = is_passive(s.mode) ? channel::ScenarioConfig::standalone() : channel::ScenarioConfig::joint();
    if (doc.contains("scenario")) {
        json scen = doc["scenario"];
        if (scen.is_object() && !scen.contains("preset")) scen["preset"] = is_passive(s.mode) ? "standalone" : "joint";
        s.scenario = scenario_from_json(scen, "$.scenario");
    }
    read(doc, "strategies", "$", s.strategies);
    if (doc.contains("sweep")) {
        const json& sw = doc["sweep"];
        reject_unknown(sw, "$.sweep", {"variable", "values"});
        read(sw, "variable", "$.sweep", s.sweep.variable);
        read(sw, "values", "$.sweep", s.sweep.values);
    }
    read(doc, "alpha", "$", s.alpha);
    read(doc, "beta", "$", s.beta);
    read(doc, "power_dbm", "$", s.power_dbm);
    read(doc, "rho", "$", s.rho);
    read(doc, "sir_weight", "$", s.sir_weight);
    read(doc, "with_sir", "$", s.with_sir);
    read(doc, "realizations", "$", s.realizations);
    read(doc, "trials", "$", s.trials);
    read(doc, "seed", "$", s.seed);
    read(doc, "threads", "$", s.threads);
    read(doc, "output", "$", s.output);
    read(doc, "max_outer", "$", s.max_outer);
    read(doc, "extra_starts", "$", s.extra_starts);
    read(doc, "node_budget", "$", s.node_budget);
    s.validate();
    return s;
}

void ExperimentSpec::validate() const
{
    static const std::map<Mode, std::set<std::string>> allowed = {
        {Mode::passive_pm, {"alpha", "N", "B", "P"}},
        {Mode::passive_qos, {"P", "N", "B"}},
        {Mode::joint_pm, {"alpha", "beta", "N", "B", "P"}},
        {Mode::joint_qos, {"P", "N", "B", "L"}}};
    if (!allowed.at(mode).contains(sweep.variable))
        throw ConfigError("$.sweep.variable", "'" + sweep.variable + "' cannot be swept in mode " + to_string(mode));
    if (sweep.values.empty()) throw ConfigError("$.sweep.values", "grid must not be empty");
    if (!std::is_sorted(sweep.values.begin(), sweep.values.end()))
        throw ConfigError("$.sweep.values", "grid must be sorted ascending");
    const bool integral = sweep.variable == "N" || sweep.variable == "B" || sweep.variable == "L";
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
        const double v = sweep.values[i];
        const std::string p = "$.sweep.values[" + std::to_string(i) + "]";
        if (!std::isfinite(v)) throw ConfigError(p, "must be finite");
        if (integral && (v != std::floor(v) || v < (sweep.variable == "N" ? 0.0 : 1.0)))
            throw ConfigError(p, "must be a " + std::string(sweep.variable == "N" ? "non-negative" : "positive") + " integer");
        if ((sweep.variable == "alpha" || sweep.variable == "beta") && !(v > 0.0))
            throw ConfigError(p, "must be positive");
    }
    if (strategies.empty()) throw ConfigError("$.strategies", "at least one strategy required");
    for (std::size_t i = 0; i < strategies.size(); ++i) {
        const std::string p = "$.strategies[" + std::to_string(i) + "]";
        const std::string probe = sweep.variable == "B" && strategies[i] != "continuous" ? strategies[i] + "-1" : strategies[i];
        passive::Strategy st;
        try {
            st = passive::Strategy::parse(probe);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(p, e.what());
        }
        if (!is_passive(mode) && st.kind != passive::Strategy::Kind::continuous && st.kind != passive::Strategy::Kind::quantize)
            throw ConfigError(p, "joint designs support 'continuous' and 'quantize-B' only");
        if (st.kind == passive::Strategy::Kind::bnb && sweep.variable != "B" && st.bits > 2)
            throw ConfigError(p, "branch and bound is limited to 1 or 2 bits");
    }
    auto positive = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("$.") + field, "must be positive");
    };
    positive(alpha, "alpha");
    positive(beta, "beta");
    positive(rho, "rho");
    positive(sir_weight, "sir_weight");
    if (!std::isfinite(power_dbm)) throw ConfigError("$.power_dbm", "must be finite");
    if (realizations < 1) throw ConfigError("$.realizations", "must be >= 1");
    if (trials < 1) throw ConfigError("$.trials", "must be >= 1");
    if (threads < 0) throw ConfigError("$.threads", "must be >= 0 (0 = all cores)");
    if (max_outer < 0) throw ConfigError("$.max_outer", "must be >= 0");
    if (extra_starts < 0) throw ConfigError("$.extra_starts", "must be >= 0");
    if (node_budget < 1) throw ConfigError("$.node_budget", "must be >= 1");
    if (output.empty()) throw ConfigError("$.output", "must not be empty");
    try {
        scenario.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("$.scenario", e.what());
    }
}

bool ExperimentSpec::operator==(const ExperimentSpec& other) const { return to_json(*this) == to_json(other); }

std::vector<std::filesystem::path> run_experiment(const ExperimentSpec& spec, Command command)
{
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    const std::filesystem::path dir(spec.output);
    std::filesystem::create_directories(dir);

    std::vector<std::filesystem::path> files;
    switch (command) {
    case Command::design: run_design(spec, dir, files); break;
    case Command::sweep: run_sweep(spec, dir, files); break;
    case Command::simulate:
        if (spec.sweep.variable != "P") throw ConfigError("$.sweep.variable", "simulate sweeps the transmit power P");
        run_simulate(spec, dir, files);
        break;
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json names = json::array();
    for (const auto& f : files) names.push_back(f.filename().string());
    const char* command_name = command == Command::design ? "design" : command == Command::sweep ? "sweep" : "simulate";
    const json manifest{{"command", command_name}, {"version", IRS_SLP_VERSION}, {"seed", spec.seed},
                        {"wall_time_s", wall},     {"files", names},            {"spec", to_json(spec)}};
    files.push_back(write_file(dir, "manifest.json", manifest.dump(2) + "\n"));
    return files;
}

} // namespace irs::experiment
