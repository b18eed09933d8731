#include "nls/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nls {

using nlohmann::json;

std::vector<std::string> RunConfig::validate() const {
    grid.validate();
    evolution.validate();
    if (profile.kind != "power_law" && profile.kind != "gaussian" && profile.kind != "constant")
        throw config_error("config: unknown profile.kind '" + profile.kind + "'");
    if (i_transition != "power_law" && i_transition != "smoothstep")
        throw config_error("config: unknown i_operator.transition '" + i_transition + "'");
    if (i_operator_N.empty()) throw config_error("config: i_operator.N list must not be empty");
    for (double N : i_operator_N) i_spec(N).validate();
    if (workers < 1) throw config_error("config: workers must be >= 1");

    std::vector<std::string> warnings;
    double s = profile.s, sig = i_operator_sigma;
    bool in_window = (s > 3.0 / 7.0) && (s <= 1.0) && (sig > 6.0 / 7.0) && (sig < 2.0 * s);
    if (!in_window) {
        std::ostringstream msg;
        msg << "parameters (s=" << s << ", sigma=" << sig
            << ") outside the window 3/7 < s <= 1, 6/7 < sigma < 2s";
        if (paper_regime) throw config_error("config: --paper-regime violated: " + msg.str());
        warnings.push_back(msg.str());
    }
    return warnings;
}

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (j.contains(key)) return j.at(key).get<T>();
    return fallback;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config: JSON parse failure: ") + e.what());
    }

    RunConfig c;
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        c.grid.n = get_or(g, "n", c.grid.n);
        c.grid.box = get_or(g, "L", c.grid.box);
        c.grid.dim = get_or(g, "d", c.grid.dim);
    }
    if (j.contains("profile")) {
        const auto& p = j["profile"];
        c.profile.kind = get_or<std::string>(p, "kind", c.profile.kind);
        c.profile.s = get_or(p, "s", c.profile.s);
        c.profile.decay_margin = get_or(p, "decay_margin", c.profile.decay_margin);
        c.profile.amplitude = get_or(p, "amplitude", c.profile.amplitude);
        c.profile.width = get_or(p, "width", c.profile.width);
    }
    if (j.contains("randomization")) {
        const auto& r = j["randomization"];
        c.randomize = get_or(r, "enabled", c.randomize);
        c.seed = get_or(r, "seed", c.seed);
        c.seed_begin = get_or(r, "seed_begin", c.seed_begin);
        c.seed_end = get_or(r, "seed_end", c.seed_end);
    }
    if (j.contains("i_operator")) {
        const auto& i = j["i_operator"];
        c.i_operator_N = get_or(i, "N", c.i_operator_N);
        c.i_operator_sigma = get_or(i, "sigma", c.i_operator_sigma);
        c.i_transition = get_or<std::string>(i, "transition", c.i_transition);
    }
    if (j.contains("evolution")) {
        const auto& e = j["evolution"];
        c.evolution.dt = get_or(e, "dt", c.evolution.dt);
        c.evolution.t_end = get_or(e, "t_end", c.evolution.t_end);
        c.evolution.checkpoint_every = get_or(e, "checkpoint_every", c.evolution.checkpoint_every);
        c.evolution.dealias = get_or(e, "dealias", c.evolution.dealias);
        c.evolution.nonlinearity_enabled = get_or(e, "nonlinearity", c.evolution.nonlinearity_enabled);
        c.evolution.guard_auto_halve = get_or(e, "guard_auto_halve", c.evolution.guard_auto_halve);
    }
    if (j.contains("diagnostics")) {
        const auto& d = j["diagnostics"];
        c.diagnostics.conserved = get_or(d, "conserved", c.diagnostics.conserved);
        c.diagnostics.increments = get_or(d, "increments", c.diagnostics.increments);
        c.diagnostics.bundles = get_or(d, "bundles", c.diagnostics.bundles);
        c.diagnostics.morawetz = get_or(d, "morawetz", c.diagnostics.morawetz);
        c.diagnostics.scattering = get_or(d, "scattering", c.diagnostics.scattering);
        c.diagnostics.theta = get_or(d, "theta", c.diagnostics.theta);
        c.diagnostics.bundle_l10_3 = get_or(d, "bundle_l10_3", c.diagnostics.bundle_l10_3);
        c.diagnostics.scattering_tol = get_or(d, "scattering_tol", c.diagnostics.scattering_tol);
        c.diagnostics.scattering_window = get_or(d, "scattering_window", c.diagnostics.scattering_window);
        c.diagnostics.theta_m_cap = get_or(d, "theta_m_cap", c.diagnostics.theta_m_cap);
        c.diagnostics.theta_e_unit = get_or(d, "theta_e_unit", c.diagnostics.theta_e_unit);
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        c.output.directory = get_or<std::string>(o, "directory", c.output.directory);
        c.output.write_fields = get_or(o, "write_fields", c.output.write_fields);
        c.output.write_trajectory = get_or(o, "write_trajectory", c.output.write_trajectory);
        c.output.write_tables = get_or(o, "write_tables", c.output.write_tables);
    }
    c.paper_regime = get_or(j, "paper_regime", c.paper_regime);
    c.workers = get_or(j, "workers", c.workers);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
    json j;
    j["grid"] = {{"n", c.grid.n}, {"L", c.grid.box}, {"d", c.grid.dim}};
    j["profile"] = {{"kind", c.profile.kind},
                    {"s", c.profile.s},
                    {"decay_margin", c.profile.decay_margin},
                    {"amplitude", c.profile.amplitude},
                    {"width", c.profile.width}};
    j["randomization"] = {{"enabled", c.randomize},
                          {"seed", c.seed},
                          {"seed_begin", c.seed_begin},
                          {"seed_end", c.seed_end}};
    j["i_operator"] = {{"N", c.i_operator_N}, {"sigma", c.i_operator_sigma}, {"transition", c.i_transition}};
    j["evolution"] = {{"dt", c.evolution.dt},
                      {"t_end", c.evolution.t_end},
                      {"checkpoint_every", c.evolution.checkpoint_every},
                      {"dealias", c.evolution.dealias},
                      {"nonlinearity", c.evolution.nonlinearity_enabled},
                      {"guard_auto_halve", c.evolution.guard_auto_halve}};
    j["diagnostics"] = {{"conserved", c.diagnostics.conserved},
                        {"increments", c.diagnostics.increments},
                        {"bundles", c.diagnostics.bundles},
                        {"morawetz", c.diagnostics.morawetz},
                        {"scattering", c.diagnostics.scattering},
                        {"theta", c.diagnostics.theta},
                        {"bundle_l10_3", c.diagnostics.bundle_l10_3},
                        {"scattering_tol", c.diagnostics.scattering_tol},
                        {"scattering_window", c.diagnostics.scattering_window},
                        {"theta_m_cap", c.diagnostics.theta_m_cap},
                        {"theta_e_unit", c.diagnostics.theta_e_unit}};
    j["output"] = {{"directory", c.output.directory},
                   {"write_fields", c.output.write_fields},
                   {"write_trajectory", c.output.write_trajectory},
                   {"write_tables", c.output.write_tables}};
    j["paper_regime"] = c.paper_regime;
    j["workers"] = c.workers;
    return j.dump(2) + "\n";
}

}  // namespace nls
