// Run configuration: a single nested JSON document. Every default is written
// back on emission so stored reports are self-describing, and parse -> emit ->
// parse is the identity.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nls/evolve.hpp"
#include "nls/grid.hpp"
#include "nls/multiplier.hpp"

namespace nls {

struct ProfileConfig {
    std::string kind = "power_law";  // power_law | gaussian | constant
    double s = 0.5;                  // Sobolev exponent of the power-law profile
    double decay_margin = 0.01;
    double amplitude = 1.0;
    double width = 2.0;              // gaussian width
};

struct DiagnosticsConfig {
    bool conserved = true;
    bool increments = true;
    bool bundles = true;
    bool morawetz = true;
    bool scattering = true;
    bool theta = false;
    bool bundle_l10_3 = false;       // optional L^{10/3} constituent of F
    double scattering_tol = 1e-3;
    int scattering_window = 5;
    double theta_m_cap = 1.0;
    double theta_e_unit = 1.0;
};

struct OutputConfig {
    std::string directory = "out";
    bool write_fields = true;       // initial and final NLSF1 snapshots
    bool write_trajectory = false;  // every checkpoint, enables `diagnose`
    bool write_tables = true;       // per-checkpoint TSVs
};

struct RunConfig {
    GridSpec grid{32, 2.0 * kPi, 3};
    ProfileConfig profile;
    bool randomize = true;
    std::uint64_t seed = 1;
    std::uint64_t seed_begin = 1;  // ensemble range, inclusive
    std::uint64_t seed_end = 0;    // < seed_begin means "unset"
    std::vector<double> i_operator_N{8.0, 16.0, 32.0};
    double i_operator_sigma = 0.9;
    std::string i_transition = "power_law";  // or "smoothstep"
    EvolutionConfig evolution;
    DiagnosticsConfig diagnostics;
    OutputConfig output;
    bool paper_regime = false;
    int workers = 1;

    IOperatorSpec i_spec(double N) const {
        IOperatorSpec s{N, i_operator_sigma,
                        i_transition == "smoothstep" ? IOperatorSpec::Transition::smoothstep
                                                     : IOperatorSpec::Transition::power_law};
        return s;
    }
    IOperatorSpec reference_i_spec() const {
        return i_spec(i_operator_N.empty() ? 16.0 : i_operator_N.front());
    }

    // Throws config_error under --paper-regime when (s, sigma) leave the
    // admissible window 3/7 < s <= 1, 6/7 < sigma < 2s; otherwise returns
    // warnings for out-of-window values.
    std::vector<std::string> validate() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string emit_config(const RunConfig& config);  // canonical JSON (2-space indent)

}  // namespace nls
