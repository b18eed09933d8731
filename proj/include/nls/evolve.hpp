// Time evolution for i u_t + Lap u = |u|^2 u on the periodic box: exact free
// propagator, Strang splitting with optional 2/3-rule dealiasing, and the
// forced-remainder view v(t) = u(t) - e^{it Lap} f0.
#pragma once

#include <string>
#include <vector>

#include "nls/field.hpp"
#include "nls/multiplier.hpp"

namespace nls {

struct EvolutionConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    int checkpoint_every = 10;   // steps between stored checkpoints
    bool dealias = true;         // 2/3-rule mask around the nonlinear substep
    bool nonlinearity_enabled = true;  // test hook; CLI exposes only --linear-only
    bool guard_auto_halve = false;     // subdivide steps when the guard trips

    void validate() const {
        if (!(dt > 0.0)) throw config_error("EvolutionConfig: dt must be positive");
        if (!(t_end >= 0.0)) throw config_error("EvolutionConfig: t_end must be nonnegative");
        if (checkpoint_every < 1) throw config_error("EvolutionConfig: checkpoint_every >= 1");
    }
};

struct Trajectory {
    std::vector<double> times;        // increasing, times[0] = 0
    std::vector<Field> checkpoints;   // spectral representation, checkpoints[0] = initial
    Field initial;
    EvolutionConfig config;
    std::vector<std::string> warnings;

    std::size_t count() const { return checkpoints.size(); }
};

// Blow-up carries the healthy prefix so partial reports remain possible.
struct evolution_blowup : blowup_error {
    evolution_blowup(const std::string& what, Trajectory partial_traj)
        : blowup_error(what, partial_traj.count() == 0 ? 0 : partial_traj.count() - 1),
          partial(std::move(partial_traj)) {}
    Trajectory partial;
};

// e^{it Lap}: spectral phase e^{-i t |xi|^2}. Group law and H^s isometry hold
// to roundoff; any sign of t is allowed.
Field linear_propagate(const Field& field, double t);

// Exact solution of i u_t = |u|^2 u over dt: pointwise u <- u e^{-i|u|^2 dt}.
// Physical representation required.
Field nonlinear_substep(const Field& field, double dt);

// Second-order splitting: linear half kick, nonlinear substep (masked when
// config.dealias), linear half kick. Output representation matches input.
Field step_strang(const Field& field, double dt, const EvolutionConfig& config);

// March to t_end storing a checkpoint every `checkpoint_every` steps (plus the
// final state). When dealiasing is on the initial data is band-limited to the
// 2/3 ball on entry, and `initial` records that band-limited field.
Trajectory evolve(const Field& u0, const EvolutionConfig& config);

// v(t_i) = u(t_i) - e^{i t_i Lap} f0_omega at every checkpoint.
Trajectory forced_remainder(const Trajectory& traj, const Field& f0_omega);

}  // namespace nls
