#include "nls/evolve.hpp"

#include <cmath>
#include <map>

#include "nls/fft.hpp"
#include "nls/kernels.hpp"

namespace nls {

namespace {

// Free-propagator phase table e^{-i t |xi|^2} on the grid's lattice.
cvec propagator_table(const GridSpec& g, double t) {
    cvec tab(g.size());
    for (std::size_t i = 0; i < tab.size(); ++i) {
        auto xi = g.freq(i);
        double ph = -t * (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
        tab[i] = cplx(std::cos(ph), std::sin(ph));
    }
    return tab;
}

double forward_scale(const GridSpec& g) {
    return std::pow(g.box, 0.5 * g.dim) / static_cast<double>(g.size());
}
double backward_scale(const GridSpec& g) { return std::pow(g.box, -0.5 * g.dim); }

// One Strang step on a spectral state, using caller-provided scratch.
struct StepWorkspace {
    Field phys;
    std::map<double, cvec> half_kicks;

    explicit StepWorkspace(const GridSpec& g) : phys(g, Rep::physical) {}

    const cvec& half_kick(const GridSpec& g, double half_dt) {
        auto it = half_kicks.find(half_dt);
        if (it == half_kicks.end())
            it = half_kicks.emplace(half_dt, propagator_table(g, half_dt)).first;
        return it->second;
    }
};

void strang_step_inplace(Field& u, double dt, const EvolutionConfig& cfg, StepWorkspace& ws) {
    const GridSpec& g = u.grid();
    const cvec& kick = ws.half_kick(g, 0.5 * dt);
    kernels::cmul_inplace(u.data(), kick.data(), u.size());
    if (cfg.nonlinearity_enabled) {
        fft::execute(g, u.data(), ws.phys.data(), false);
        kernels::scale_inplace(ws.phys.data(), cplx(backward_scale(g), 0.0), ws.phys.size());
        kernels::phase_rotate_cubic(ws.phys.data(), dt, ws.phys.size());
        fft::execute(g, ws.phys.data(), u.data(), true);
        kernels::scale_inplace(u.data(), cplx(forward_scale(g), 0.0), u.size());
        if (cfg.dealias) apply_weight_table_inplace(u, *dealias_mask(g));
    }
    kernels::cmul_inplace(u.data(), kick.data(), u.size());
}

bool finite_state(const Field& u) {
    double m = kernels::max_abs2(u.data(), u.size());
    return std::isfinite(m);
}

}  // namespace

Field linear_propagate(const Field& field, double t) {
    Field spec = as_spectral(field);
    cvec tab = propagator_table(spec.grid(), t);
    kernels::cmul_inplace(spec.data(), tab.data(), spec.size());
    if (field.rep() == Rep::physical) return transform(spec, Rep::physical);
    return spec;
}

Field nonlinear_substep(const Field& field, double dt) {
    if (field.rep() != Rep::physical)
        throw structural_error("nonlinear_substep: physical representation required");
    Field out = field;
    kernels::phase_rotate_cubic(out.data(), dt, out.size());
    return out;
}

Field step_strang(const Field& field, double dt, const EvolutionConfig& config) {
    Field u = as_spectral(field);
    StepWorkspace ws(u.grid());
    strang_step_inplace(u, dt, config, ws);
    if (field.rep() == Rep::physical) return transform(u, Rep::physical);
    return u;
}

Trajectory evolve(const Field& u0, const EvolutionConfig& config) {
    config.validate();
    const GridSpec& g = u0.grid();

    Trajectory traj;
    traj.config = config;

    Field u = as_spectral(u0);
    if (config.dealias && config.nonlinearity_enabled)
        apply_weight_table_inplace(u, *dealias_mask(g));
    traj.initial = u;
    traj.times.push_back(0.0);
    traj.checkpoints.push_back(u);

    long n_steps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-12));
    StepWorkspace ws(g);
    int subdivide = 1;

    auto guard_check = [&](long step_idx) {
        // Stability guard dt*max|u|^2 <= 1/2, evaluated at checkpoints.
        Field phys = transform(u, Rep::physical);
        double m2 = kernels::max_abs2(phys.data(), phys.size());
        if (!std::isfinite(m2)) {
            std::string msg = "evolve: non-finite state at t=" + std::to_string(traj.times.back());
            throw evolution_blowup(msg, std::move(traj));
        }
        if (config.nonlinearity_enabled && config.dt * m2 / subdivide > 0.5) {
            traj.warnings.push_back("stability guard dt*max|u|^2 > 0.5 at step " +
                                    std::to_string(step_idx));
            if (config.guard_auto_halve && subdivide < (1 << 20)) {
                subdivide *= 2;
                traj.warnings.push_back("auto-halving: substep divisor now " +
                                        std::to_string(subdivide));
            }
        }
    };

    guard_check(0);

    double t = 0.0;
    for (long step = 1; step <= n_steps; ++step) {
        double target = std::min(step * config.dt, config.t_end);
        double dt_step = target - t;
        if (dt_step <= 0.0) break;
        for (int s = 0; s < subdivide; ++s)
            strang_step_inplace(u, dt_step / subdivide, config, ws);
        t = target;
        bool at_checkpoint = (step % config.checkpoint_every == 0) || step == n_steps;
        if (at_checkpoint) {
            if (!finite_state(u)) {
                std::string msg = "evolve: non-finite state at t=" + std::to_string(t);
                throw evolution_blowup(msg, std::move(traj));
            }
            traj.times.push_back(t);
            traj.checkpoints.push_back(u);
            guard_check(step);
        }
    }
    return traj;
}

Trajectory forced_remainder(const Trajectory& traj, const Field& f0_omega) {
    if (traj.count() == 0) throw structural_error("forced_remainder: empty trajectory");
    Field f0 = as_spectral(f0_omega);
    if (!(f0.grid() == traj.initial.grid()))
        throw structural_error("forced_remainder: grid mismatch between trajectory and f0");

    Trajectory out;
    out.config = traj.config;
    out.times = traj.times;
    out.checkpoints.reserve(traj.count());
    for (std::size_t i = 0; i < traj.count(); ++i) {
        Field f_t = linear_propagate(f0, traj.times[i]);
        out.checkpoints.push_back(field_sub(traj.checkpoints[i], f_t));
    }
    out.initial = out.checkpoints.front();
    return out;
}

}  // namespace nls
