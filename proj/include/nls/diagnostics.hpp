// Computable functionals tracked along trajectories: conserved quantities,
// the modified energy of the forced remainder and its increments, the
// nonlinearity/I-operator commutator, Strichartz-type norm bundles, Morawetz
// action and interaction functionals, bilinear dispersion ratios, the
// scattering detector, and the double-bootstrap monitor.
#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nls/evolve.hpp"
#include "nls/field.hpp"
#include "nls/multiplier.hpp"

namespace nls {

struct ConservedSet {
    double mass = 0.0;      // ||u||_{L^2}^2
    double kinetic = 0.0;   // (1/2) ||grad u||_{L^2}^2
    double potential = 0.0; // (1/4) int |u|^4
    double energy = 0.0;    // kinetic + potential
};

ConservedSet conserved_set(const Field& u);

// E(v) = (1/2)||grad I v||^2 + (1/4) int |I v + I f|^4.
double modified_energy(const Field& v, const Field& f, const IOperatorSpec& spec);

// Instantaneous d/dt of the modified energy from the fields at one time:
//   -Re<d_t(Iv), H> + Re<i Lap(If), N(Iu)>
// with N the dealiased cubic product. Cross-checks the checkpoint-difference
// path on small grids.
double modified_energy_flux(const Field& u, const Field& f, const IOperatorSpec& spec);

struct CommutatorRecord {
    Field H;          // spectral representation
    double l2_norm = 0.0;
    double N = 0.0;
    double sigma = 0.0;
};

// H = I(|u|^2 u) - |Iu|^2 (Iu), both cubic products dealiased identically.
CommutatorRecord commutator_H(const Field& u, const IOperatorSpec& spec);

struct StrichartzPair {
    double q;  // time exponent, may be infinity
    double r;  // space exponent
};

// Admissibility 2/q + 3(1/r - 1/2) = 0.
bool is_admissible_pair(const StrichartzPair& p, double tol = 1e-9);
std::vector<StrichartzPair> default_strichartz_pairs();

struct ZIBundle {
    double value = 0.0;  // max over the requested pairs
    std::vector<std::pair<std::string, double>> per_pair;
};

// max over admissible (q,r) of || <grad> I v ||_{L^q_t L^r_x} by checkpoint
// quadrature (composite trapezoid; L^inf_t is the checkpoint max).
ZIBundle zI_bundle(const Trajectory& v_traj, const IOperatorSpec& spec,
                   std::span<const StrichartzPair> pairs);

struct SpacetimeNormBundle {
    double F = 0.0;      // sum of the four <grad>^s f constituents
    double F_inf = 0.0;  // sum of the two L^inf_t constituents
    double F2 = 0.0;     // sum of the two <grad> I f constituents
    std::map<std::string, double> constituents;
};

// Norm bundle of the linear flow f(t) = e^{it Lap} f0: constituents
//   F:     <grad>^s f in L^10_{t,x}, L^4_{t,x}, L^5_{t,x}, L^4_t L^12_x
//   F_inf: f in L^inf_t L^4_x, L^inf_t L^6_x
//   F2:    <grad> I f in L^2_t L^inf_x, L^2_t L^6_x
// plus an optional L^{10/3}_{t,x} constituent (off by default).
SpacetimeNormBundle f_norm_bundle(const Trajectory& f_traj, const IOperatorSpec& spec, double s,
                                  bool include_l10_3 = false);

struct MorawetzRecord {
    double action_origin = 0.0;       // M_0(t), origin-centered weight
    double interaction = 0.0;         // int M_y |Iu(y)|^2 dy
    double quartic_density = 0.0;     // int |Iu|^4 dx
    double quartic_interaction = 0.0; // int int |Iu(x)|^4 |Iu(y)|^2 / |x-y|
    std::string regularization;       // origin-cell treatment of the kernels
};

// d=3 only; the pairwise terms are evaluated by FFT convolution against the
// periodic x/|x| and 1/|x| kernels.
MorawetzRecord morawetz_record(const Field& u, const IOperatorSpec& spec);

struct MorawetzCheck {
    double lhs = 0.0;        // int int |Iu|^4 dx dt
    double rhs_core = 0.0;   // ||Iu||^2_{Linf L2} ||Iu||^2_{Linf Hdot^{1/2}}
    double ratio = 0.0;
    double zero_mode_mass = 0.0;  // max_t |u_hat(0)|^2, audit for Hdot^{1/2}
};

MorawetzCheck interaction_morawetz_check(const Trajectory& u_traj, const IOperatorSpec& spec);

struct IncrementSeries {
    double N = 0.0;
    std::vector<double> increments;  // |E(v)(t_{i+1}) - E(v)(t_i)|
    double total_variation = 0.0;
};

struct IncrementReport {
    std::vector<IncrementSeries> per_N;
    std::optional<double> alpha;  // fitted exponent of total_variation ~ N^alpha
    double alpha_residual = 0.0;
};

// Increment series of the forcing-baseline-subtracted modified energy
// E(v) - E(0): the baseline (1/4) int |If(t)|^4 drifts along the free flow by
// itself, so subtracting it makes the series vanish identically for v = 0.
// f0_omega may be a zero field for unforced runs; then the series is the plain
// energy of Iu and the baseline is zero.
IncrementReport energy_increment_series(const Trajectory& u_traj, const Field& f0_omega,
                                        std::span<const IOperatorSpec> specs);

// ||(e^{it Lap} P_K u0)(e^{it Lap} P_M u0)||_{L^2_{t,x}([0,T])} divided by
// ||P_K u0|| ||P_M u0||; sharp dyadic shells, trapezoid in time.
double bilinear_strichartz_ratio(const Field& u0, double K, double M, double T,
                                 int n_time_samples = 33);

struct ScatteringVerdict {
    bool scattered = false;
    std::optional<Field> final_state;  // w at the last checkpoint
    std::vector<double> cauchy_tail;   // ||w(t_{i+1}) - w(t_i)||_{H^sigma}
};

// w(t_i) = e^{-i t_i Lap} u(t_i); scattered iff over the trailing window every
// tail entry is below tol and the sequence is nonincreasing up to 10% slack.
ScatteringVerdict scattering_detect(const Trajectory& u_traj, double sigma, double tol, int window);

struct ThetaReport {
    double T = 0.0;  // largest admissible checkpoint time
    std::vector<double> times;
    std::vector<double> energy_sup;     // running sup of E(v)
    std::vector<double> l4_accum;       // running int_0^t int |Iv|^4
    double energy_budget = 0.0;         // N^{2(1-sigma)} * e_unit
    double l4_budget = 0.0;             // M_cap * N^{1-sigma}
};

// Largest checkpoint time up to which both double-bootstrap constraints hold.
ThetaReport theta_monitor(const Trajectory& u_traj, const Field& f0_omega,
                          const IOperatorSpec& spec, double M_cap, double e_unit = 1.0);

}  // namespace nls
