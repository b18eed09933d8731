// Wiener randomization and the probabilistic estimators attached to it:
// radial profile synthesis, unit-cube Gaussian decoupling, Khinchin moment
// ratios, sub-Gaussian tail fits, and the weighted radial embedding
// functional.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "nls/field.hpp"
#include "nls/multiplier.hpp"

namespace nls {

// Radial test profile with spectral law amplitude * <xi>^-(s + d/2 + margin):
// H^q norm is finite for q < s + margin and divergent (in the infinite
// resolution limit) above, so membership in H^s is certain by construction.
struct RadialProfile {
    double s_target = 0.5;
    double decay_margin = 0.01;
    double amplitude = 1.0;
    GridSpec grid;

    void validate() const {
        grid.validate();
        if (!(s_target > 0.25) || !(s_target <= 1.0))
            throw config_error("RadialProfile: s_target must lie in (1/4, 1]");
        if (!(decay_margin > 0.0)) throw config_error("RadialProfile: decay_margin must be positive");
    }
};

// Spectral-representation field realizing the profile, deterministic phase 1.
Field synthesize_profile(const RadialProfile& profile);

struct RandomDraw {
    std::uint64_t seed = 0;
    // Gaussian per unit cube, keyed by lattice_label(k); only cubes whose
    // window touches the resolved lattice are stored.
    std::unordered_map<std::uint64_t, cplx> gaussians;
    Field field;  // realized f_0^omega, spectral representation
};

// f_0^omega = sum_k g_k(omega) Q_k f_0 with independent unit-variance complex
// Gaussians g_k derived from (seed, k). Identical seeds give bit-identical
// draws regardless of call order or thread count.
RandomDraw randomize(const Field& f0, std::uint64_t seed);

// Decoupled reference sum: sum_k || Q_k f_0 ||_{H^s}^2 (s = 0 gives L^2).
// This equals E || f_0^omega ||_{H^s}^2 exactly.
double wiener_block_sum_sq(const Field& f0, double s = 0.0);

// Empirical (E|sum c_n g_n|^p)^{1/p} / (sqrt(p) (sum |c_n|^2)^{1/2}).
double khinchin_ratio(std::span<const cplx> coeffs, double p, int n_samples, std::uint64_t seed);

struct TailFit {
    double slope = 0.0;      // fitted d(log tail)/d(lambda^2); negative is sub-Gaussian
    int used_lambdas = 0;
    double residual = 0.0;   // rms residual of the least-squares fit
};

// Least-squares fit of log empirical tail P(sample > lambda) against lambda^2.
TailFit tail_fit(std::span<const double> samples, std::span<const double> lambda_grid);

struct EmbeddingResult {
    double lhs = 0.0;   // max_x <x> (sum_k |Q_k f_0(x)|^2)^{1/2}
    double rhs = 0.0;   // ||f_0||_{H^delta}
    bool input_radial = true;  // warning flag; non-radial input is legal
};

// Weighted square-function functional of the improved radial embedding. The
// ratio lhs/rhs is reported by callers, never asserted against any fixed
// constant.
EmbeddingResult radial_embedding_functional(const Field& f0, double delta);

struct EmbeddingSweep {
    double lhs = 0.0;  // shared by all deltas
    std::vector<double> rhs;
    bool input_radial = true;
};

// Same functional, one G evaluation for a list of deltas.
EmbeddingSweep radial_embedding_sweep(const Field& f0, std::span<const double> deltas);

// Max over lattice shells (exact |m|^2 classes) of the spectral coefficient
// deviation from the shell mean; 0 for exactly radial spectra.
double radial_deviation(const Field& f0);

// Translate a field by `shift` (physical units) via spectral phases.
Field translate_field(const Field& f, const std::array<double, 3>& shift);

}  // namespace nls
