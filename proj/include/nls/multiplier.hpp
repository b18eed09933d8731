// Frequency-diagonal operators: generic Fourier multipliers, the smoothing
// I-operator, dyadic and unit-cube projector banks, and the dealiasing mask.
#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nls/field.hpp"

namespace nls {

struct MultiplierSymbol {
    std::function<cplx(const std::array<double, 3>& xi)> eval;
    std::string label;
};

// Smoothing multiplier m(xi): identity below N, (N/|xi|)^{1-sigma} tail.
struct IOperatorSpec {
    enum class Transition { power_law, smoothstep };

    double N = 16.0;             // truncation level, frequency units
    double sigma = 0.75;         // regularity, in (1/2, 1]
    Transition transition = Transition::power_law;

    void validate() const {
        if (!(N > 0.0)) throw config_error("IOperatorSpec: N must be positive");
        if (!(sigma > 0.5) || !(sigma <= 1.0))
            throw config_error("IOperatorSpec: sigma must lie in (1/2, 1]");
    }
};

// m(|xi|) for the given spec. The default power-law transition is
// min(1, (N/|xi|)^{1-sigma}); the smoothstep variant blends C^1 across
// N < |xi| < 2N. Both agree with the defining branches outside (N, 2N).
double i_symbol(double xi_mag, const IOperatorSpec& spec);

MultiplierSymbol make_i_symbol(const IOperatorSpec& spec);
// e^{-i t |xi|^2}
MultiplierSymbol make_free_propagator_symbol(double t);
// <xi>^s or |xi|^s
MultiplierSymbol make_bessel_symbol(double s);
MultiplierSymbol make_riesz_symbol(double s);
// Sharp dyadic shell K/2 < |xi| <= K.
MultiplierSymbol make_lp_projector(double K);

// Pointwise multiplication of spectral coefficients; output representation
// matches the input's.
Field apply_multiplier(const Field& field, const MultiplierSymbol& symbol);

enum class BankKind { littlewood_paley, littlewood_paley_smooth, wiener_cube };

// Partition-of-unity banks resolved by the grid. Littlewood-Paley banks are a
// low block plus dyadic shells; the Wiener bank covers the integer lattice
// cubes up to the grid Nyquist.
std::vector<MultiplierSymbol> projector_bank(const GridSpec& grid, BankKind kind);

// 1D window of the Wiener decomposition: C^inf bump with support [-1, 1],
// psi(0)=1, and sum_k psi(t - k) = 1.
double wiener_window(double t);
// Largest cube index needed per axis to cover the grid's frequencies.
int wiener_kmax(const GridSpec& grid);

// ---- fast paths over cached real weight tables ----

using weight_table = std::vector<double, AlignedAllocator<double>>;
using weight_table_ptr = std::shared_ptr<const weight_table>;

// Cached m(xi) table for a (grid, spec) pair.
weight_table_ptr i_weight_table(const GridSpec& grid, const IOperatorSpec& spec);
// Cached 2/3-rule mask: 1 on modes with 3|m_i| <= n per axis, else 0.
weight_table_ptr dealias_mask(const GridSpec& grid);
// Table of f(|xi|) for an arbitrary radial function (uncached).
weight_table radial_weight_table(const GridSpec& grid, const std::function<double(double)>& f);

// Multiply a field's spectral coefficients by a real table; representation is
// preserved.
Field apply_weight_table(const Field& field, const weight_table& w);
// In-place variant, field must be spectral.
void apply_weight_table_inplace(Field& field, const weight_table& w);

// I-operator over the cached table.
Field apply_i_operator(const Field& field, const IOperatorSpec& spec);

// d/dx_axis via the i*xi multiplier. The unpaired Nyquist mode is zeroed so
// derivatives of real fields stay real.
Field spectral_derivative(const Field& field, int axis);

}  // namespace nls
