// Periodic box discretization: n^d lattice on [-L/2, L/2)^d with the dual
// Fourier lattice {2*pi*m/L : -n/2 <= m_i < n/2}.
#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "nls/errors.hpp"

namespace nls {

inline constexpr double kPi = 3.14159265358979323846;

struct GridSpec {
    int n = 32;        // points per dimension, power of two, >= 8
    double box = 2.0 * kPi;  // side length L
    int dim = 3;       // 3 for production runs, 1 for fast unit tests

    void validate() const {
        if (n < 8 || (n & (n - 1)) != 0)
            throw structural_error("GridSpec: n must be a power of two >= 8, got " + std::to_string(n));
        if (!(box > 0.0)) throw structural_error("GridSpec: box length must be positive");
        if (dim < 1 || dim > 3) throw structural_error("GridSpec: dim must be 1, 2 or 3");
    }

    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < dim; ++i) s *= static_cast<std::size_t>(n);
        return s;
    }

    double dx() const { return box / n; }
    double cell_volume() const {
        double v = 1.0;
        for (int i = 0; i < dim; ++i) v *= dx();
        return v;
    }
    double volume() const {
        double v = 1.0;
        for (int i = 0; i < dim; ++i) v *= box;
        return v;
    }

    double freq_unit() const { return 2.0 * kPi / box; }
    // Largest resolved frequency magnitude per axis.
    double nyquist() const { return kPi * n / box; }

    // Signed integer mode of a storage index along one axis (FFT order).
    int mode_of(int idx) const { return idx < n / 2 ? idx : idx - n; }

    // Physical coordinate of sample j along one axis: the wrapped displacement
    // mode_of(j)*dx in [-L/2, L/2). Sample 0 is the origin, matching the
    // spectral phase convention (an all-positive spectrum peaks at sample 0),
    // so centered weights like <x> and x/|x| align with the coherent center.
    double coord_of(int idx) const { return mode_of(idx) * dx(); }

    // Decompose a row-major linear index into per-axis indices (i0 slowest).
    std::array<int, 3> unravel(std::size_t linear) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = dim - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(linear % n);
            linear /= n;
        }
        return idx;
    }

    // Frequency vector at a linear spectral index.
    std::array<double, 3> freq(std::size_t linear) const {
        auto idx = unravel(linear);
        std::array<double, 3> xi{0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a) xi[a] = mode_of(idx[a]) * freq_unit();
        return xi;
    }

    bool operator==(const GridSpec& o) const { return n == o.n && box == o.box && dim == o.dim; }
};

}  // namespace nls
