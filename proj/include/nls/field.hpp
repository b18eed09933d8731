// Complex scalar field on a periodic lattice, in physical samples or spectral
// coefficients. The transform pair is unitary from the discrete L^2(box) inner
// product to plain l^2 of coefficients:
//
//   u_hat(xi) = (L^{d/2}/n^d) sum_j u(x_j) e^{-i xi.x_j}
//   u(x_j)    =  L^{-d/2}     sum_xi u_hat(xi) e^{+i xi.x_j}
//
// so ||u||_{L^2}^2 = (L/n)^d sum_j |u_j|^2 = sum_xi |u_hat|^2 and every
// continuum norm formula transcribes directly.
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <new>
#include <vector>

#include "nls/grid.hpp"

namespace nls {

using cplx = std::complex<double>;

// 32-byte aligned storage keeps FFTW's SIMD codelets and the AVX2 kernels on
// their fast paths for every field buffer.
template <typename T, std::size_t Align = 32>
struct AlignedAllocator {
    using value_type = T;
    template <typename U>
    struct rebind {
        using other = AlignedAllocator<U, Align>;
    };
    AlignedAllocator() = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U, Align>&) {}
    T* allocate(std::size_t count) {
        void* p = std::aligned_alloc(Align, ((count * sizeof(T) + Align - 1) / Align) * Align);
        if (!p) throw std::bad_alloc();
        return static_cast<T*>(p);
    }
    void deallocate(T* p, std::size_t) { std::free(p); }
    template <typename U>
    bool operator==(const AlignedAllocator<U, Align>&) const { return true; }
};

using cvec = std::vector<cplx, AlignedAllocator<cplx>>;

enum class Rep : std::uint8_t { physical = 0, spectral = 1 };

class Field {
  public:
    Field() = default;
    Field(const GridSpec& grid, Rep rep) : grid_(grid), rep_(rep), data_(grid.size()) {
        grid_.validate();
    }
    Field(const GridSpec& grid, Rep rep, cvec data) : grid_(grid), rep_(rep), data_(std::move(data)) {
        grid_.validate();
        if (data_.size() != grid_.size()) throw structural_error("Field: data size mismatch");
    }

    const GridSpec& grid() const { return grid_; }
    Rep rep() const { return rep_; }
    std::size_t size() const { return data_.size(); }

    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }
    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }

    bool empty() const { return data_.empty(); }

  private:
    GridSpec grid_;
    Rep rep_ = Rep::physical;
    cvec data_;
};

// Discrete Fourier transform between representations; returns a new field in
// the requested representation. Asking for the representation the field is
// already in is a structural error for the strict entry point.
Field transform(const Field& field, Rep target);

// In-place variant used on hot paths; no-op when already in `target`.
void transform_inplace(Field& field, Rep target);

// Copy-converting accessors.
Field as_spectral(const Field& field);
Field as_physical(const Field& field);

// L^2 norm, computed in whichever representation the field is in.
double l2_norm(const Field& field);

// Sobolev norm (sum_xi w(xi)^{2s} |u_hat|^2)^{1/2} with w = <xi> or |xi|;
// the zero mode contributes nothing to homogeneous norms.
double sobolev_norm(const Field& field, double s, bool homogeneous = false);

// L^p norm over the box, physical quadrature ((L/n)^d sum |u_j|^p)^{1/p};
// p = infinity is the lattice max.
double lp_norm(const Field& field, double p);
double linf_norm(const Field& field);

// Pointwise difference a - b (matching grids and representations).
Field field_sub(const Field& a, const Field& b);

// Test/harness data generators ------------------------------------------------

Field make_zero(const GridSpec& grid, Rep rep = Rep::physical);
Field make_constant(const GridSpec& grid, cplx value);
// e^{i xi.x} with xi = (2*pi/L) * mode
Field make_plane_wave(const GridSpec& grid, const std::array<int, 3>& mode);
// amplitude * exp(-|x - x0|^2 / (2 width^2)), centered coordinates
Field make_gaussian(const GridSpec& grid, double amplitude, double width,
                    const std::array<double, 3>& center = {0.0, 0.0, 0.0});
// Random field with spectral law <xi>^{-decay} and seeded random phases.
Field make_random_field(const GridSpec& grid, std::uint64_t seed, double decay = 2.0,
                        double amplitude = 1.0);

}  // namespace nls
