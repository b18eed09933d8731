// Data-parallel kernels for the pointwise field arithmetic.
//
// Each operation has a scalar reference implementation and, on x86-64 with
// AVX2+FMA, a vectorized variant selected at runtime. The two are equivalence
// tested against each other; kernels::set_force_scalar(true) pins the scalar
// path (used by the tests and available for debugging).
//
// Reductions accumulate in fixed lane order, so results are bit-reproducible
// for a given instruction set.
#pragma once

#include <complex>
#include <cstddef>

namespace nls::kernels {

using cplx = std::complex<double>;

void set_force_scalar(bool v);
bool avx2_available();
// "avx2" or "scalar": the path the dispatcher currently resolves to.
const char* active_path();

// z[i] *= w[i]  (complex Fourier multiplier / cached propagator phase)
void cmul_inplace(cplx* z, const cplx* w, std::size_t n);

// z[i] *= w[i]  (real symbol: I-operator, projectors, dealias masks)
void rmul_inplace(cplx* z, const double* w, std::size_t n);

// out[i] = y[i] + a*x[i]
void axpy(cplx a, const cplx* x, const cplx* y, cplx* out, std::size_t n);

// z[i] *= s
void scale_inplace(cplx* z, cplx s, std::size_t n);

// sum |z[i]|^2
double sum_abs2(const cplx* z, std::size_t n);

// sum |z[i]|^4
double sum_abs4(const cplx* z, std::size_t n);

// sum w[i]*|z[i]|^2  (weighted spectral sums: Sobolev norms, kinetic energy)
double sum_weighted_abs2(const double* w, const cplx* z, std::size_t n);

// max |z[i]|^2  (stability guard)
double max_abs2(const cplx* z, std::size_t n);

// sum |z[i]|^p for arbitrary real p >= 1 (scalar only; p in {2,4} has the
// dedicated kernels above)
double sum_abs_pow(const cplx* z, std::size_t n, double p);

// z[i] *= exp(-i*dt*|z[i]|^2): the exact nonlinear substep of the cubic
// defocusing equation. Scalar only; libm sincos keeps |z| exact to ulp.
void phase_rotate_cubic(cplx* z, double dt, std::size_t n);

}  // namespace nls::kernels
