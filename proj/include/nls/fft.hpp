// FFTW backend. Plans are cached per (dim, n, direction) and created with
// FFTW_ESTIMATE so planning is deterministic run to run. Execution uses the
// new-array interface; all field buffers share 32-byte alignment.
#pragma once

#include <complex>

#include "nls/grid.hpp"

namespace nls::fft {

using cplx = std::complex<double>;

// Unnormalized c2c transform, out-of-place; in and out must not alias.
// forward=true applies e^{-i xi.x} (FFTW_FORWARD).
void execute(const GridSpec& grid, const cplx* in, cplx* out, bool forward);

}  // namespace nls::fft
