#include "nls/kernels.hpp"

#include <atomic>
#include <cmath>

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define NLS_HAVE_AVX2_TARGET 1
#include <immintrin.h>
#endif

namespace nls::kernels {

namespace {

std::atomic<bool> g_force_scalar{false};

// ---- scalar reference kernels ----

void cmul_scalar(cplx* z, const cplx* w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] *= w[i];
}

void rmul_scalar(cplx* z, const double* w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] *= w[i];
}

void axpy_scalar(cplx a, const cplx* x, const cplx* y, cplx* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + a * x[i];
}

void scale_scalar(cplx* z, cplx s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] *= s;
}

double sum_abs2_scalar(const cplx* z, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
    return s;
}

double sum_abs4_scalar(const cplx* z, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a2 = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
        s += a2 * a2;
    }
    return s;
}

double sum_weighted_abs2_scalar(const double* w, const cplx* z, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += w[i] * (z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
    return s;
}

double max_abs2_scalar(const cplx* z, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a2 = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
        if (a2 > m) m = a2;
    }
    return m;
}

#ifdef NLS_HAVE_AVX2_TARGET

// ---- AVX2+FMA variants: two complex<double> per 256-bit vector ----

__attribute__((target("avx2,fma"))) void cmul_avx2(cplx* z, const cplx* w, std::size_t n) {
    auto* zp = reinterpret_cast<double*>(z);
    const auto* wp = reinterpret_cast<const double*>(w);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d zv = _mm256_loadu_pd(zp + 2 * i);
        __m256d wv = _mm256_loadu_pd(wp + 2 * i);
        __m256d wre = _mm256_permute_pd(wv, 0x0);   // [wr0 wr0 wr1 wr1]
        __m256d wim = _mm256_permute_pd(wv, 0xF);   // [wi0 wi0 wi1 wi1]
        __m256d zsw = _mm256_permute_pd(zv, 0x5);   // [zi0 zr0 zi1 zr1]
        // even lanes: zr*wr - zi*wi ; odd lanes: zi*wr + zr*wi
        __m256d res = _mm256_fmaddsub_pd(zv, wre, _mm256_mul_pd(zsw, wim));
        _mm256_storeu_pd(zp + 2 * i, res);
    }
    for (; i < n; ++i) z[i] *= w[i];
}

__attribute__((target("avx2,fma"))) void rmul_avx2(cplx* z, const double* w, std::size_t n) {
    auto* zp = reinterpret_cast<double*>(z);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d zv = _mm256_loadu_pd(zp + 2 * i);
        __m128d wlo = _mm_loadu_pd(w + i);
        __m256d wv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(wlo), 0x50);  // [w0 w0 w1 w1]
        _mm256_storeu_pd(zp + 2 * i, _mm256_mul_pd(zv, wv));
    }
    for (; i < n; ++i) z[i] *= w[i];
}

__attribute__((target("avx2,fma"))) void axpy_avx2(cplx a, const cplx* x, const cplx* y, cplx* out,
                                                   std::size_t n) {
    const auto* xp = reinterpret_cast<const double*>(x);
    const auto* yp = reinterpret_cast<const double*>(y);
    auto* op = reinterpret_cast<double*>(out);
    __m256d are = _mm256_set1_pd(a.real());
    __m256d aim = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d xv = _mm256_loadu_pd(xp + 2 * i);
        __m256d yv = _mm256_loadu_pd(yp + 2 * i);
        __m256d xsw = _mm256_permute_pd(xv, 0x5);
        // a*x: even lanes xr*ar - xi*ai, odd lanes xi*ar + xr*ai
        __m256d ax = _mm256_fmaddsub_pd(xv, are, _mm256_mul_pd(xsw, aim));
        _mm256_storeu_pd(op + 2 * i, _mm256_add_pd(yv, ax));
    }
    for (; i < n; ++i) out[i] = y[i] + a * x[i];
}

__attribute__((target("avx2,fma"))) void scale_avx2(cplx* z, cplx s, std::size_t n) {
    auto* zp = reinterpret_cast<double*>(z);
    __m256d sre = _mm256_set1_pd(s.real());
    __m256d sim = _mm256_set1_pd(s.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d zv = _mm256_loadu_pd(zp + 2 * i);
        __m256d zsw = _mm256_permute_pd(zv, 0x5);
        _mm256_storeu_pd(zp + 2 * i, _mm256_fmaddsub_pd(zv, sre, _mm256_mul_pd(zsw, sim)));
    }
    for (; i < n; ++i) z[i] *= s;
}

__attribute__((target("avx2,fma"))) double sum_abs2_avx2(const cplx* z, std::size_t n) {
    const auto* zp = reinterpret_cast<const double*>(z);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d zv = _mm256_loadu_pd(zp + 2 * i);
        acc = _mm256_fmadd_pd(zv, zv, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3]));
    for (; i < n; ++i) s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
    return s;
}

__attribute__((target("avx2,fma"))) double sum_abs4_avx2(const cplx* z, std::size_t n) {
    const auto* zp = reinterpret_cast<const double*>(z);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d zv = _mm256_loadu_pd(zp + 2 * i);
        __m256d sq = _mm256_mul_pd(zv, zv);                      // [r0^2 i0^2 r1^2 i1^2]
        __m256d a2 = _mm256_hadd_pd(sq, sq);                     // [|z0|^2 |z0|^2 |z1|^2 |z1|^2]
        acc = _mm256_fmadd_pd(a2, a2, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = 0.5 * ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3]));
    for (; i < n; ++i) {
        double a2 = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
        s += a2 * a2;
    }
    return s;
}

__attribute__((target("avx2,fma"))) double sum_weighted_abs2_avx2(const double* w, const cplx* z,
                                                                  std::size_t n) {
    const auto* zp = reinterpret_cast<const double*>(z);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d zv = _mm256_loadu_pd(zp + 2 * i);
        __m128d wlo = _mm_loadu_pd(w + i);
        __m256d wv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(wlo), 0x50);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(zv, zv), wv, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double s = ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3]));
    for (; i < n; ++i)
        s += w[i] * (z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
    return s;
}

__attribute__((target("avx2,fma"))) double max_abs2_avx2(const cplx* z, std::size_t n) {
    const auto* zp = reinterpret_cast<const double*>(z);
    __m256d mx = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d zv = _mm256_loadu_pd(zp + 2 * i);
        __m256d sq = _mm256_mul_pd(zv, zv);
        mx = _mm256_max_pd(mx, _mm256_hadd_pd(sq, sq));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, mx);
    double m = lanes[0];
    if (lanes[1] > m) m = lanes[1];
    if (lanes[2] > m) m = lanes[2];
    if (lanes[3] > m) m = lanes[3];
    for (; i < n; ++i) {
        double a2 = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
        if (a2 > m) m = a2;
    }
    return m;
}

bool detect_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

#else
bool detect_avx2() { return false; }
#endif

const bool g_have_avx2 = detect_avx2();

inline bool use_simd() { return g_have_avx2 && !g_force_scalar.load(std::memory_order_relaxed); }

}  // namespace

void set_force_scalar(bool v) { g_force_scalar.store(v, std::memory_order_relaxed); }
bool avx2_available() { return g_have_avx2; }
const char* active_path() { return use_simd() ? "avx2" : "scalar"; }

void cmul_inplace(cplx* z, const cplx* w, std::size_t n) {
#ifdef NLS_HAVE_AVX2_TARGET
    if (use_simd()) return cmul_avx2(z, w, n);
#endif
    cmul_scalar(z, w, n);
}

void rmul_inplace(cplx* z, const double* w, std::size_t n) {
#ifdef NLS_HAVE_AVX2_TARGET
    if (use_simd()) return rmul_avx2(z, w, n);
#endif
    rmul_scalar(z, w, n);
}

void axpy(cplx a, const cplx* x, const cplx* y, cplx* out, std::size_t n) {
#ifdef NLS_HAVE_AVX2_TARGET
    if (use_simd()) return axpy_avx2(a, x, y, out, n);
#endif
    axpy_scalar(a, x, y, out, n);
}

void scale_inplace(cplx* z, cplx s, std::size_t n) {
#ifdef NLS_HAVE_AVX2_TARGET
    if (use_simd()) return scale_avx2(z, s, n);
#endif
    scale_scalar(z, s, n);
}

double sum_abs2(const cplx* z, std::size_t n) {
#ifdef NLS_HAVE_AVX2_TARGET
    if (use_simd()) return sum_abs2_avx2(z, n);
#endif
    return sum_abs2_scalar(z, n);
}

double sum_abs4(const cplx* z, std::size_t n) {
#ifdef NLS_HAVE_AVX2_TARGET
    if (use_simd()) return sum_abs4_avx2(z, n);
#endif
    return sum_abs4_scalar(z, n);
}

double sum_weighted_abs2(const double* w, const cplx* z, std::size_t n) {
#ifdef NLS_HAVE_AVX2_TARGET
    if (use_simd()) return sum_weighted_abs2_avx2(w, z, n);
#endif
    return sum_weighted_abs2_scalar(w, z, n);
}

double max_abs2(const cplx* z, std::size_t n) {
#ifdef NLS_HAVE_AVX2_TARGET
    if (use_simd()) return max_abs2_avx2(z, n);
#endif
    return max_abs2_scalar(z, n);
}

double sum_abs_pow(const cplx* z, std::size_t n, double p) {
    if (p == 2.0) return sum_abs2(z, n);
    if (p == 4.0) return sum_abs4(z, n);
    double s = 0.0;
    double hp = 0.5 * p;
    for (std::size_t i = 0; i < n; ++i) {
        double a2 = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
        if (a2 > 0.0) s += std::pow(a2, hp);
    }
    return s;
}

void phase_rotate_cubic(cplx* z, double dt, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double a2 = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
        double th = -dt * a2;
        z[i] *= cplx(std::cos(th), std::sin(th));
    }
}

}  // namespace nls::kernels
