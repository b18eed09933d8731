// Counter-based, splittable random number generation.
//
// Every random quantity in the project is a pure function of
// (base seed, stream label, counter), so ensembles are reproducible
// independent of scheduling and iteration order.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace nls {

// SplitMix64 finalizer. Good avalanche, cheap, stateless.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive an independent stream key from a parent key and a label/index.
constexpr std::uint64_t derive_stream(std::uint64_t key, std::uint64_t label) {
    return mix64(key ^ mix64(label + 0x632be59bd9b4e019ULL));
}

// Counter-mode generator: output i is mix64(key + i*odd). No hidden state
// beyond the counter, so streams can be split and replayed at will.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(key_ + (++ctr_) * 0xdf900294d8f554a5ULL); }

    // Uniform in [0,1), 53-bit mantissa.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal pair via Box-Muller.
    void next_normal_pair(double& a, double& b) {
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 < 1 always
        a = r * std::cos(2.0 * pi_ * u2);
        b = r * std::sin(2.0 * pi_ * u2);
    }

    // Complex Gaussian g = (a + ib)/sqrt(2) with E|g|^2 = 1.
    std::complex<double> next_complex_gaussian() {
        double a, b;
        next_normal_pair(a, b);
        return {a * inv_sqrt2_, b * inv_sqrt2_};
    }

  private:
    static constexpr double pi_ = 3.14159265358979323846;
    static constexpr double inv_sqrt2_ = 0.70710678118654752440;
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

// Pack a small integer lattice vector into a stream label. Components must
// fit in 21 signed bits, plenty for any frequency cube index we use.
constexpr std::uint64_t lattice_label(int kx, int ky, int kz) {
    auto enc = [](int v) { return static_cast<std::uint64_t>(static_cast<std::uint32_t>(v) & 0x1fffffu); };
    return enc(kx) | (enc(ky) << 21) | (enc(kz) << 42);
}

}  // namespace nls
