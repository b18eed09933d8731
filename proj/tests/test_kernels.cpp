// Scalar/SIMD kernel equivalence and algebraic identities.
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nls/kernels.hpp"
#include "nls/rng.hpp"

using namespace nls;
using kernels::cplx;

namespace {

std::vector<cplx> random_array(std::uint64_t seed, std::size_t n) {
    CounterRng rng(seed);
    std::vector<cplx> v(n);
    for (auto& z : v) z = rng.next_complex_gaussian();
    return v;
}

std::vector<double> random_reals(std::uint64_t seed, std::size_t n) {
    CounterRng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = 2.0 * rng.next_uniform() - 1.0;
    return v;
}

struct ForceScalarGuard {
    explicit ForceScalarGuard(bool v) { kernels::set_force_scalar(v); }
    ~ForceScalarGuard() { kernels::set_force_scalar(false); }
};

}  // namespace

TEST_CASE("simd and scalar paths agree") {
    // odd length exercises the vector tail
    for (std::size_t n : {1u, 7u, 64u, 1001u}) {
        auto z0 = random_array(n, n);
        auto w = random_array(n + 1, n);
        auto r = random_reals(n + 2, n);

        auto z_simd = z0;
        kernels::cmul_inplace(z_simd.data(), w.data(), n);
        double s2_simd = kernels::sum_abs2(z0.data(), n);
        double s4_simd = kernels::sum_abs4(z0.data(), n);
        double sw_simd = kernels::sum_weighted_abs2(r.data(), z0.data(), n);
        double mx_simd = kernels::max_abs2(z0.data(), n);
        std::vector<cplx> ax_simd(n);
        kernels::axpy(cplx(0.3, -1.2), z0.data(), w.data(), ax_simd.data(), n);
        auto rm_simd = z0;
        kernels::rmul_inplace(rm_simd.data(), r.data(), n);

        ForceScalarGuard guard(true);
        REQUIRE(std::string(kernels::active_path()) == "scalar");
        auto z_sc = z0;
        kernels::cmul_inplace(z_sc.data(), w.data(), n);
        double s2_sc = kernels::sum_abs2(z0.data(), n);
        double s4_sc = kernels::sum_abs4(z0.data(), n);
        double sw_sc = kernels::sum_weighted_abs2(r.data(), z0.data(), n);
        double mx_sc = kernels::max_abs2(z0.data(), n);
        std::vector<cplx> ax_sc(n);
        kernels::axpy(cplx(0.3, -1.2), z0.data(), w.data(), ax_sc.data(), n);
        auto rm_sc = z0;
        kernels::rmul_inplace(rm_sc.data(), r.data(), n);

        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(z_simd[i] - z_sc[i]) <= 1e-14 * (1.0 + std::abs(z_sc[i])));
            CHECK(std::abs(ax_simd[i] - ax_sc[i]) <= 1e-14 * (1.0 + std::abs(ax_sc[i])));
            CHECK(std::abs(rm_simd[i] - rm_sc[i]) <= 1e-14 * (1.0 + std::abs(rm_sc[i])));
        }
        CHECK(std::abs(s2_simd - s2_sc) <= 1e-12 * s2_sc);
        CHECK(std::abs(s4_simd - s4_sc) <= 1e-12 * std::abs(s4_sc));
        CHECK(std::abs(sw_simd - sw_sc) <= 1e-12 * (std::abs(sw_sc) + 1.0));
        CHECK(mx_simd == doctest::Approx(mx_sc).epsilon(1e-14));
    }
}

TEST_CASE("phase rotation preserves modulus exactly") {
    auto z0 = random_array(5, 4096);
    auto z = z0;
    kernels::phase_rotate_cubic(z.data(), 0.73, z.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i)
        worst = std::max(worst, std::abs(std::abs(z[i]) - std::abs(z0[i])));
    CHECK(worst <= 1e-14);
}

TEST_CASE("sum_abs_pow matches even-power specializations") {
    auto z = random_array(9, 257);
    CHECK(kernels::sum_abs_pow(z.data(), z.size(), 2.0) ==
          doctest::Approx(kernels::sum_abs2(z.data(), z.size())).epsilon(1e-13));
    CHECK(kernels::sum_abs_pow(z.data(), z.size(), 4.0) ==
          doctest::Approx(kernels::sum_abs4(z.data(), z.size())).epsilon(1e-13));
    // p=6 against a direct loop
    double direct = 0.0;
    for (const auto& v : z) direct += std::pow(std::abs(v), 6.0);
    CHECK(kernels::sum_abs_pow(z.data(), z.size(), 6.0) ==
          doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("rng reproducibility and stream independence") {
    CounterRng a(derive_stream(42, 1)), b(derive_stream(42, 1)), c(derive_stream(42, 2));
    bool same = true, differ = false;
    for (int i = 0; i < 100; ++i) {
        auto x = a.next_u64(), y = b.next_u64(), z = c.next_u64();
        same = same && (x == y);
        differ = differ || (x != z);
    }
    CHECK(same);
    CHECK(differ);
}

TEST_CASE("complex gaussian has unit second moment") {
    CounterRng rng(derive_stream(7, 0));
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) acc += std::norm(rng.next_complex_gaussian());
    CHECK(acc / n == doctest::Approx(1.0).epsilon(0.01));
}
