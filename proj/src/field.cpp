#include "nls/field.hpp"

#include <cmath>

#include "nls/fft.hpp"
#include "nls/kernels.hpp"
#include "nls/rng.hpp"

namespace nls {

namespace {

double spectral_scale_forward(const GridSpec& g) {
    // L^{d/2} / n^d
    return std::pow(g.box, 0.5 * g.dim) / static_cast<double>(g.size());
}

double spectral_scale_backward(const GridSpec& g) { return std::pow(g.box, -0.5 * g.dim); }

}  // namespace

Field transform(const Field& field, Rep target) {
    if (field.rep() == target)
        throw structural_error("transform: field already in requested representation");
    Field out(field.grid(), target);
    bool forward = (target == Rep::spectral);
    fft::execute(field.grid(), field.data(), out.data(), forward);
    double s = forward ? spectral_scale_forward(field.grid()) : spectral_scale_backward(field.grid());
    kernels::scale_inplace(out.data(), cplx(s, 0.0), out.size());
    return out;
}

void transform_inplace(Field& field, Rep target) {
    if (field.rep() == target) return;
    field = transform(field, target);
}

Field as_spectral(const Field& field) {
    if (field.rep() == Rep::spectral) return field;
    return transform(field, Rep::spectral);
}

Field as_physical(const Field& field) {
    if (field.rep() == Rep::physical) return field;
    return transform(field, Rep::physical);
}

double l2_norm(const Field& field) {
    double s2 = kernels::sum_abs2(field.data(), field.size());
    if (field.rep() == Rep::physical) s2 *= field.grid().cell_volume();
    return std::sqrt(s2);
}

double sobolev_norm(const Field& field, double s, bool homogeneous) {
    Field spec = as_spectral(field);
    const GridSpec& g = spec.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        auto xi = g.freq(i);
        double xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        double w2;
        if (homogeneous) {
            if (xi2 == 0.0) continue;
            w2 = std::pow(xi2, s);
        } else {
            w2 = std::pow(1.0 + xi2, s);
        }
        acc += w2 * std::norm(spec[i]);
    }
    return std::sqrt(acc);
}

double lp_norm(const Field& field, double p) {
    Field phys = as_physical(field);
    double s = kernels::sum_abs_pow(phys.data(), phys.size(), p);
    return std::pow(phys.grid().cell_volume() * s, 1.0 / p);
}

double linf_norm(const Field& field) {
    Field phys = as_physical(field);
    return std::sqrt(kernels::max_abs2(phys.data(), phys.size()));
}

Field field_sub(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid())) throw structural_error("field_sub: grid mismatch");
    if (a.rep() != b.rep()) throw structural_error("field_sub: representation mismatch");
    Field out(a.grid(), a.rep());
    kernels::axpy(cplx(-1.0, 0.0), b.data(), a.data(), out.data(), a.size());
    return out;
}

Field make_zero(const GridSpec& grid, Rep rep) { return Field(grid, rep); }

Field make_constant(const GridSpec& grid, cplx value) {
    Field f(grid, Rep::physical);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = value;
    return f;
}

Field make_plane_wave(const GridSpec& grid, const std::array<int, 3>& mode) {
    Field f(grid, Rep::physical);
    double ku = grid.freq_unit();
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto idx = grid.unravel(i);
        double phase = 0.0;
        for (int a = 0; a < grid.dim; ++a) phase += mode[a] * ku * grid.coord_of(idx[a]);
        f[i] = cplx(std::cos(phase), std::sin(phase));
    }
    return f;
}

Field make_gaussian(const GridSpec& grid, double amplitude, double width,
                    const std::array<double, 3>& center) {
    Field f(grid, Rep::physical);
    double inv2w2 = 1.0 / (2.0 * width * width);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto idx = grid.unravel(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim; ++a) {
            double d = grid.coord_of(idx[a]) - center[a];
            r2 += d * d;
        }
        f[i] = cplx(amplitude * std::exp(-r2 * inv2w2), 0.0);
    }
    return f;
}

Field make_random_field(const GridSpec& grid, std::uint64_t seed, double decay, double amplitude) {
    Field f(grid, Rep::spectral);
    CounterRng rng(derive_stream(seed, 0x8f1d7ULL));
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto xi = grid.freq(i);
        double xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        double mag = amplitude * std::pow(1.0 + xi2, -0.5 * decay);
        f[i] = mag * rng.next_complex_gaussian();
    }
    return f;
}

}  // namespace nls
