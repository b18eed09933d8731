#include "nls/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "nls/kernels.hpp"
#include "nls/rng.hpp"

namespace nls {

namespace {

// Integer cube indices whose window covers frequency component t: at most the
// two integers in (t-1, t+1) carry nonzero weight.
inline void covering_cubes(double t, int out[2]) {
    int k0 = static_cast<int>(std::floor(t));
    out[0] = k0;
    out[1] = k0 + 1;
}

cplx cube_gaussian(std::uint64_t seed, int kx, int ky, int kz) {
    CounterRng rng(derive_stream(seed, lattice_label(kx, ky, kz)));
    return rng.next_complex_gaussian();
}

}  // namespace

Field synthesize_profile(const RadialProfile& profile) {
    profile.validate();
    const GridSpec& g = profile.grid;
    Field f(g, Rep::spectral);
    double expo = profile.s_target + 0.5 * g.dim + profile.decay_margin;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto xi = g.freq(i);
        double xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        f[i] = cplx(profile.amplitude * std::pow(1.0 + xi2, -0.5 * expo), 0.0);
    }
    return f;
}

RandomDraw randomize(const Field& f0, std::uint64_t seed) {
    Field spec = as_spectral(f0);
    const GridSpec& g = spec.grid();

    RandomDraw draw;
    draw.seed = seed;
    draw.field = Field(g, Rep::spectral);

    int cand[3][2] = {{0, 0}, {0, 0}, {0, 0}};
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (spec[i] == cplx(0.0, 0.0)) continue;
        auto xi = g.freq(i);
        for (int a = 0; a < g.dim; ++a) covering_cubes(xi[a], cand[a]);
        int nb = g.dim > 1 ? 2 : 1;
        int nc = g.dim > 2 ? 2 : 1;
        cplx w(0.0, 0.0);
        for (int ia = 0; ia < 2; ++ia) {
            double wa = wiener_window(xi[0] - cand[0][ia]);
            if (wa == 0.0) continue;
            for (int ib = 0; ib < nb; ++ib) {
                double wb = g.dim > 1 ? wiener_window(xi[1] - cand[1][ib]) : 1.0;
                if (wb == 0.0) continue;
                for (int ic = 0; ic < nc; ++ic) {
                    double wc = g.dim > 2 ? wiener_window(xi[2] - cand[2][ic]) : 1.0;
                    if (wc == 0.0) continue;
                    int kx = cand[0][ia];
                    int ky = g.dim > 1 ? cand[1][ib] : 0;
                    int kz = g.dim > 2 ? cand[2][ic] : 0;
                    std::uint64_t label = lattice_label(kx, ky, kz);
                    auto it = draw.gaussians.find(label);
                    if (it == draw.gaussians.end())
                        it = draw.gaussians.emplace(label, cube_gaussian(seed, kx, ky, kz)).first;
                    w += it->second * (wa * wb * wc);
                }
            }
        }
        draw.field[i] = w * spec[i];
    }
    return draw;
}

double wiener_block_sum_sq(const Field& f0, double s) {
    Field spec = as_spectral(f0);
    const GridSpec& g = spec.grid();
    double acc = 0.0;
    int cand[3][2] = {{0, 0}, {0, 0}, {0, 0}};
    for (std::size_t i = 0; i < spec.size(); ++i) {
        double a2 = std::norm(spec[i]);
        if (a2 == 0.0) continue;
        auto xi = g.freq(i);
        double xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        for (int a = 0; a < g.dim; ++a) covering_cubes(xi[a], cand[a]);
        int nb = g.dim > 1 ? 2 : 1;
        int nc = g.dim > 2 ? 2 : 1;
        double sum_sq = 0.0;
        for (int ia = 0; ia < 2; ++ia) {
            double wa = wiener_window(xi[0] - cand[0][ia]);
            if (wa == 0.0) continue;
            for (int ib = 0; ib < nb; ++ib) {
                double wb = g.dim > 1 ? wiener_window(xi[1] - cand[1][ib]) : 1.0;
                if (wb == 0.0) continue;
                for (int ic = 0; ic < nc; ++ic) {
                    double wc = g.dim > 2 ? wiener_window(xi[2] - cand[2][ic]) : 1.0;
                    double w = wa * wb * wc;
                    sum_sq += w * w;
                }
            }
        }
        acc += std::pow(1.0 + xi2, s) * a2 * sum_sq;
    }
    return acc;
}

double khinchin_ratio(std::span<const cplx> coeffs, double p, int n_samples, std::uint64_t seed) {
    if (n_samples < 100)
        throw config_error("khinchin_ratio: need at least 100 samples for a meaningful estimate");
    if (p < 2.0) throw config_error("khinchin_ratio: p must be >= 2");
    double c2 = 0.0;
    for (const auto& c : coeffs) c2 += std::norm(c);
    if (!(c2 > 0.0)) throw config_error("khinchin_ratio: coefficients must not be all zero");

    double acc = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        CounterRng rng(derive_stream(seed, static_cast<std::uint64_t>(s)));
        cplx sum(0.0, 0.0);
        for (const auto& c : coeffs) sum += c * rng.next_complex_gaussian();
        acc += std::pow(std::norm(sum), 0.5 * p);
    }
    double moment = std::pow(acc / n_samples, 1.0 / p);
    return moment / (std::sqrt(p) * std::sqrt(c2));
}

TailFit tail_fit(std::span<const double> samples, std::span<const double> lambda_grid) {
    if (samples.size() < 500) throw estimation_error("tail_fit: need at least 500 samples");
    auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    if (!(*mx > *mn)) throw estimation_error("tail_fit: degenerate (constant) sample set");

    std::vector<double> xs, ys;  // x = lambda^2, y = log empirical tail
    for (double lam : lambda_grid) {
        std::size_t count = 0;
        for (double s : samples)
            if (s > lam) ++count;
        if (count == 0) continue;  // empty tail: lambda dropped from the fit
        xs.push_back(lam * lam);
        ys.push_back(std::log(static_cast<double>(count) / samples.size()));
    }
    if (xs.size() < 3)
        throw estimation_error("tail_fit: fewer than 3 usable lambda values");

    double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw estimation_error("tail_fit: degenerate lambda grid");
    TailFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.used_lambdas = static_cast<int>(xs.size());
    double intercept = (sy - fit.slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (intercept + fit.slope * xs[i]);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

double radial_deviation(const Field& f0) {
    Field spec = as_spectral(f0);
    const GridSpec& g = spec.grid();
    // Exact shells: coefficients grouped by the integer |m|^2.
    std::map<long, std::pair<cplx, std::size_t>> shells;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        auto idx = g.unravel(i);
        long m2 = 0;
        for (int a = 0; a < g.dim; ++a) {
            long m = g.mode_of(idx[a]);
            m2 += m * m;
        }
        auto& acc = shells[m2];
        acc.first += spec[i];
        acc.second += 1;
    }
    double dev = 0.0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        auto idx = g.unravel(i);
        long m2 = 0;
        for (int a = 0; a < g.dim; ++a) {
            long m = g.mode_of(idx[a]);
            m2 += m * m;
        }
        const auto& acc = shells[m2];
        cplx mean = acc.first / static_cast<double>(acc.second);
        dev = std::max(dev, std::abs(spec[i] - mean));
    }
    return dev;
}

Field translate_field(const Field& f, const std::array<double, 3>& shift) {
    Field spec = as_spectral(f);
    const GridSpec& g = spec.grid();
    for (std::size_t i = 0; i < spec.size(); ++i) {
        auto xi = g.freq(i);
        double ph = 0.0;
        for (int a = 0; a < g.dim; ++a) ph -= xi[a] * shift[a];
        spec[i] *= cplx(std::cos(ph), std::sin(ph));
    }
    if (f.rep() == Rep::physical) return transform(spec, Rep::physical);
    return spec;
}

namespace {

// max over lattice x of <x> sqrt(sum_k |Q_k f(x)|^2), evaluated through the
// frequency-offset expansion
//   G = L^{-d/2} * T^{-1}[ C ],
//   C(delta) = sum_xi fhat(xi) conj(fhat(xi - delta)) prod_a a(xi_a, delta_a)
// where a is the per-axis window overlap, supported on |delta_a| < 2. The
// direct per-cube evaluation is kept in the tests as the oracle.
double embedding_lhs(const Field& spec) {
    const GridSpec& g = spec.grid();
    if (g.dim == 2) throw config_error("radial_embedding: d=2 grids are not supported");
    if (kernels::sum_abs2(spec.data(), spec.size()) == 0.0) return 0.0;

    double fu = g.freq_unit();
    int D = static_cast<int>(std::ceil(2.0 / fu));
    int n = g.n;
    int W = 2 * D + 1;

    // Per-axis overlap weights a(m, d) = sum_k psi(m*fu - k) psi((m-d)*fu - k)
    // and shifted storage indices (-1 when the shift leaves the lattice).
    std::vector<double> atab(static_cast<std::size_t>(n) * W, 0.0);
    std::vector<int> stab(static_cast<std::size_t>(n) * W, -1);
    for (int mi = 0; mi < n; ++mi) {
        double s = g.mode_of(mi) * fu;
        int cand[2];
        covering_cubes(s, cand);
        for (int d = -D; d <= D; ++d) {
            int m = g.mode_of(mi) - d;
            if (m < -n / 2 || m >= n / 2) continue;
            stab[static_cast<std::size_t>(mi) * W + (d + D)] = m < 0 ? m + n : m;
            double t = s - d * fu;
            if (std::abs(s - t) >= 2.0) continue;
            double a = 0.0;
            for (int k : cand) a += wiener_window(s - k) * wiener_window(t - k);
            atab[static_cast<std::size_t>(mi) * W + (d + D)] = a;
        }
    }

    int dims[3] = {n, g.dim > 1 ? n : 1, g.dim > 2 ? n : 1};
    std::vector<cplx> corr(static_cast<std::size_t>(W) * W * W, cplx(0.0, 0.0));

    // xi-outer accumulation: every lattice point scatters into its (2D+1)^d
    // offset neighborhood.
    std::size_t i = 0;
    for (int ix = 0; ix < dims[0]; ++ix) {
        const double* ax = &atab[static_cast<std::size_t>(ix) * W];
        const int* sx = &stab[static_cast<std::size_t>(ix) * W];
        for (int iy = 0; iy < dims[1]; ++iy) {
            const double* ay = g.dim > 1 ? &atab[static_cast<std::size_t>(iy) * W] : nullptr;
            const int* sy = g.dim > 1 ? &stab[static_cast<std::size_t>(iy) * W] : nullptr;
            for (int iz = 0; iz < dims[2]; ++iz, ++i) {
                cplx f = spec[i];
                if (f == cplx(0.0, 0.0)) continue;
                const double* az = g.dim > 2 ? &atab[static_cast<std::size_t>(iz) * W] : nullptr;
                const int* sz = g.dim > 2 ? &stab[static_cast<std::size_t>(iz) * W] : nullptr;
                for (int dx = 0; dx < W; ++dx) {
                    double wx = ax[dx];
                    int jx = sx[dx];
                    if (wx == 0.0 || jx < 0) continue;
                    if (g.dim == 1) {
                        corr[dx] += f * std::conj(spec[jx]) * wx;
                        continue;
                    }
                    for (int dy = 0; dy < W; ++dy) {
                        double wy = wx * ay[dy];
                        int jy = sy[dy];
                        if (wy == 0.0 || jy < 0) continue;
                        std::size_t base_xy = (static_cast<std::size_t>(jx) * n + jy);
                        std::size_t cbase = (static_cast<std::size_t>(dx) * W + dy) * W;
                        const cplx* srow = &spec[base_xy * n];
                        cplx* crow = &corr[cbase];
                        for (int dz = 0; dz < W; ++dz) {
                            double wz = wy * az[dz];
                            int jz = sz[dz];
                            if (wz == 0.0 || jz < 0) continue;
                            crow[dz] += f * std::conj(srow[jz]) * wz;
                        }
                    }
                }
            }
        }
    }

    // Deposit the offset spectrum on the grid and transform.
    Field cfield(g, Rep::spectral);
    auto wrap = [&](int d) { return d < 0 ? d + n : d; };
    for (int dx = -D; dx <= D; ++dx)
        for (int dy = -(g.dim > 1 ? D : 0); dy <= (g.dim > 1 ? D : 0); ++dy)
            for (int dz = -(g.dim > 2 ? D : 0); dz <= (g.dim > 2 ? D : 0); ++dz) {
                cplx c = corr[(static_cast<std::size_t>(dx + D) * W + (g.dim > 1 ? dy + D : 0)) * W +
                              (g.dim > 2 ? dz + D : 0)];
                if (c == cplx(0.0, 0.0)) continue;
                std::size_t j = 0;
                if (g.dim == 1) j = static_cast<std::size_t>(wrap(dx));
                else if (g.dim == 2) j = static_cast<std::size_t>(wrap(dx)) * n + wrap(dy);
                else j = (static_cast<std::size_t>(wrap(dx)) * n + wrap(dy)) * n + wrap(dz);
                cfield[j] = c;
            }

    Field gx = transform(cfield, Rep::physical);
    double volfac = std::pow(g.box, -0.5 * g.dim);
    double best = 0.0;
    for (std::size_t j = 0; j < gx.size(); ++j) {
        double val = gx[j].real() * volfac;
        if (val < 0.0) val = 0.0;
        auto idx = g.unravel(j);
        double x2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            double x = g.coord_of(idx[a]);
            x2 += x * x;
        }
        best = std::max(best, std::sqrt(1.0 + x2) * std::sqrt(val));
    }
    return best;
}

}  // namespace

EmbeddingSweep radial_embedding_sweep(const Field& f0, std::span<const double> deltas) {
    for (double d : deltas)
        if (!(d > 0.0)) throw config_error("radial_embedding: delta must be positive");
    Field spec = as_spectral(f0);
    EmbeddingSweep res;
    res.input_radial = radial_deviation(spec) <= 1e-10 * (l2_norm(spec) + 1e-300);
    res.lhs = embedding_lhs(spec);
    for (double d : deltas) res.rhs.push_back(sobolev_norm(spec, d));
    return res;
}

EmbeddingResult radial_embedding_functional(const Field& f0, double delta) {
    std::array<double, 1> ds{delta};
    EmbeddingSweep sweep = radial_embedding_sweep(f0, ds);
    return {sweep.lhs, sweep.rhs[0], sweep.input_radial};
}

}  // namespace nls
