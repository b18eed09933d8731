#include "nls/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nls/kernels.hpp"

namespace nls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Trapezoid weights for the checkpoint times.
std::vector<double> trapezoid_weights(const std::vector<double>& t) {
    std::vector<double> w(t.size(), 0.0);
    if (t.size() < 2) return w;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        double h = 0.5 * (t[i + 1] - t[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    return w;
}

// L^q_t of per-checkpoint values; q = inf is the max.
double time_norm(const std::vector<double>& values, const std::vector<double>& w, double q) {
    if (q == kInf) {
        double m = 0.0;
        for (double v : values) m = std::max(m, v);
        return m;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += w[i] * std::pow(values[i], q);
    return std::pow(acc, 1.0 / q);
}

// |xi|^2 table for kinetic sums.
weight_table laplace_weights(const GridSpec& g) {
    return radial_weight_table(g, [](double m) { return m * m; });
}

// Dealiased cubic product |w|^2 w of a spectral field: 2/3 mask on input and
// output, pointwise cube in physical space.
Field dealiased_cubic(const Field& spec_in) {
    const GridSpec& g = spec_in.grid();
    auto mask = dealias_mask(g);
    Field s = spec_in;
    kernels::rmul_inplace(s.data(), mask->data(), s.size());
    Field p = transform(s, Rep::physical);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] *= std::norm(p[i]);
    Field out = transform(p, Rep::spectral);
    kernels::rmul_inplace(out.data(), mask->data(), out.size());
    return out;
}

// Re sum a conj(b) over a shared representation (spectral sums equal physical
// integrals under the unitary normalization).
double re_inner(const Field& a, const Field& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return acc;
}

// Least squares slope of log(y) against log(x).
std::pair<double, double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = std::log(y[i]) - (intercept + slope * std::log(x[i]));
        rss += r * r;
    }
    return {slope, std::sqrt(rss / n)};
}

}  // namespace

ConservedSet conserved_set(const Field& u) {
    Field spec = as_spectral(u);
    Field phys = as_physical(u);
    const GridSpec& g = u.grid();

    ConservedSet c;
    c.mass = kernels::sum_abs2(spec.data(), spec.size());
    weight_table lap = laplace_weights(g);
    c.kinetic = 0.5 * kernels::sum_weighted_abs2(lap.data(), spec.data(), spec.size());
    c.potential = 0.25 * g.cell_volume() * kernels::sum_abs4(phys.data(), phys.size());
    c.energy = c.kinetic + c.potential;
    return c;
}

double modified_energy(const Field& v, const Field& f, const IOperatorSpec& spec) {
    if (!(v.grid() == f.grid())) throw structural_error("modified_energy: grid mismatch");
    const GridSpec& g = v.grid();
    auto m = i_weight_table(g, spec);

    Field iv = as_spectral(v);
    kernels::rmul_inplace(iv.data(), m->data(), iv.size());
    Field iff = as_spectral(f);
    kernels::rmul_inplace(iff.data(), m->data(), iff.size());

    weight_table lap = laplace_weights(g);
    double kinetic = 0.5 * kernels::sum_weighted_abs2(lap.data(), iv.data(), iv.size());

    Field sum(g, Rep::spectral);
    kernels::axpy(cplx(1.0, 0.0), iff.data(), iv.data(), sum.data(), iv.size());
    Field sump = transform(sum, Rep::physical);
    double potential = 0.25 * g.cell_volume() * kernels::sum_abs4(sump.data(), sump.size());
    return kinetic + potential;
}

CommutatorRecord commutator_H(const Field& u, const IOperatorSpec& spec) {
    spec.validate();
    Field us = as_spectral(u);
    const GridSpec& g = us.grid();
    auto m = i_weight_table(g, spec);

    // I applied to the cubic product of u
    Field n_u = dealiased_cubic(us);
    kernels::rmul_inplace(n_u.data(), m->data(), n_u.size());

    // cubic product of Iu
    Field iu = us;
    kernels::rmul_inplace(iu.data(), m->data(), iu.size());
    Field n_iu = dealiased_cubic(iu);

    CommutatorRecord rec;
    rec.H = field_sub(n_u, n_iu);
    rec.l2_norm = l2_norm(rec.H);
    rec.N = spec.N;
    rec.sigma = spec.sigma;
    return rec;
}

double modified_energy_flux(const Field& u, const Field& f, const IOperatorSpec& spec) {
    if (!(u.grid() == f.grid())) throw structural_error("modified_energy_flux: grid mismatch");
    const GridSpec& g = u.grid();
    auto m = i_weight_table(g, spec);
    weight_table lap = laplace_weights(g);

    Field us = as_spectral(u);
    Field fs = as_spectral(f);

    Field iu = us;
    kernels::rmul_inplace(iu.data(), m->data(), iu.size());
    Field iff = fs;
    kernels::rmul_inplace(iff.data(), m->data(), iff.size());
    Field iv = field_sub(iu, iff);

    CommutatorRecord H = commutator_H(us, spec);
    Field n_iu = dealiased_cubic(iu);

    // d_t(Iv) = i(Lap Iv - N(Iu) - H)
    Field dt_iv(g, Rep::spectral);
    for (std::size_t i = 0; i < dt_iv.size(); ++i)
        dt_iv[i] = cplx(0.0, 1.0) * (-lap[i] * iv[i] - n_iu[i] - H.H[i]);

    double term1 = -re_inner(dt_iv, H.H);

    // Re <i Lap(If), N(Iu)>
    double term2 = 0.0;
    for (std::size_t i = 0; i < iff.size(); ++i) {
        cplx a = cplx(0.0, 1.0) * (-lap[i] * iff[i]);
        term2 += a.real() * n_iu[i].real() + a.imag() * n_iu[i].imag();
    }
    return term1 + term2;
}

bool is_admissible_pair(const StrichartzPair& p, double tol) {
    if (p.q < 2.0 || p.r < 2.0) return false;
    double inv_q = (p.q == kInf) ? 0.0 : 1.0 / p.q;
    double s = 2.0 * inv_q + 3.0 * (1.0 / p.r - 0.5);
    return std::abs(s) <= tol;
}

std::vector<StrichartzPair> default_strichartz_pairs() {
    return {{kInf, 2.0}, {2.0, 6.0}, {10.0 / 3.0, 10.0 / 3.0}};
}

ZIBundle zI_bundle(const Trajectory& v_traj, const IOperatorSpec& spec,
                   std::span<const StrichartzPair> pairs) {
    if (v_traj.count() < 2) throw estimation_error("zI_bundle: need at least 2 checkpoints");
    for (const auto& p : pairs)
        if (!is_admissible_pair(p))
            throw config_error("zI_bundle: pair (q,r) is not Strichartz admissible");

    const GridSpec& g = v_traj.initial.grid();
    auto m = i_weight_table(g, spec);
    weight_table bm(g.size());  // <xi> m(xi)
    for (std::size_t i = 0; i < bm.size(); ++i) {
        auto xi = g.freq(i);
        double xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        bm[i] = std::sqrt(1.0 + xi2) * (*m)[i];
    }

    std::vector<std::vector<double>> space_norms(pairs.size());
    for (std::size_t c = 0; c < v_traj.count(); ++c) {
        Field h = v_traj.checkpoints[c];
        transform_inplace(h, Rep::spectral);
        kernels::rmul_inplace(h.data(), bm.data(), h.size());
        Field hp = transform(h, Rep::physical);
        for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
            double r = pairs[pi].r;
            space_norms[pi].push_back(r == kInf ? linf_norm(hp) : lp_norm(hp, r));
        }
    }

    auto w = trapezoid_weights(v_traj.times);
    ZIBundle out;
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        double val = time_norm(space_norms[pi], w, pairs[pi].q);
        std::string label = "L" + (pairs[pi].q == kInf ? std::string("inf") : std::to_string(pairs[pi].q)) +
                            "t_L" + std::to_string(pairs[pi].r) + "x";
        out.per_pair.emplace_back(label, val);
        out.value = std::max(out.value, val);
    }
    return out;
}

SpacetimeNormBundle f_norm_bundle(const Trajectory& f_traj, const IOperatorSpec& spec, double s,
                                  bool include_l10_3) {
    if (f_traj.count() < 2) throw estimation_error("f_norm_bundle: need at least 2 checkpoints");
    const GridSpec& g = f_traj.initial.grid();
    auto m = i_weight_table(g, spec);

    weight_table bessel_s(g.size()), bessel_im(g.size());
    for (std::size_t i = 0; i < bessel_s.size(); ++i) {
        auto xi = g.freq(i);
        double br = 1.0 + xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        bessel_s[i] = std::pow(br, 0.5 * s);
        bessel_im[i] = std::sqrt(br) * (*m)[i];
    }

    std::size_t nc = f_traj.count();
    std::vector<double> a10(nc), a4(nc), a5(nc), a12(nc), a103(nc);
    std::vector<double> b4(nc), b6(nc);
    std::vector<double> cinf(nc), c6(nc);

    for (std::size_t c = 0; c < nc; ++c) {
        Field fs = f_traj.checkpoints[c];
        transform_inplace(fs, Rep::spectral);

        Field a = fs;
        kernels::rmul_inplace(a.data(), bessel_s.data(), a.size());
        Field ap = transform(a, Rep::physical);
        a10[c] = lp_norm(ap, 10.0);
        a4[c] = lp_norm(ap, 4.0);
        a5[c] = lp_norm(ap, 5.0);
        a12[c] = lp_norm(ap, 12.0);
        if (include_l10_3) a103[c] = lp_norm(ap, 10.0 / 3.0);

        Field bp = transform(fs, Rep::physical);
        b4[c] = lp_norm(bp, 4.0);
        b6[c] = lp_norm(bp, 6.0);

        Field cfld = fs;
        kernels::rmul_inplace(cfld.data(), bessel_im.data(), cfld.size());
        Field cp = transform(cfld, Rep::physical);
        cinf[c] = linf_norm(cp);
        c6[c] = lp_norm(cp, 6.0);
    }

    auto w = trapezoid_weights(f_traj.times);
    SpacetimeNormBundle out;
    auto put = [&](const std::string& key, double val) { out.constituents[key] = val; };

    double f_l10 = time_norm(a10, w, 10.0);
    double f_l4 = time_norm(a4, w, 4.0);
    double f_l5 = time_norm(a5, w, 5.0);
    double f_l4l12 = time_norm(a12, w, 4.0);
    put("F.L10t_L10x", f_l10);
    put("F.L4t_L4x", f_l4);
    put("F.L5t_L5x", f_l5);
    put("F.L4t_L12x", f_l4l12);
    out.F = f_l10 + f_l4 + f_l5 + f_l4l12;
    if (include_l10_3) {
        double f_l103 = time_norm(a103, w, 10.0 / 3.0);
        put("F.L10/3t_L10/3x", f_l103);
        out.F += f_l103;
    }

    double fi_l4 = time_norm(b4, w, kInf);
    double fi_l6 = time_norm(b6, w, kInf);
    put("Finf.Linft_L4x", fi_l4);
    put("Finf.Linft_L6x", fi_l6);
    out.F_inf = fi_l4 + fi_l6;

    double f2_inf = time_norm(cinf, w, 2.0);
    double f2_6 = time_norm(c6, w, 2.0);
    put("F2.L2t_Linfx", f2_inf);
    put("F2.L2t_L6x", f2_6);
    out.F2 = f2_inf + f2_6;
    return out;
}

// ---- Morawetz functionals ----

namespace {

// Periodic kernel samples in convolution layout: index j holds the kernel at
// the wrapped displacement mode_of(j)*h, so the circular convolution matches
// the direct pairwise sum with centered periodic distances. The vector kernel
// x/|x| averages to zero over the origin cell; the scalar 1/|x| kernel uses
// the cell-average over a ball of the cell's volume.
void morawetz_kernels(const GridSpec& g, std::array<Field, 3>& vec_kernel, Field& scal_kernel) {
    double h = g.dx();
    double r0 = std::cbrt(3.0 * h * h * h / (4.0 * kPi));
    for (int a = 0; a < 3; ++a) vec_kernel[a] = Field(g, Rep::physical);
    scal_kernel = Field(g, Rep::physical);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto idx = g.unravel(i);
        double x[3], r2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            x[a] = g.mode_of(idx[a]) * h;
            r2 += x[a] * x[a];
        }
        double r = std::sqrt(r2);
        if (r == 0.0) {
            for (int a = 0; a < 3; ++a) vec_kernel[a][i] = 0.0;
            scal_kernel[i] = 1.5 / r0;  // ball average of 1/|x|
        } else {
            for (int a = 0; a < 3; ++a) vec_kernel[a][i] = x[a] / r;
            scal_kernel[i] = 1.0 / r;
        }
    }
}

// Periodic convolution (k * f)(x) = int k(x-y) f(y) dy via the spectral
// product under the unitary normalization.
Field convolve(const Field& kernel_phys, const Field& f_phys) {
    const GridSpec& g = kernel_phys.grid();
    Field ks = transform(kernel_phys, Rep::spectral);
    Field fs = transform(f_phys, Rep::spectral);
    kernels::cmul_inplace(ks.data(), fs.data(), ks.size());
    Field out = transform(ks, Rep::physical);
    double scale = std::pow(g.box, 0.5 * g.dim);
    kernels::scale_inplace(out.data(), cplx(scale, 0.0), out.size());
    return out;
}

}  // namespace

MorawetzRecord morawetz_record(const Field& u, const IOperatorSpec& spec) {
    const GridSpec& g = u.grid();
    if (g.dim != 3)
        throw config_error("morawetz_record: weights are specific to d=3");
    auto m = i_weight_table(g, spec);

    Field ius = as_spectral(u);
    kernels::rmul_inplace(ius.data(), m->data(), ius.size());
    Field iup = transform(ius, Rep::physical);

    // current J_a = Im(conj(Iu) d_a Iu) and density rho = |Iu|^2
    std::array<Field, 3> grad;
    for (int a = 0; a < 3; ++a) grad[a] = transform(spectral_derivative(ius, a), Rep::physical);
    std::array<Field, 3> current;
    Field rho(g, Rep::physical), quart(g, Rep::physical);
    for (int a = 0; a < 3; ++a) current[a] = Field(g, Rep::physical);
    for (std::size_t i = 0; i < g.size(); ++i) {
        cplx z = iup[i];
        double a2 = std::norm(z);
        rho[i] = a2;
        quart[i] = a2 * a2;
        for (int a = 0; a < 3; ++a)
            current[a][i] = std::imag(std::conj(z) * grad[a][i]);
    }

    std::array<Field, 3> kvec;
    Field kscal;
    morawetz_kernels(g, kvec, kscal);

    MorawetzRecord rec;
    rec.regularization = "vector kernel 0 at origin cell; scalar kernel ball-average 3/(2 r0)";
    double cv = g.cell_volume();

    double action = 0.0;
    for (int a = 0; a < 3; ++a)
        for (std::size_t i = 0; i < g.size(); ++i)
            action += kvec[a][i].real() * current[a][i].real();
    rec.action_origin = 2.0 * cv * action;

    double interaction = 0.0;
    for (int a = 0; a < 3; ++a) {
        Field conv = convolve(kvec[a], rho);
        for (std::size_t i = 0; i < g.size(); ++i)
            interaction += conv[i].real() * current[a][i].real();
    }
    rec.interaction = 2.0 * cv * interaction;

    double q = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) q += quart[i].real();
    rec.quartic_density = cv * q;

    Field conv_scal = convolve(kscal, rho);
    double qi = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) qi += conv_scal[i].real() * quart[i].real();
    rec.quartic_interaction = cv * qi;
    return rec;
}

MorawetzCheck interaction_morawetz_check(const Trajectory& u_traj, const IOperatorSpec& spec) {
    if (u_traj.count() < 2)
        throw estimation_error("interaction_morawetz_check: need at least 2 checkpoints");
    const GridSpec& g = u_traj.initial.grid();
    auto m = i_weight_table(g, spec);

    std::size_t nc = u_traj.count();
    std::vector<double> quartic(nc), l2(nc), hhalf(nc);
    double zero_mode = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
        Field iu = u_traj.checkpoints[c];
        transform_inplace(iu, Rep::spectral);
        zero_mode = std::max(zero_mode, std::norm(iu[0]));
        kernels::rmul_inplace(iu.data(), m->data(), iu.size());
        l2[c] = l2_norm(iu);
        hhalf[c] = sobolev_norm(iu, 0.5, /*homogeneous=*/true);
        Field iup = transform(iu, Rep::physical);
        quartic[c] = g.cell_volume() * kernels::sum_abs4(iup.data(), iup.size());
    }
    auto w = trapezoid_weights(u_traj.times);
    MorawetzCheck chk;
    for (std::size_t c = 0; c < nc; ++c) chk.lhs += w[c] * quartic[c];
    double l2max = *std::max_element(l2.begin(), l2.end());
    double hmax = *std::max_element(hhalf.begin(), hhalf.end());
    chk.rhs_core = l2max * l2max * hmax * hmax;
    chk.ratio = chk.rhs_core > 0.0 ? chk.lhs / chk.rhs_core
                                   : (chk.lhs > 0.0 ? kInf : 0.0);
    chk.zero_mode_mass = zero_mode;
    return chk;
}

IncrementReport energy_increment_series(const Trajectory& u_traj, const Field& f0_omega,
                                        std::span<const IOperatorSpec> specs) {
    if (u_traj.count() < 2)
        throw estimation_error("energy_increment_series: need at least 2 checkpoints");
    Field f0 = as_spectral(f0_omega);

    IncrementReport rep;
    for (const auto& spec : specs) {
        IncrementSeries series;
        series.N = spec.N;
        Field zero_v = make_zero(f0.grid(), Rep::spectral);
        double prev = 0.0;
        for (std::size_t c = 0; c < u_traj.count(); ++c) {
            Field f_t = linear_propagate(f0, u_traj.times[c]);
            Field v_t = field_sub(u_traj.checkpoints[c], f_t);
            // Excess over the pure-forcing baseline E(0, f(t)) = (1/4) int
            // |If|^4: the baseline varies along the free flow on its own, and
            // the increments must vanish identically when v = 0.
            double e = modified_energy(v_t, f_t, spec) - modified_energy(zero_v, f_t, spec);
            if (c > 0) series.increments.push_back(std::abs(e - prev));
            prev = e;
        }
        for (double inc : series.increments) series.total_variation += inc;
        rep.per_N.push_back(std::move(series));
    }

    if (rep.per_N.size() >= 2) {
        std::vector<double> xs, ys;
        for (const auto& s : rep.per_N) {
            if (s.total_variation > 0.0) {
                xs.push_back(s.N);
                ys.push_back(s.total_variation);
            }
        }
        if (xs.size() >= 2) {
            auto [slope, resid] = loglog_slope(xs, ys);
            rep.alpha = slope;
            rep.alpha_residual = resid;
        }
    }
    return rep;
}

double bilinear_strichartz_ratio(const Field& u0, double K, double M, double T,
                                 int n_time_samples) {
    if (n_time_samples < 2) throw config_error("bilinear_strichartz_ratio: need >= 2 time samples");
    Field a = apply_multiplier(as_spectral(u0), make_lp_projector(K));
    Field b = apply_multiplier(as_spectral(u0), make_lp_projector(M));
    double na = l2_norm(a), nb = l2_norm(b);
    if (na <= 0.0 || nb <= 0.0)
        throw estimation_error("bilinear_strichartz_ratio: empty dyadic shell");

    const GridSpec& g = u0.grid();
    std::vector<double> times(n_time_samples), vals(n_time_samples);
    for (int i = 0; i < n_time_samples; ++i) times[i] = T * i / (n_time_samples - 1);
    for (int i = 0; i < n_time_samples; ++i) {
        Field at = transform(linear_propagate(a, times[i]), Rep::physical);
        Field bt = transform(linear_propagate(b, times[i]), Rep::physical);
        double s = 0.0;
        for (std::size_t j = 0; j < at.size(); ++j) s += std::norm(at[j] * bt[j]);
        vals[i] = g.cell_volume() * s;  // ||a_t b_t||_{L^2_x}^2
    }
    auto w = trapezoid_weights(times);
    double acc = 0.0;
    for (int i = 0; i < n_time_samples; ++i) acc += w[i] * vals[i];
    return std::sqrt(acc) / (na * nb);
}

ScatteringVerdict scattering_detect(const Trajectory& u_traj, double sigma, double tol, int window) {
    if (window < 1) throw config_error("scattering_detect: window must be >= 1");
    if (u_traj.count() < static_cast<std::size_t>(window) + 1)
        throw config_error("scattering_detect: window larger than trajectory");

    std::vector<Field> w_states;
    w_states.reserve(u_traj.count());
    for (std::size_t c = 0; c < u_traj.count(); ++c)
        w_states.push_back(linear_propagate(u_traj.checkpoints[c], -u_traj.times[c]));

    ScatteringVerdict verdict;
    for (std::size_t c = 0; c + 1 < w_states.size(); ++c)
        verdict.cauchy_tail.push_back(sobolev_norm(field_sub(w_states[c + 1], w_states[c]), sigma));

    std::size_t nt = verdict.cauchy_tail.size();
    bool ok = true;
    double floor = 1e-3 * tol;  // entries at the roundoff floor don't break monotonicity
    for (std::size_t i = nt - window; i < nt; ++i) {
        double d = verdict.cauchy_tail[i];
        if (!(d < tol)) ok = false;
        if (i > nt - window && d > floor && d > 1.1 * verdict.cauchy_tail[i - 1]) ok = false;
    }
    verdict.scattered = ok;
    verdict.final_state = w_states.back();
    return verdict;
}

ThetaReport theta_monitor(const Trajectory& u_traj, const Field& f0_omega,
                          const IOperatorSpec& spec, double M_cap, double e_unit) {
    spec.validate();
    const GridSpec& g = u_traj.initial.grid();
    auto m = i_weight_table(g, spec);
    Field f0 = as_spectral(f0_omega);

    ThetaReport rep;
    rep.energy_budget = std::pow(spec.N, 2.0 * (1.0 - spec.sigma)) * e_unit;
    rep.l4_budget = M_cap * std::pow(spec.N, 1.0 - spec.sigma);
    rep.times = u_traj.times;

    std::size_t nc = u_traj.count();
    std::vector<double> quartic(nc);
    double sup_e = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
        Field f_t = linear_propagate(f0, u_traj.times[c]);
        Field v_t = field_sub(u_traj.checkpoints[c], f_t);
        double e = modified_energy(v_t, f_t, spec);
        sup_e = std::max(sup_e, e);
        rep.energy_sup.push_back(sup_e);

        Field iv = v_t;
        kernels::rmul_inplace(iv.data(), m->data(), iv.size());
        Field ivp = transform(iv, Rep::physical);
        quartic[c] = g.cell_volume() * kernels::sum_abs4(ivp.data(), ivp.size());
    }
    // cumulative trapezoid of int |Iv|^4 dx
    rep.l4_accum.assign(nc, 0.0);
    for (std::size_t c = 1; c < nc; ++c)
        rep.l4_accum[c] = rep.l4_accum[c - 1] +
                          0.5 * (u_traj.times[c] - u_traj.times[c - 1]) * (quartic[c] + quartic[c - 1]);

    rep.T = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
        if (rep.energy_sup[c] <= rep.energy_budget && rep.l4_accum[c] <= rep.l4_budget)
            rep.T = u_traj.times[c];
        else
            break;
    }
    return rep;
}

}  // namespace nls
