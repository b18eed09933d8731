#include "nls/multiplier.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "nls/kernels.hpp"

namespace nls {

namespace {

double smooth_transition(double x) {
    // C^inf step: 0 for x<=0, 1 for x>=1.
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double a = std::exp(-1.0 / x);
    double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

double xi_mag(const std::array<double, 3>& xi) {
    return std::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
}

}  // namespace

double i_symbol(double mag, const IOperatorSpec& spec) {
    spec.validate();
    if (mag <= spec.N) return 1.0;
    double tail = std::pow(spec.N / mag, 1.0 - spec.sigma);
    if (spec.transition == IOperatorSpec::Transition::power_law) return tail;
    if (mag >= 2.0 * spec.N) return tail;
    double t = (mag - spec.N) / spec.N;
    double w = 0.5 * (1.0 - std::cos(kPi * t));
    return 1.0 + w * (tail - 1.0);
}

MultiplierSymbol make_i_symbol(const IOperatorSpec& spec) {
    spec.validate();
    return {[spec](const std::array<double, 3>& xi) { return cplx(i_symbol(xi_mag(xi), spec), 0.0); },
            "I(N=" + std::to_string(spec.N) + ",sigma=" + std::to_string(spec.sigma) + ")"};
}

MultiplierSymbol make_free_propagator_symbol(double t) {
    return {[t](const std::array<double, 3>& xi) {
                double xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                double ph = -t * xi2;
                return cplx(std::cos(ph), std::sin(ph));
            },
            "exp(-it|xi|^2), t=" + std::to_string(t)};
}

MultiplierSymbol make_bessel_symbol(double s) {
    return {[s](const std::array<double, 3>& xi) {
                double xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                return cplx(std::pow(1.0 + xi2, 0.5 * s), 0.0);
            },
            "<xi>^" + std::to_string(s)};
}

MultiplierSymbol make_riesz_symbol(double s) {
    return {[s](const std::array<double, 3>& xi) {
                double xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
                if (xi2 == 0.0) return cplx(0.0, 0.0);
                return cplx(std::pow(xi2, 0.5 * s), 0.0);
            },
            "|xi|^" + std::to_string(s)};
}

MultiplierSymbol make_lp_projector(double K) {
    return {[K](const std::array<double, 3>& xi) {
                double m = xi_mag(xi);
                return cplx((m > 0.5 * K && m <= K) ? 1.0 : 0.0, 0.0);
            },
            "P_" + std::to_string(K)};
}

Field apply_multiplier(const Field& field, const MultiplierSymbol& symbol) {
    Field spec = as_spectral(field);
    const GridSpec& g = spec.grid();
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= symbol.eval(g.freq(i));
    if (field.rep() == Rep::physical) return transform(spec, Rep::physical);
    return spec;
}

// ---- projector banks ----

namespace {

double lp_smooth_low(double r) {
    // 1 for r<=1, 0 for r>=2, cos^2 ramp between.
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    double c = std::cos(0.5 * kPi * (r - 1.0));
    return c * c;
}

double max_lattice_freq(const GridSpec& g) {
    return g.nyquist() * std::sqrt(static_cast<double>(g.dim));
}

}  // namespace

double wiener_window(double t) { return smooth_transition(1.0 - std::abs(t)); }

int wiener_kmax(const GridSpec& grid) { return static_cast<int>(std::floor(grid.nyquist())) + 1; }

std::vector<MultiplierSymbol> projector_bank(const GridSpec& grid, BankKind kind) {
    grid.validate();
    std::vector<MultiplierSymbol> bank;

    if (kind == BankKind::wiener_cube) {
        int kmax = wiener_kmax(grid);
        std::array<int, 3> k{0, 0, 0};
        int lo[3] = {-kmax, grid.dim > 1 ? -kmax : 0, grid.dim > 2 ? -kmax : 0};
        int hi[3] = {kmax, grid.dim > 1 ? kmax : 0, grid.dim > 2 ? kmax : 0};
        for (k[0] = lo[0]; k[0] <= hi[0]; ++k[0])
            for (k[1] = lo[1]; k[1] <= hi[1]; ++k[1])
                for (k[2] = lo[2]; k[2] <= hi[2]; ++k[2]) {
                    std::array<int, 3> kk = k;
                    int dim = grid.dim;
                    bank.push_back({[kk, dim](const std::array<double, 3>& xi) {
                                        double v = 1.0;
                                        for (int a = 0; a < dim; ++a) v *= wiener_window(xi[a] - kk[a]);
                                        return cplx(v, 0.0);
                                    },
                                    "Q_(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + "," +
                                        std::to_string(k[2]) + ")"});
                }
        return bank;
    }

    // Littlewood-Paley: low block plus dyadic shells up to the lattice corner.
    double top = max_lattice_freq(grid);
    double ktop = 1.0;
    while (ktop < top) ktop *= 2.0;
    if (ktop < 2.0)
        throw config_error("projector_bank: grid resolves fewer than two dyadic shells");

    if (kind == BankKind::littlewood_paley) {
        bank.push_back({[](const std::array<double, 3>& xi) {
                            return cplx(xi_mag(xi) <= 1.0 ? 1.0 : 0.0, 0.0);
                        },
                        "P_<=1"});
        for (double K = 2.0; K <= ktop; K *= 2.0) {
            bank.push_back({[K](const std::array<double, 3>& xi) {
                                double m = xi_mag(xi);
                                return cplx((m > 0.5 * K && m <= K) ? 1.0 : 0.0, 0.0);
                            },
                            "P_" + std::to_string(static_cast<long>(K))});
        }
        return bank;
    }

    // Smooth telescoping variant: low block s(|xi|), shells s(|xi|/K)-s(2|xi|/K).
    bank.push_back({[](const std::array<double, 3>& xi) { return cplx(lp_smooth_low(xi_mag(xi)), 0.0); },
                    "S_<=1"});
    for (double K = 2.0; K <= ktop; K *= 2.0) {
        bank.push_back({[K](const std::array<double, 3>& xi) {
                            double m = xi_mag(xi);
                            return cplx(lp_smooth_low(m / K) - lp_smooth_low(2.0 * m / K), 0.0);
                        },
                        "S_" + std::to_string(static_cast<long>(K))});
    }
    return bank;
}

// ---- cached weight tables ----

namespace {

std::mutex g_table_mutex;
std::map<std::tuple<int, int, double, double, double, int>, weight_table_ptr> g_i_tables;
std::map<std::tuple<int, int, double>, weight_table_ptr> g_masks;

}  // namespace

weight_table radial_weight_table(const GridSpec& grid, const std::function<double(double)>& f) {
    weight_table w(grid.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto xi = grid.freq(i);
        w[i] = f(xi_mag(xi));
    }
    return w;
}

weight_table_ptr i_weight_table(const GridSpec& grid, const IOperatorSpec& spec) {
    spec.validate();
    std::lock_guard<std::mutex> lock(g_table_mutex);
    auto key = std::make_tuple(grid.n, grid.dim, grid.box, spec.N, spec.sigma,
                               static_cast<int>(spec.transition));
    auto it = g_i_tables.find(key);
    if (it != g_i_tables.end()) return it->second;
    auto tab = std::make_shared<weight_table>(
        radial_weight_table(grid, [&](double m) { return i_symbol(m, spec); }));
    g_i_tables[key] = tab;
    return tab;
}

weight_table_ptr dealias_mask(const GridSpec& grid) {
    std::lock_guard<std::mutex> lock(g_table_mutex);
    auto key = std::make_tuple(grid.n, grid.dim, grid.box);
    auto it = g_masks.find(key);
    if (it != g_masks.end()) return it->second;
    auto tab = std::make_shared<weight_table>(grid.size(), 1.0);
    for (std::size_t i = 0; i < tab->size(); ++i) {
        auto idx = grid.unravel(i);
        for (int a = 0; a < grid.dim; ++a) {
            int m = grid.mode_of(idx[a]);
            if (3 * std::abs(m) > grid.n) {
                (*tab)[i] = 0.0;
                break;
            }
        }
    }
    g_masks[key] = tab;
    return tab;
}

Field apply_weight_table(const Field& field, const weight_table& w) {
    if (field.rep() == Rep::spectral) {
        Field out = field;
        kernels::rmul_inplace(out.data(), w.data(), out.size());
        return out;
    }
    Field spec = transform(field, Rep::spectral);
    kernels::rmul_inplace(spec.data(), w.data(), spec.size());
    return transform(spec, Rep::physical);
}

void apply_weight_table_inplace(Field& field, const weight_table& w) {
    if (field.rep() != Rep::spectral)
        throw structural_error("apply_weight_table_inplace: spectral representation required");
    kernels::rmul_inplace(field.data(), w.data(), field.size());
}

Field apply_i_operator(const Field& field, const IOperatorSpec& spec) {
    return apply_weight_table(field, *i_weight_table(field.grid(), spec));
}

Field spectral_derivative(const Field& field, int axis) {
    const GridSpec& g = field.grid();
    if (axis < 0 || axis >= g.dim) throw structural_error("spectral_derivative: bad axis");
    Field spec = as_spectral(field);
    double fu = g.freq_unit();
    for (std::size_t i = 0; i < spec.size(); ++i) {
        auto idx = g.unravel(i);
        int m = g.mode_of(idx[axis]);
        if (m == -g.n / 2) {
            spec[i] = cplx(0.0, 0.0);  // unpaired mode has no odd partner
        } else {
            spec[i] *= cplx(0.0, m * fu);
        }
    }
    if (field.rep() == Rep::physical) return transform(spec, Rep::physical);
    return spec;
}

}  // namespace nls
