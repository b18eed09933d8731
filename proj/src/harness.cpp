#include "nls/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "nls/diagnostics.hpp"
#include "nls/field_io.hpp"
#include "nls/kernels.hpp"
#include "nls/random.hpp"
#include "nls/rng.hpp"

namespace nls {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Field build_profile(const RunConfig& c) {
    if (c.profile.kind == "gaussian")
        return make_gaussian(c.grid, c.profile.amplitude, c.profile.width);
    if (c.profile.kind == "constant")
        return make_constant(c.grid, cplx(c.profile.amplitude, 0.0));
    RadialProfile p{c.profile.s, c.profile.decay_margin, c.profile.amplitude, c.grid};
    return synthesize_profile(p);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw structural_error("cannot create output directory " + dir);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw structural_error("cannot open " + path);
    out << text;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Linear-flow trajectory of f0 sampled at the given times.
Trajectory linear_trajectory(const Field& f0, const std::vector<double>& times) {
    Trajectory t;
    t.times = times;
    Field spec = as_spectral(f0);
    for (double ti : times) t.checkpoints.push_back(linear_propagate(spec, ti));
    t.initial = t.checkpoints.empty() ? spec : t.checkpoints.front();
    return t;
}

json conserved_table(const Trajectory& traj, std::string* tsv) {
    json out;
    std::vector<double> mass, kin, pot, en;
    std::string table = "t\tmass\tkinetic\tpotential\tenergy\n";
    for (std::size_t c = 0; c < traj.count(); ++c) {
        ConservedSet cs = conserved_set(traj.checkpoints[c]);
        mass.push_back(cs.mass);
        kin.push_back(cs.kinetic);
        pot.push_back(cs.potential);
        en.push_back(cs.energy);
        table += fmt(traj.times[c]) + "\t" + fmt(cs.mass) + "\t" + fmt(cs.kinetic) + "\t" +
                 fmt(cs.potential) + "\t" + fmt(cs.energy) + "\n";
    }
    auto drift = [](const std::vector<double>& v) {
        if (v.empty() || v.front() == 0.0) return 0.0;
        double d = 0.0;
        for (double x : v) d = std::max(d, std::abs(x - v.front()));
        return d / std::abs(v.front());
    };
    out["t"] = traj.times;
    out["mass"] = mass;
    out["kinetic"] = kin;
    out["potential"] = pot;
    out["energy"] = en;
    out["mass_drift_rel"] = drift(mass);
    out["energy_drift_rel"] = drift(en);
    if (tsv) *tsv = table;
    return out;
}

// All requested diagnostics of one trajectory. f0_ref is the (band-limited,
// if dealiasing) realized random data; zero for deterministic runs.
json diagnostics_report(const Trajectory& traj, const Field& f0_ref, const RunConfig& c,
                        const std::string& out_dir) {
    json rep;
    std::string tsv;
    if (c.diagnostics.conserved) {
        rep["conserved"] = conserved_table(traj, &tsv);
        if (c.output.write_tables && !out_dir.empty())
            write_text(out_dir + "/conserved.tsv", tsv);
    }
    if (traj.count() < 2) return rep;  // blow-up at step one: scalars only

    Trajectory v_traj = forced_remainder(traj, f0_ref);
    IOperatorSpec ref_spec = c.reference_i_spec();

    if (c.diagnostics.increments) {
        std::vector<IOperatorSpec> specs;
        for (double N : c.i_operator_N) specs.push_back(c.i_spec(N));
        IncrementReport inc = energy_increment_series(traj, f0_ref, specs);
        json ji;
        std::vector<double> Ns, tv;
        for (const auto& s : inc.per_N) {
            Ns.push_back(s.N);
            tv.push_back(s.total_variation);
        }
        ji["N"] = Ns;
        ji["total_variation"] = tv;
        if (inc.alpha) {
            ji["alpha"] = *inc.alpha;
            ji["alpha_residual"] = inc.alpha_residual;
        }
        rep["increments"] = ji;
        if (c.output.write_tables && !out_dir.empty()) {
            std::string t = "N\ttotal_variation\n";
            for (std::size_t i = 0; i < Ns.size(); ++i)
                t += fmt(Ns[i]) + "\t" + fmt(tv[i]) + "\n";
            write_text(out_dir + "/increments.tsv", t);
        }
    }

    if (c.diagnostics.bundles) {
        auto pairs = default_strichartz_pairs();
        ZIBundle z = zI_bundle(v_traj, ref_spec, pairs);
        json jz;
        jz["value"] = z.value;
        for (const auto& [k, v] : z.per_pair) jz["pairs"][k] = v;
        rep["zI"] = jz;

        Trajectory f_traj = linear_trajectory(f0_ref, traj.times);
        SpacetimeNormBundle b =
            f_norm_bundle(f_traj, ref_spec, c.profile.s, c.diagnostics.bundle_l10_3);
        json jb;
        jb["F"] = b.F;
        jb["F_inf"] = b.F_inf;
        jb["F2"] = b.F2;
        jb["constituents"] = b.constituents;
        // F2 across the N list feeds the ensemble scaling fit.
        json f2n;
        for (double N : c.i_operator_N) {
            SpacetimeNormBundle bn = f_norm_bundle(f_traj, c.i_spec(N), c.profile.s, false);
            f2n[fmt(N)] = bn.F2;
        }
        jb["F2_per_N"] = f2n;
        rep["f_bundle"] = jb;
    }

    if (c.diagnostics.morawetz && c.grid.dim == 3) {
        MorawetzCheck chk = interaction_morawetz_check(traj, ref_spec);
        rep["morawetz"]["lhs"] = chk.lhs;
        rep["morawetz"]["rhs_core"] = chk.rhs_core;
        rep["morawetz"]["ratio"] = chk.ratio;
        rep["morawetz"]["zero_mode_mass"] = chk.zero_mode_mass;
        MorawetzRecord mr = morawetz_record(traj.checkpoints.back(), ref_spec);
        rep["morawetz"]["final_action_origin"] = mr.action_origin;
        rep["morawetz"]["final_interaction"] = mr.interaction;
        rep["morawetz"]["final_quartic_density"] = mr.quartic_density;
        rep["morawetz"]["final_quartic_interaction"] = mr.quartic_interaction;
        rep["morawetz"]["regularization"] = mr.regularization;
    }

    if (c.diagnostics.scattering &&
        traj.count() >= static_cast<std::size_t>(c.diagnostics.scattering_window) + 1) {
        ScatteringVerdict v = scattering_detect(traj, c.i_operator_sigma,
                                                c.diagnostics.scattering_tol,
                                                c.diagnostics.scattering_window);
        rep["scattering"]["scattered"] = v.scattered;
        rep["scattering"]["tol"] = c.diagnostics.scattering_tol;
        rep["scattering"]["window"] = c.diagnostics.scattering_window;
        rep["scattering"]["cauchy_tail"] = v.cauchy_tail;
        if (v.final_state) {
            // candidate decomposition: w_last and w_last - f0
            rep["scattering"]["w_last_l2"] = l2_norm(*v.final_state);
            rep["scattering"]["u_plus_l2"] = l2_norm(field_sub(*v.final_state, as_spectral(f0_ref)));
            if (!out_dir.empty() && c.output.write_fields)
                write_field(out_dir + "/w_last.nlsf", *v.final_state);
        }
    }

    if (c.diagnostics.theta) {
        json jt = json::array();
        for (double N : c.i_operator_N) {
            ThetaReport th = theta_monitor(traj, f0_ref, c.i_spec(N), c.diagnostics.theta_m_cap,
                                           c.diagnostics.theta_e_unit);
            json e;
            e["N"] = N;
            e["T"] = th.T;
            e["energy_budget"] = th.energy_budget;
            e["l4_budget"] = th.l4_budget;
            e["energy_sup"] = th.energy_sup;
            e["l4_accum"] = th.l4_accum;
            jt.push_back(e);
        }
        rep["theta"] = jt;
    }
    return rep;
}

}  // namespace

RunArtifacts run_single(const RunConfig& config, std::uint64_t seed, const std::string& out_dir) {
    auto warnings = config.validate();
    if (!out_dir.empty()) ensure_dir(out_dir);

    Field f0 = build_profile(config);
    Field u0, f0_ref;
    if (config.randomize) {
        RandomDraw draw = randomize(f0, seed);
        u0 = draw.field;
        f0_ref = draw.field;
    } else {
        u0 = as_spectral(f0);
        f0_ref = make_zero(config.grid, Rep::spectral);
    }
    // Keep the linear-flow reference on the same band as the evolved state.
    if (config.evolution.dealias && config.evolution.nonlinearity_enabled)
        apply_weight_table_inplace(f0_ref, *dealias_mask(config.grid));

    RunArtifacts art;
    Trajectory traj;
    bool blew_up = false;
    std::string blow_msg;
    try {
        traj = evolve(u0, config.evolution);
    } catch (evolution_blowup& bl) {
        traj = std::move(bl.partial);
        blew_up = true;
        blow_msg = bl.what();
    }

    json rep;
    rep["config"] = json::parse(emit_config(config));
    rep["seed"] = seed;
    rep["kernel_path"] = kernels::active_path();
    rep["blowup"] = blew_up;
    if (blew_up) rep["blowup_message"] = blow_msg;
    for (const auto& w : traj.warnings) warnings.push_back(w);
    rep["warnings"] = warnings;
    rep["times"] = traj.times;

    json diag = diagnostics_report(traj, f0_ref, config, out_dir);
    for (auto it = diag.begin(); it != diag.end(); ++it) rep[it.key()] = it.value();

    if (!out_dir.empty()) {
        write_text(out_dir + "/config.json", emit_config(config));
        if (config.output.write_fields) {
            write_field(out_dir + "/f0_omega.nlsf", f0_ref);
            if (traj.count() > 0) {
                write_field(out_dir + "/initial.nlsf", traj.initial);
                write_field(out_dir + "/final.nlsf", traj.checkpoints.back());
            }
        }
        if (config.output.write_trajectory && traj.count() > 0) {
            ensure_dir(out_dir + "/trajectory");
            json meta;
            meta["times"] = traj.times;
            for (std::size_t i = 0; i < traj.count(); ++i) {
                char name[64];
                std::snprintf(name, sizeof(name), "/trajectory/checkpoint_%05zu.nlsf", i);
                write_field(out_dir + name, traj.checkpoints[i]);
            }
            write_text(out_dir + "/trajectory/times.json", meta.dump(2) + "\n");
        }
        write_text(out_dir + "/report.json", rep.dump(2) + "\n");
    }
    art.report = std::move(rep);
    art.exit_code = blew_up ? 2 : 0;
    return art;
}

RunArtifacts diagnose_run(const std::string& run_dir, const std::string& out_dir) {
    RunConfig config = load_config(run_dir + "/config.json");
    std::ifstream meta_in(run_dir + "/trajectory/times.json");
    if (!meta_in)
        throw structural_error("diagnose: " + run_dir +
                               " has no stored trajectory (write_trajectory was off?)");
    json meta = json::parse(meta_in);

    Trajectory traj;
    traj.config = config.evolution;
    traj.times = meta["times"].get<std::vector<double>>();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "/trajectory/checkpoint_%05zu.nlsf", i);
        traj.checkpoints.push_back(read_field(run_dir + name));
    }
    if (traj.count() == 0) throw structural_error("diagnose: empty trajectory");
    traj.initial = traj.checkpoints.front();
    Field f0_ref = read_field(run_dir + "/f0_omega.nlsf");

    std::string dir = out_dir.empty() ? run_dir : out_dir;
    ensure_dir(dir);
    json rep;
    rep["config"] = json::parse(emit_config(config));
    rep["recomputed_from"] = run_dir;
    rep["times"] = traj.times;
    json diag = diagnostics_report(traj, f0_ref, config, dir);
    for (auto it = diag.begin(); it != diag.end(); ++it) rep[it.key()] = it.value();
    write_text(dir + "/report.json", rep.dump(2) + "\n");

    RunArtifacts art;
    art.report = std::move(rep);
    return art;
}

// ---- ensembles ----

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Quantile-based lambda grid: 12 levels between the 50th and 98th percentile.
std::vector<double> lambda_grid_for(std::vector<double> samples) {
    std::sort(samples.begin(), samples.end());
    auto quant = [&](double q) {
        double pos = q * (samples.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        double frac = pos - lo;
        if (lo + 1 >= samples.size()) return samples.back();
        return samples[lo] * (1.0 - frac) + samples[lo + 1] * frac;
    };
    std::vector<double> grid;
    for (int i = 0; i < 12; ++i) grid.push_back(quant(0.5 + 0.48 * i / 11.0));
    return grid;
}

std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
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
    return {slope, intercept};
}

}  // namespace

EnsembleArtifacts run_ensemble(const RunConfig& config, const std::string& out_dir) {
    config.validate();
    if (config.seed_end < config.seed_begin)
        throw config_error("run_ensemble: seed range is unset (seed_end < seed_begin)");
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = config.seed_begin; s <= config.seed_end; ++s) seeds.push_back(s);
    if (seeds.size() < 2) throw config_error("run_ensemble: need at least 2 seeds");
    if (!out_dir.empty()) ensure_dir(out_dir);

    struct SeedOutcome {
        bool ok = false;
        bool blowup = false;
        std::string error;
        json report;
    };
    std::vector<SeedOutcome> outcomes(seeds.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            std::string dir =
                out_dir.empty() ? std::string() : out_dir + "/seed_" + std::to_string(seeds[i]);
            try {
                RunArtifacts art = run_single(config, seeds[i], dir);
                outcomes[i].ok = (art.exit_code == 0);
                outcomes[i].blowup = (art.exit_code == 2);
                outcomes[i].report = std::move(art.report);
                if (outcomes[i].blowup) outcomes[i].error = "blow-up";
            } catch (const std::exception& e) {
                outcomes[i].error = e.what();
            }
        }
    };
    std::size_t nw = std::min<std::size_t>(std::max(config.workers, 1), seeds.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    // Deterministic reduce over sorted seed order (seeds is already sorted).
    json rep;
    rep["config"] = json::parse(emit_config(config));
    rep["seed_count"] = seeds.size();
    json failures = json::array();
    std::size_t n_ok = 0;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (outcomes[i].ok)
            ++n_ok;
        else {
            json f;
            f["seed"] = seeds[i];
            f["error"] = outcomes[i].error;
            failures.push_back(f);
        }
    }
    rep["ok_count"] = n_ok;
    rep["failures"] = failures;

    // Control channel: Rayleigh tail of |g| across seeds. P(|g| > lambda) is
    // exactly exp(-lambda^2) for the unit complex Gaussian, so the fitted
    // slope must sit near -1 whenever the generator is healthy.
    if (seeds.size() >= 500) {
        std::vector<double> samples;
        for (auto s : seeds) {
            CounterRng rng(derive_stream(s, 0xabcdef12345ULL));
            samples.push_back(std::abs(rng.next_complex_gaussian()));
        }
        try {
            auto grid = lambda_grid_for(samples);
            TailFit fit = tail_fit(samples, grid);
            rep["rayleigh_control"]["slope"] = fit.slope;
            rep["rayleigh_control"]["used_lambdas"] = fit.used_lambdas;
            rep["rayleigh_control"]["residual"] = fit.residual;
        } catch (const estimation_error& e) {
            rep["rayleigh_control"]["error"] = e.what();
        }
    }

    // Per-constituent tails and scaling fits over the successful seeds.
    std::map<std::string, std::vector<double>> constituents;
    std::map<double, std::vector<double>> tv_per_N, f2_per_N;
    std::vector<double> mass_drifts, alphas;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        if (!outcomes[i].ok) continue;
        const json& r = outcomes[i].report;
        if (r.contains("f_bundle")) {
            for (auto it = r["f_bundle"]["constituents"].begin();
                 it != r["f_bundle"]["constituents"].end(); ++it)
                constituents[it.key()].push_back(it.value().get<double>());
            if (r["f_bundle"].contains("F2_per_N"))
                for (auto it = r["f_bundle"]["F2_per_N"].begin();
                     it != r["f_bundle"]["F2_per_N"].end(); ++it)
                    f2_per_N[std::stod(it.key())].push_back(it.value().get<double>());
        }
        if (r.contains("increments")) {
            auto Ns = r["increments"]["N"].get<std::vector<double>>();
            auto tvs = r["increments"]["total_variation"].get<std::vector<double>>();
            for (std::size_t k = 0; k < Ns.size(); ++k) tv_per_N[Ns[k]].push_back(tvs[k]);
            if (r["increments"].contains("alpha"))
                alphas.push_back(r["increments"]["alpha"].get<double>());
        }
        if (r.contains("conserved"))
            mass_drifts.push_back(r["conserved"]["mass_drift_rel"].get<double>());
    }

    json tails;
    for (auto& [name, samples] : constituents) {
        json t;
        t["samples"] = samples.size();
        t["median"] = median(samples);
        if (samples.size() >= 500) {
            try {
                TailFit fit = tail_fit(samples, lambda_grid_for(samples));
                t["slope"] = fit.slope;
                t["used_lambdas"] = fit.used_lambdas;
                t["residual"] = fit.residual;
            } catch (const estimation_error& e) {
                t["error"] = e.what();
            }
        }
        tails[name] = t;
    }
    rep["constituent_tails"] = tails;

    auto scaling_fit = [&](std::map<double, std::vector<double>>& per_N, const char* what) -> json {
        json out;
        std::vector<double> Ns, med;
        for (auto& [N, v] : per_N) {
            Ns.push_back(N);
            med.push_back(median(v));
            out["median"][fmt(N)] = median(v);
            out["samples"][fmt(N)] = v.size();
        }
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < Ns.size(); ++i)
            if (med[i] > 0.0) {
                xs.push_back(Ns[i]);
                ys.push_back(med[i]);
            }
        if (xs.size() >= 2) {
            auto [slope, intercept] = loglog_fit(xs, ys);
            out["exponent"] = slope;
            double rss = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                double r = std::log(ys[i]) - (intercept + slope * std::log(xs[i]));
                rss += r * r;
            }
            out["residual"] = std::sqrt(rss / xs.size());
        }
        (void)what;
        return out;
    };
    if (!tv_per_N.empty()) rep["increment_scaling"] = scaling_fit(tv_per_N, "totvar");
    if (!f2_per_N.empty()) {
        rep["f2_scaling"] = scaling_fit(f2_per_N, "F2");
        rep["f2_scaling"]["reference_exponent"] = 0.5 * (1.0 - config.i_operator_sigma);
    }
    if (!alphas.empty()) {
        rep["alpha_median"] = median(alphas);
        rep["alpha_samples"] = alphas.size();
    }
    if (!mass_drifts.empty()) {
        rep["mass_drift_median"] = median(mass_drifts);
        rep["mass_drift_samples"] = mass_drifts.size();
    }

    EnsembleArtifacts art;
    art.exit_code = (n_ok == seeds.size()) ? 0 : 3;
    rep["partial"] = art.exit_code == 3;
    if (!out_dir.empty()) write_text(out_dir + "/ensemble.json", rep.dump(2) + "\n");
    art.report = std::move(rep);
    return art;
}

// ---- invariant check suite ----

namespace {

struct RowBuilder {
    std::vector<CheckRow> rows;
    void add(const std::string& name, double measured, double tol, bool smaller_is_pass = true) {
        CheckRow r;
        r.name = name;
        r.measured = measured;
        r.tolerance = tol;
        r.pass = smaller_is_pass ? (measured <= tol) : (measured >= tol);
        rows.push_back(r);
    }
    void skip(const std::string& name, const std::string& why) {
        CheckRow r;
        r.name = name;
        r.skipped = true;
        r.pass = true;
        r.note = why;
        rows.push_back(r);
    }
};

}  // namespace

std::vector<CheckRow> check_suite(const CheckOptions& opt) {
    const GridSpec& g = opt.grid;
    g.validate();
    RowBuilder b;

    // Transform layer: Parseval, round trip, multiplier commutativity.
    double worst_parseval = 0.0, worst_roundtrip = 0.0, worst_commute = 0.0;
    for (int s = 0; s < 50; ++s) {
        Field u = make_random_field(g, 1000 + s);
        Field up = transform(u, Rep::physical);
        double corrupt = opt.corrupt_transform ? 1.01 : 1.0;
        double np = l2_norm(up) * corrupt;
        double ns = l2_norm(u);
        worst_parseval = std::max(worst_parseval, std::abs(np - ns) / ns);

        Field back = transform(up, Rep::spectral);
        double err = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(back[i] - u[i]));
        worst_roundtrip = std::max(worst_roundtrip, err / std::max(1e-300, l2_norm(u)));

        IOperatorSpec is{4.0, 0.8, IOperatorSpec::Transition::power_law};
        MultiplierSymbol a = make_i_symbol(is);
        MultiplierSymbol c = make_free_propagator_symbol(0.3);
        Field ab = apply_multiplier(apply_multiplier(u, a), c);
        Field ba = apply_multiplier(apply_multiplier(u, c), a);
        double d = 0.0;
        for (std::size_t i = 0; i < ab.size(); ++i) d = std::max(d, std::abs(ab[i] - ba[i]));
        worst_commute = std::max(worst_commute, d / std::max(1e-300, l2_norm(u)));
    }
    b.add("transform.parseval", worst_parseval, 1e-12);
    b.add("transform.round_trip", worst_roundtrip, 1e-12);
    b.add("multiplier.commutativity", worst_commute, 1e-12);

    // I-operator norm equivalence, exact for the min-form symbol:
    //   ||grad I u|| <= N^{1-sigma} ||u||_{H^sigma} and
    //   ||u||_{H^sigma} <= N^{1-sigma} ||I u||_{H^1}.
    double worst_a = -1.0, worst_b = -1.0;
    for (int s = 0; s < 25; ++s) {
        Field u = make_random_field(g, 2000 + s);
        for (double N : {4.0, 8.0}) {
            for (double sig : {0.7, 0.9}) {
                IOperatorSpec is{N, sig, IOperatorSpec::Transition::power_law};
                Field iu = apply_i_operator(u, is);
                double fac = std::pow(N, 1.0 - sig);
                double lhs_a = sobolev_norm(iu, 1.0, true);
                double rhs_a = fac * sobolev_norm(u, sig);
                worst_a = std::max(worst_a, lhs_a / rhs_a - 1.0);
                double lhs_b = sobolev_norm(u, sig);
                double rhs_b = fac * sobolev_norm(iu, 1.0);
                worst_b = std::max(worst_b, lhs_b / rhs_b - 1.0);
            }
        }
    }
    b.add("i_operator.grad_bound", worst_a, 1e-10);
    b.add("i_operator.inverse_bound", worst_b, 1e-10);

    // Symbol monotonicity and continuity across the transition region.
    {
        IOperatorSpec is{8.0, 0.7, IOperatorSpec::Transition::power_law};
        IOperatorSpec is2{8.0, 0.7, IOperatorSpec::Transition::smoothstep};
        double worst_jump = 0.0, worst_mono = 0.0;
        double lipschitz = (1.0 - is.sigma) / is.N;  // |m'| <= (1-sigma)/N on the tail
        double hstep = 0.01;
        for (const auto& spec : {is, is2}) {
            double prev = i_symbol(0.0, spec);
            for (double m = hstep; m <= 4.0 * spec.N; m += hstep) {
                double cur = i_symbol(m, spec);
                worst_mono = std::max(worst_mono, cur - prev);
                worst_jump = std::max(worst_jump, std::abs(cur - prev));
                prev = cur;
            }
        }
        b.add("i_symbol.monotone", worst_mono, 0.0);
        b.add("i_symbol.continuity", worst_jump, 2.0 * std::max(lipschitz, 1.0) * hstep);
    }

    // Projector banks: partition of unity on the lattice.
    for (auto kind : {BankKind::littlewood_paley, BankKind::wiener_cube}) {
        const char* name = kind == BankKind::wiener_cube ? "bank.wiener_partition"
                                                         : "bank.lp_partition";
        if (kind == BankKind::wiener_cube && g.dim == 3 && wiener_kmax(g) > 12) {
            b.skip(name, "wiener bank too large on this grid; covered at smaller L in unit tests");
            continue;
        }
        auto bank = projector_bank(g, kind);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto xi = g.freq(i);
            cplx sum(0.0, 0.0);
            for (const auto& sym : bank) sum += sym.eval(xi);
            worst = std::max(worst, std::abs(sum - cplx(1.0, 0.0)));
        }
        b.add(name, worst, 1e-12);
    }

    // Randomization: bit reproducibility and the decoupled L^2 identity's
    // single-draw sanity.
    {
        RadialProfile prof{0.5, 0.05, 1.0, g};
        Field f0 = synthesize_profile(prof);
        RandomDraw d1 = randomize(f0, 42), d2 = randomize(f0, 42);
        double dmax = 0.0;
        for (std::size_t i = 0; i < d1.field.size(); ++i)
            dmax = std::max(dmax, std::abs(d1.field[i] - d2.field[i]));
        b.add("randomize.reproducible", dmax, 0.0);
        b.add("profile.radial_deviation", radial_deviation(f0), 1e-12);
    }

    // Khinchin ratio on a small matrix.
    {
        std::vector<cplx> ones(16, cplx(1.0, 0.0));
        double worst = 0.0;
        for (double p : {2.0, 4.0, 8.0})
            worst = std::max(worst, khinchin_ratio(ones, p, 2000, 7));
        b.add("khinchin.ratio", worst, 3.0);
    }

    // Evolution: substep modulus, linear isometry, mass drift, defocusing sign.
    {
        Field u = make_random_field(g, 77, 2.5, 0.5);
        Field up = transform(u, Rep::physical);
        Field rot = nonlinear_substep(up, 0.37);
        double worst = 0.0;
        for (std::size_t i = 0; i < up.size(); ++i)
            worst = std::max(worst, std::abs(std::abs(rot[i]) - std::abs(up[i])));
        b.add("evolve.substep_modulus", worst, 1e-14);

        double iso = 0.0;
        for (double s : {0.0, 0.5, 1.0}) {
            double n0 = sobolev_norm(u, s);
            double n1 = sobolev_norm(linear_propagate(u, 0.7), s);
            iso = std::max(iso, std::abs(n1 - n0) / n0);
        }
        b.add("evolve.linear_isometry", iso, 1e-12);

        EvolutionConfig ec;
        ec.dt = 1e-3;
        ec.t_end = 0.2;
        ec.checkpoint_every = 20;
        Field g0 = make_gaussian(g, 0.5, std::max(1.0, g.box / 8.0));
        Trajectory tr = evolve(g0, ec);
        json cons = conserved_table(tr, nullptr);
        double steps = 0.2 / 1e-3;
        b.add("evolve.mass_drift_per_1e3_steps",
              cons["mass_drift_rel"].get<double>() * (1000.0 / steps), 1e-10);

        double min_pot = std::numeric_limits<double>::max();
        for (std::size_t i = 0; i < tr.count(); ++i)
            min_pot = std::min(min_pot, conserved_set(tr.checkpoints[i]).potential);
        b.add("energy.potential_nonnegative", -min_pot, 0.0);

        // scattering detector on the linear-only trajectory
        EvolutionConfig lc = ec;
        lc.nonlinearity_enabled = false;
        Trajectory ltr = evolve(g0, lc);
        ScatteringVerdict v = scattering_detect(ltr, 0.9, 1e-3, 3);
        double tailmax = 0.0;
        for (double d : v.cauchy_tail) tailmax = std::max(tailmax, d);
        b.add("scattering.linear_only_tail", tailmax, 1e-12);
        b.add("scattering.linear_only_verdict", v.scattered ? 1.0 : 0.0, 1.0, false);

        // increments with nonlinearity disabled and random forcing data are zero
        RadialProfile prof{0.5, 0.05, 0.5, g};
        RandomDraw draw = randomize(synthesize_profile(prof), 5);
        Trajectory lfr = evolve(draw.field, lc);
        std::vector<IOperatorSpec> specs{{4.0, 0.9, IOperatorSpec::Transition::power_law}};
        IncrementReport inc = energy_increment_series(lfr, draw.field, specs);
        b.add("increments.linear_only_zero", inc.per_N[0].total_variation /
                                                 std::max(1e-300, modified_energy(make_zero(g, Rep::spectral),
                                                                                  draw.field, specs[0])),
              1e-10);
    }

    // Commutator cancellation on band-limited data.
    {
        IOperatorSpec is{8.0, 0.8, IOperatorSpec::Transition::power_law};
        Field u = make_random_field(g, 11, 2.0);
        // band-limit to |xi| <= N/3
        Field band = apply_weight_table(
            u, radial_weight_table(g, [&](double m) { return m <= is.N / 3.0 ? 1.0 : 0.0; }));
        CommutatorRecord rec = commutator_H(band, is);
        b.add("commutator.band_limited_vanish", rec.l2_norm, 1e-12);
    }

    // Modified energy collapses to the plain energy of Iv when f = 0.
    {
        Field v = make_random_field(g, 13, 2.0, 0.3);
        IOperatorSpec is{4.0, 0.8, IOperatorSpec::Transition::power_law};
        double me = modified_energy(v, make_zero(g, Rep::spectral), is);
        double e = conserved_set(apply_i_operator(v, is)).energy;
        b.add("modified_energy.f_zero_collapse", std::abs(me - e) / std::max(1e-300, e), 1e-12);
    }

    // Morawetz rows need d=3.
    if (g.dim != 3) {
        b.skip("morawetz.real_field_zero", "requires d=3");
        b.skip("morawetz.fft_vs_direct", "requires d=3");
    } else {
        IOperatorSpec is{4.0, 0.8, IOperatorSpec::Transition::power_law};
        Field real_u = make_gaussian(g, 1.0, std::max(1.0, g.box / 8.0));
        MorawetzRecord mr = morawetz_record(real_u, is);
        double scale = std::max(1.0, mr.quartic_density);
        b.add("morawetz.real_field_zero",
              std::max(std::abs(mr.action_origin), std::abs(mr.interaction)) / scale, 1e-12);

        GridSpec g8{8, g.box, 3};
        Field u8 = make_random_field(g8, 17, 1.0, 0.7);
        MorawetzRecord m8 = morawetz_record(u8, is);
        // direct O(n^6) double sum
        Field iu = transform(apply_i_operator(as_spectral(u8), is), Rep::physical);
        std::array<Field, 3> grad;
        for (int a = 0; a < 3; ++a)
            grad[a] = transform(spectral_derivative(apply_i_operator(as_spectral(u8), is), a),
                                Rep::physical);
        double cv = g8.cell_volume();
        double direct = 0.0;
        for (std::size_t ix = 0; ix < g8.size(); ++ix) {
            auto ia = g8.unravel(ix);
            double jx[3];
            cplx z = iu[ix];
            for (int a = 0; a < 3; ++a) jx[a] = std::imag(std::conj(z) * grad[a][ix]);
            for (std::size_t iy = 0; iy < g8.size(); ++iy) {
                auto ib = g8.unravel(iy);
                double diff[3], r2 = 0.0;
                for (int a = 0; a < 3; ++a) {
                    double d = g8.coord_of(ia[a]) - g8.coord_of(ib[a]);
                    // wrap to the centered cell
                    if (d < -0.5 * g8.box) d += g8.box;
                    if (d >= 0.5 * g8.box) d -= g8.box;
                    diff[a] = d;
                    r2 += d * d;
                }
                if (r2 == 0.0) continue;
                double r = std::sqrt(r2);
                double dot = 0.0;
                for (int a = 0; a < 3; ++a) dot += diff[a] / r * jx[a];
                direct += dot * std::norm(iu[iy]);
            }
        }
        direct *= 2.0 * cv * cv;
        double rel = std::abs(direct - m8.interaction) / std::max(1e-300, std::abs(direct));
        b.add("morawetz.fft_vs_direct", rel, 1e-8);
    }

    return b.rows;
}

json embedding_experiment(const std::vector<int>& ns, double L, const ProfileConfig& profile,
                          const std::vector<double>& deltas) {
    json out;
    out["L"] = L;
    json rows = json::array();
    for (int n : ns) {
        GridSpec g{n, L, 3};
        RadialProfile prof{profile.s, profile.decay_margin, profile.amplitude, g};
        Field f0 = synthesize_profile(prof);
        for (double d : deltas) {
            EmbeddingResult r = radial_embedding_functional(f0, d);
            json row;
            row["n"] = n;
            row["delta"] = d;
            row["lhs"] = r.lhs;
            row["rhs"] = r.rhs;
            row["ratio"] = r.rhs > 0.0 ? r.lhs / r.rhs : 0.0;
            row["input_radial"] = r.input_radial;
            rows.push_back(row);
        }
        // translated control: same profile moved by L/4, radiality broken
        Field shifted = translate_field(f0, {L / 4.0, 0.0, 0.0});
        EmbeddingResult rs = radial_embedding_functional(shifted, deltas.front());
        json row;
        row["n"] = n;
        row["delta"] = deltas.front();
        row["translated"] = true;
        row["lhs"] = rs.lhs;
        row["rhs"] = rs.rhs;
        row["input_radial"] = rs.input_radial;
        rows.push_back(row);
    }
    out["rows"] = rows;
    return out;
}

}  // namespace nls
