// nlsim: pseudospectral simulator and diagnostics for the 3D cubic defocusing
// Schrodinger equation with Wiener-randomized radial data.
//
// Subcommands:
//   simulate   one (config, seed) run, report + snapshots
//   ensemble   seeded seed-range run with aggregate fits
//   diagnose   recompute diagnostics from a stored trajectory
//   check      invariant suite, one row per module property
//   embedding  weighted radial embedding experiment across resolutions
//
// Exit codes: 0 ok, 1 config error, 2 blow-up, 3 partial ensemble.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nls/harness.hpp"

namespace {

nls::RunConfig load_or_default(const std::string& config_path) {
    if (config_path.empty()) return nls::RunConfig{};
    return nls::load_config(config_path);
}

bool parse_seed_range(const std::string& text, std::uint64_t& a, std::uint64_t& b) {
    auto pos = text.find("..");
    if (pos == std::string::npos) return false;
    try {
        a = std::stoull(text.substr(0, pos));
        b = std::stoull(text.substr(pos + 2));
    } catch (...) {
        return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral cubic NLS simulator and diagnostics suite"};
    app.require_subcommand(1);

    std::string config_path, out_dir, seeds_range, run_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int workers = 0;
    bool paper_regime = false, linear_only = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file (JSON)");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_flag("--paper-regime", paper_regime,
                      "enforce 3/7 < s <= 1 and 6/7 < sigma < 2s");
        cmd->add_flag("--linear-only", linear_only, "disable the nonlinearity (validation runs)");
        cmd->add_option("--workers", workers, "worker threads for ensembles");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run one seed");
    add_common(sim);
    auto* seed_opt = sim->add_option("--seed", seed, "randomization seed");

    CLI::App* ens = app.add_subcommand("ensemble", "run a seed range");
    add_common(ens);
    ens->add_option("--seeds", seeds_range, "inclusive seed range A..B");

    CLI::App* diag = app.add_subcommand("diagnose", "recompute diagnostics from a stored run");
    diag->add_option("--in", run_dir, "run directory with a stored trajectory")->required();
    diag->add_option("--out", out_dir, "output directory (defaults to the run directory)");

    CLI::App* chk = app.add_subcommand("check", "invariant suite");
    int chk_n = 16, chk_d = 3;
    double chk_L = 2.0 * nls::kPi;
    bool corrupt = false;
    chk->add_option("--n", chk_n, "grid points per dimension");
    chk->add_option("--d", chk_d, "spatial dimension (1 for the fast subset)");
    chk->add_option("--L", chk_L, "box length");
    chk->add_flag("--corrupt-transform-hook", corrupt)->group("");  // hidden fault injection

    CLI::App* emb = app.add_subcommand("embedding", "radial embedding experiment");
    add_common(emb);
    std::vector<int> emb_ns{32, 64};
    std::vector<double> emb_deltas{0.05, 0.1, 0.2};
    double emb_L = 32.0;
    emb->add_option("--ns", emb_ns, "grid sizes");
    emb->add_option("--deltas", emb_deltas, "smoothness parameters");
    emb->add_option("--L", emb_L, "box length");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed() || ens->parsed()) {
            nls::RunConfig cfg = load_or_default(config_path);
            if (paper_regime) cfg.paper_regime = true;
            if (linear_only) cfg.evolution.nonlinearity_enabled = false;
            if (workers > 0) cfg.workers = workers;
            if (!out_dir.empty()) cfg.output.directory = out_dir;

            if (sim->parsed()) {
                seed_set = seed_opt->count() > 0;
                if (seed_set) cfg.seed = seed;
                nls::RunArtifacts art = nls::run_single(cfg, cfg.seed, cfg.output.directory);
                std::printf("report: %s/report.json (exit %d)\n", cfg.output.directory.c_str(),
                            art.exit_code);
                return art.exit_code;
            }
            if (!seeds_range.empty()) {
                if (!parse_seed_range(seeds_range, cfg.seed_begin, cfg.seed_end)) {
                    std::fprintf(stderr, "bad --seeds range '%s', expected A..B\n",
                                 seeds_range.c_str());
                    return 1;
                }
            }
            nls::EnsembleArtifacts art = nls::run_ensemble(cfg, cfg.output.directory);
            std::printf("ensemble: %s/ensemble.json (%llu..%llu, exit %d)\n",
                        cfg.output.directory.c_str(),
                        static_cast<unsigned long long>(cfg.seed_begin),
                        static_cast<unsigned long long>(cfg.seed_end), art.exit_code);
            return art.exit_code;
        }

        if (diag->parsed()) {
            nls::RunArtifacts art = nls::diagnose_run(run_dir, out_dir);
            std::printf("diagnose: wrote report.json (exit %d)\n", art.exit_code);
            return art.exit_code;
        }

        if (chk->parsed()) {
            nls::CheckOptions opt;
            opt.grid = nls::GridSpec{chk_n, chk_L, chk_d};
            opt.corrupt_transform = corrupt;
            auto rows = nls::check_suite(opt);
            int failures = 0;
            for (const auto& r : rows) {
                if (r.skipped) {
                    std::printf("[skip] %-38s %s\n", r.name.c_str(), r.note.c_str());
                    continue;
                }
                bool ok = r.pass;
                failures += ok ? 0 : 1;
                std::printf("[%s] %-38s measured=%.3e tol=%.3e\n", ok ? "pass" : "FAIL",
                            r.name.c_str(), r.measured, r.tolerance);
            }
            std::printf("%d failure(s) out of %zu rows\n", failures, rows.size());
            return failures == 0 ? 0 : 4;
        }

        if (emb->parsed()) {
            nls::ProfileConfig prof;
            if (!config_path.empty()) prof = nls::load_config(config_path).profile;
            auto rep = nls::embedding_experiment(emb_ns, emb_L, prof, emb_deltas);
            std::string dir = out_dir.empty() ? "." : out_dir;
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            std::ofstream out(dir + "/embedding.json");
            out << rep.dump(2) << "\n";
            std::printf("embedding: wrote %s/embedding.json\n", dir.c_str());
            return 0;
        }
    } catch (const nls::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const nls::blowup_error& e) {
        std::fprintf(stderr, "blow-up: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
