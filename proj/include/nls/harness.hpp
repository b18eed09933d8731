// Orchestration: single runs, seeded ensembles with reproducible parallel
// streams, recomputation of diagnostics from stored trajectories, the
// invariant check suite, and the radial embedding experiment.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nls/config.hpp"

namespace nls {

struct RunArtifacts {
    int exit_code = 0;  // 0 ok, 2 blow-up (partial report written)
    nlohmann::json report;
};

// Deterministic given (config, seed): report.json plus optional NLSF1
// snapshots and TSV tables under out_dir.
RunArtifacts run_single(const RunConfig& config, std::uint64_t seed, const std::string& out_dir);

struct EnsembleArtifacts {
    int exit_code = 0;  // 0 ok, 3 partial (some seeds failed)
    nlohmann::json report;
};

// Runs the inclusive seed range on a worker pool; aggregates are a
// deterministic reduce over sorted seed order, so results are independent of
// scheduling and of the worker count.
EnsembleArtifacts run_ensemble(const RunConfig& config, const std::string& out_dir);

// Recompute diagnostics from a stored trajectory (requires
// output.write_trajectory = true at simulation time).
RunArtifacts diagnose_run(const std::string& run_dir, const std::string& out_dir);

struct CheckRow {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string note;
};

struct CheckOptions {
    GridSpec grid{16, 2.0 * kPi, 3};
    // Fault-injection hook: corrupt the transform normalization so the
    // Parseval row must fail. Demonstrates the suite catches a broken build.
    bool corrupt_transform = false;
};

// One row per module invariant; a row is skipped (with reason) when the grid
// cannot support it. Returns all rows; callers decide the exit code.
std::vector<CheckRow> check_suite(const CheckOptions& options);

// lhs/rhs of the weighted square-function embedding across resolutions and
// smoothness parameters, plus the translated (radiality-broken) control.
nlohmann::json embedding_experiment(const std::vector<int>& ns, double L,
                                    const ProfileConfig& profile,
                                    const std::vector<double>& deltas);

}  // namespace nls
