// Error taxonomy for the simulator. The CLI maps these onto exit codes.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nls {

// Shape/representation mismatches, bad grids, malformed files.
struct structural_error : std::runtime_error {
    explicit structural_error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid run parameters (bad config values, unusable projector banks, ...).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A statistical estimator was asked for something it cannot deliver
// (degenerate tails, too few samples or checkpoints, empty dyadic shells).
struct estimation_error : std::runtime_error {
    explicit estimation_error(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values appeared during time evolution. Carries the index of the
// last checkpoint that was still finite so partial reports stay possible.
struct blowup_error : std::runtime_error {
    blowup_error(const std::string& what, std::size_t last_healthy)
        : std::runtime_error(what), last_healthy_checkpoint(last_healthy) {}
    std::size_t last_healthy_checkpoint;
};

}  // namespace nls
