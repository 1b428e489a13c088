#pragma once

#include "rmdp/average.hpp"
#include "rmdp/instance.hpp"
#include "rmdp/types.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rmdp {

/**
 * Convergence-error experiment: build an instance, attach an uncertainty
 * set, estimate the optimal gain with a long reference run, then measure
 * per-iteration errors of the three gain solvers against that reference.
 *
 * The config round-trips through JSON (see config_from_json for the keys);
 * command-line flags are expected to override file values field by field.
 */
struct ExperimentConfig {
    std::string instance_id = "garnet"; // gallery identifier (build_by_id)
    std::string instance_file;          // JSON instance path; overrides the id
    std::string uncertainty = "box";    // box | ell2 | singleton
    Real radius = 0.05;
    int num_states = 20;
    int num_actions = 5; // garnet only
    int branch = 10;     // garnet only
    int horizon = 1000;  // iterations T for the measured runs
    int reference_horizon = 5000;
    int num_seeds = 0; // 0 = auto: 25 for garnet, 1 otherwise
    std::uint64_t seed = 0;
    Real confidence = 0.95;
    bool normalize = true; // rescale rewards to [0, 1] before solving
    std::string output;    // CSV path; empty keeps the artifact in memory
};

/// Parse a config from JSON text, rejecting unknown keys and wrong types.
ExperimentConfig config_from_string(const std::string& text);

ExperimentConfig load_config(const std::string& path);

/// Throws std::invalid_argument when fields are out of range (T >= T_ref,
/// nonpositive radius, unknown uncertainty kind, unsupported confidence).
void validate(const ExperimentConfig& config);

/// One seed's measurements. Traces and errors are indexed by algorithm in
/// the order limit-discount, horizon, discount-schedule; errors[a][t-1] is
/// the absolute gap between the reference scalar and the estimate at t.
struct SeedRun {
    std::uint64_t seed = 0;
    Real reference_scalar = 0.0;
    Real stationarity_range = 0.0; // spread of the reference's last 50 estimates
    std::array<GainTrace, 3> traces;
    std::array<Vec, 3> errors;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::string instance_label;
    std::vector<SeedRun> runs;
    std::string csv; // the exact artifact text, written to config.output if set
};

/**
 * Run the full protocol. The reference value for each seed is the final
 * estimate of a reference_horizon-long limit-discount run, accepted only
 * when its last 50 scalar estimates span at most 1e-5 (otherwise throws
 * SolveError with a diagnostic). Multi-seed runs append mean / lo95 / hi95
 * aggregate rows per algorithm and iteration.
 */
ExperimentResult run_experiment(const ExperimentConfig& config);

/// CSV header: instance,uncertainty,algorithm,seed,iteration,error,
/// one_over_T,one_over_sqrtT. Numeric columns print with fmt_exact so
/// artifacts are byte-reproducible.
std::string experiment_csv(const ExperimentResult& result);

} // namespace rmdp
