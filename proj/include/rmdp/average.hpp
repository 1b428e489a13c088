#pragma once

#include "rmdp/instance.hpp"
#include "rmdp/robust.hpp"
#include "rmdp/types.hpp"

#include <functional>
#include <iosfwd>
#include <stdexcept>

namespace rmdp {

/**
 * Discount schedule gamma_t = omega(t) / omega(t+1) built from a positive
 * increasing weight sequence with omega(t) -> infinity and ratio -> 1.
 * The default omega(t) = t + 1 yields gamma_t = (t+1)/(t+2).
 */
struct DiscountSchedule {
    std::function<Real(long)> omega = [](long t) { return static_cast<Real>(t + 1); };

    Real gamma(long t) const {
        Real a = omega(t), b = omega(t + 1);
        if (!(a > 0.0) || !(b > a))
            throw std::invalid_argument("schedule weights must be positive and increasing");
        return a / b;
    }
};

/// Iteration-by-iteration record of a gain solver run.
struct GainTrace {
    std::string algorithm;      // "limit-discount" | "horizon" | "discount-schedule"
    std::vector<Vec> iterates;  // gain estimate vector at t = 1..T
    Vec scalar_estimates;       // initial-distribution-weighted estimates
    Vec gammas;                 // discount consumed at each iteration (NaN for none)
    Vec final_estimate;
    DetPolicy final_policy;
    bool converged = true;
};

/**
 * Gain through the vanishing-discount limit: at iteration t solve the
 * discounted problem at gamma_t by warm-started strategy iteration and
 * record (1 - gamma_t) * v*_{gamma_t}.
 */
GainTrace solve_limit_discount(const Instance& inst, int iters,
                               const DiscountSchedule& schedule = {});

/// Gain through undiscounted accumulation: v^t is t stacked Bellman sweeps
/// at gamma = 1 and the estimate is v^t / t.
GainTrace solve_long_horizon(const Instance& inst, int iters);

/**
 * Gain through a normalized discounted recursion: each sweep applies
 * max-min of (1 - gamma_t) r + gamma_t v, so the iterate itself estimates
 * the gain. `v0` optionally overrides the zero start.
 */
GainTrace solve_discount_schedule(const Instance& inst, int iters,
                                  const DiscountSchedule& schedule = {},
                                  const Vec* v0 = nullptr);

/// Maximizing policy recorded at the final iteration of a trace.
DetPolicy extract_average_policy(const GainTrace& trace);

/// True when successive gaps of the sequence shrink as a convergent
/// iteration's should (final gap well below the largest observed gap).
bool cauchy_like(const Vec& xs);

struct WorstGainEstimate {
    Real estimate = 0.0;  // last probe, not extrapolated
    Vec probe_values;     // (1 - gamma) * weighted value at each probe
    Vec probe_gammas;
    bool suspect = false; // set when the probe sequence is not Cauchy-like
};

/**
 * Worst-case average gain of a fixed policy, estimated through discounted
 * probes gamma_k = 1 - 2^-k (k = k_min..k_max) with warm-started kernels.
 */
WorstGainEstimate worst_case_gain(const Instance& inst, const RandPolicy& policy,
                                  int k_min = 4, int k_max = 20);

/// Columns: algorithm, iteration, gamma_t, estimate, error_vs_reference.
/// gamma_t is empty for sweeps without one; the error column is written only
/// when a reference value is supplied.
void write_trace_csv(const GainTrace& trace, std::ostream& out,
                     const Real* reference = nullptr);

} // namespace rmdp
