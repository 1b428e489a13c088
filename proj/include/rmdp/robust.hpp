#pragma once

#include "rmdp/instance.hpp"
#include "rmdp/types.hpp"

#include <stdexcept>

namespace rmdp {

/// Raised when an iterative solver exhausts its budget without meeting its
/// tolerance; the CLI maps it to a dedicated exit code.
struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BellmanResult {
    Vec values;                  // one application of the max-min operator
    DetPolicy argmax;            // maximizing action per state, lowest index on ties
    std::vector<Vec> worst_rows; // minimizing row per (s, a), layout s*A + a
};

/**
 * One sweep of the worst-case Bellman operator:
 *   out[s] = max_a min_{p in U_sa} sum_j p_j (reward_scale * r_saj + gamma * v_j).
 * gamma = 1 is allowed (undiscounted accumulation); reward_scale supports the
 * normalized update (1 - gamma) * r + gamma * v used by discount schedules.
 */
BellmanResult bellman_apply(const Instance& inst, const Vec& v, Real gamma,
                            Real reward_scale = 1.0);

/// Same operator with the action distribution fixed by a policy.
BellmanResult policy_bellman_apply(const Instance& inst, const RandPolicy& policy,
                                   const Vec& v, Real gamma, Real reward_scale = 1.0);

/**
 * Worst-case value iteration. Stops when the sup-norm step falls below
 * tol * (1 - gamma) / (2 gamma), which certifies ||v - v*|| <= tol / 2, or
 * after max_iters sweeps (converged = false).
 */
SolveReport robust_value_iteration(const Instance& inst, Real gamma, Real tol = 1e-9,
                                   int max_iters = 1000000, const Vec* v0 = nullptr);

struct EvalReport {
    Vec value;
    std::vector<Vec> worst_rows;
    int iterations = 0; // adversary improvement rounds
    Real residual = 0.0;
    bool converged = false;
};

/**
 * Robust value of a fixed policy: alternate exact evaluation of the current
 * kernel selection with per-(s, a) worst-case improvement, keeping the
 * previous row whenever it is still minimizing. Warm-startable through
 * `warm_rows`. Falls back to fixed-policy value iteration if the row
 * selection cycles without meeting `residual_tol`.
 */
EvalReport robust_policy_eval(const Instance& inst, const RandPolicy& policy,
                              Real gamma, Real residual_tol = 1e-10,
                              const std::vector<Vec>* warm_rows = nullptr,
                              int max_rounds = 200);

/**
 * Two-player strategy iteration for the worst-case discounted problem:
 * robust policy evaluation alternating with greedy improvement that keeps
 * the incumbent action whenever possible. `residual_tol` bounds the optimal
 * Bellman residual of the returned value. A bounded policy-revisit guard
 * falls back to value iteration should the improvement ever cycle.
 */
SolveReport strategy_iteration(const Instance& inst, Real gamma,
                               Real residual_tol = 1e-10,
                               const DetPolicy* start = nullptr,
                               const std::vector<Vec>* warm_rows = nullptr,
                               int max_rounds = 500);

} // namespace rmdp
