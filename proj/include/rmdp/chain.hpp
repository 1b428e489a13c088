#pragma once

#include "rmdp/instance.hpp"
#include "rmdp/types.hpp"

namespace rmdp {

/// Transition probabilities below this are treated as structural zeros when
/// building the reachability graph for chain decomposition.
inline constexpr Real kStructuralZero = 1e-14;

/// Markov chain induced by a stationary policy and a fixed kernel selection.
struct InducedChain {
    std::vector<Vec> P; // row-stochastic, one row per state
    Vec r;              // expected one-step reward per state
};

/// Build the chain for a randomized policy; `rows` overrides the nominal
/// kernel (layout s * num_actions + a) when the adversary has chosen one.
InducedChain induce_chain(const Instance& inst, const RandPolicy& policy,
                          const std::vector<Vec>* rows = nullptr);

/// Solve (I - gamma P) v = r by dense LU with partial pivoting plus iterative
/// refinement, keeping the sup-norm residual near machine precision even at
/// discounts like 1 - 1e-8.
Vec solve_discounted_chain(const std::vector<Vec>& P, const Vec& r, Real gamma);

struct ChainClasses {
    std::vector<std::vector<int>> recurrent; // closed classes, states ascending
    std::vector<int> class_of;               // index into `recurrent`, -1 if transient
};

/// Exact decomposition into recurrent classes and transient states.
ChainClasses chain_classes(const std::vector<Vec>& P);

/**
 * Long-run average reward per start state, exact for multichain structure:
 * a stationary distribution per recurrent class gives the class gain, and
 * transient states mix class gains with their absorption probabilities.
 */
Vec average_gain(const std::vector<Vec>& P, const Vec& r);

Real discounted_return(const Instance& inst, const RandPolicy& policy, Real gamma,
                       const std::vector<Vec>* rows = nullptr);

Real average_return(const Instance& inst, const RandPolicy& policy,
                    const std::vector<Vec>* rows = nullptr);

} // namespace rmdp
