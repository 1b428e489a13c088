#pragma once

#include "rmdp/types.hpp"
#include "rmdp/uncertainty.hpp"

namespace rmdp {

/**
 * Finite state-action decision process with one uncertainty set per (s, a).
 * Rewards are transition-based: rewards[s*A + a][s'] is earned when the chain
 * moves from s to s' under a. The nominal kernel doubles as the center or
 * reference point of each uncertainty set.
 */
struct Instance {
    int num_states = 0;
    int num_actions = 0;
    std::vector<Vec> rewards; // [s * num_actions + a], one entry per destination
    std::vector<Vec> nominal; // same layout, rows on the probability simplex
    Vec initial;              // distribution over states
    std::vector<UncertaintySet> unc;
    std::string name;

    int idx(int s, int a) const { return s * num_actions + a; }
    const Vec& reward_row(int s, int a) const { return rewards[idx(s, a)]; }
    const Vec& nominal_row(int s, int a) const { return nominal[idx(s, a)]; }
    const UncertaintySet& set_at(int s, int a) const { return unc[idx(s, a)]; }
};

/// Structural checks: shapes, finite rewards, rows and the initial
/// distribution on the simplex within 1e-12. Throws std::invalid_argument.
void validate(const Instance& inst);

/// States that cannot be reached from the support of the initial distribution
/// under the nominal kernel (any action). Informational, not an error.
std::vector<int> unreachable_states(const Instance& inst);

struct RewardScaling {
    Real shift = 0.0;
    Real scale = 1.0; // normalized = (reward - shift) / scale
};

/// Affinely map all rewards onto [0, 1]; returns the applied transform.
RewardScaling normalize_rewards(Instance& inst);

} // namespace rmdp
