#pragma once

#include "rmdp/instance.hpp"
#include "rmdp/types.hpp"

#include <cstdint>

namespace rmdp {

/**
 * Hand-built benchmark and counterexample instances.
 *
 * The three-state curve instances (curve_one_action, curve_two_actions) carry
 * the parametric uncertainty sets on their first state; the two-player chains
 * (loop_or_quit, escape_or_wait, cash_or_gamble) are exposed as evaluators
 * parameterized by the adversary scalar p because their uncertainty couples
 * actions within a state and does not fit per-(s, a) sets.
 */

// ---------------------------------------------------------------------------
// Three-state chains with curve uncertainty on the first state.

/// One action; feasible rows (1-a, b, a-b) with b <= a(1-a); destinations:
/// stay, absorb at reward -1, absorb at reward 0.
Instance build_curve_one_action();

/// Two actions with piecewise-affine bound curves interpolated at even
/// reciprocal breakpoints (action 0) and odd ones (action 1).
Instance build_curve_two_actions(int k_trunc = 64);

/// Discount at which the one-action chain's worst-case mixing weight equals
/// `alpha`: inverts alpha = (sqrt(1-g) - (1-g)) / g in closed form.
Real curve_gamma_for_alpha(Real alpha);

/// Worst-case mixing weight of the one-action chain at discount gamma.
Real curve_worst_alpha(Real gamma);

/// Normalized worst-case value (1 - gamma) * v(s0) of the one-action chain.
Real curve_normalized_value(Real gamma);

/// One-action curve chain solved with robust value iteration: the adversary's
/// mixing weight read off the converged worst-case row, plus the normalized
/// initial value. Cross-checks the two closed forms above.
struct CurveSolveResult {
    Real alpha = 0.0;
    Real normalized_value = 0.0;
    int iterations = 0;
};
CurveSolveResult solve_curve_one_action(Real gamma, Real tol = 1e-9);

struct FlipProbe {
    int k = 0;
    Real gamma_first = 0;   // probe where action 0 should win
    Real gamma_second = 0;  // next probe where action 1 should win
    int winner_first = -1;  // computed winners (0 or 1)
    int winner_second = -1;
    Real margin_first = 0;  // |value gap| at each probe
    Real margin_second = 0;
};

/// Discounted-winner alternation of the two-action curve chain along the
/// interleaved breakpoint probes, computed with the robust solver.
std::vector<FlipProbe> optimal_action_flip_points(int k_max);

// ---------------------------------------------------------------------------
// Two-player chains exposed as evaluators in the adversary scalar p.

/// Quit-or-loop chain: action 0 ends the game (absorb at reward 0 w.p. 1-p,
/// at reward 1 w.p. p); action 1 keeps it alive, paying 1 w.p. 1-p each
/// period. Both live states share the dynamics.
Instance build_loop_or_quit(Real p);

/// Exact evaluation of the stationary policy that quits w.p. `quit_prob` in
/// every live period, through the induced-chain solvers.
Real loop_or_quit_average(Real quit_prob, Real p);
Real loop_or_quit_discounted(Real quit_prob, Real p, Real gamma);

/// Exact average value of the policy that randomizes 50/50 on the first step
/// and then always loops; equals 1/2 for every p.
Real loop_or_quit_split_first_step(Real p);

/// Grid scan of the quit-or-loop chain over `points`-point grids of both the
/// stationary quit rate and the adversary parameter. The split-first-step
/// policy guarantees 1/2, stationary policies guarantee nothing, and the
/// adversary cannot push stationary best replies below 1/2.
struct BigMatchGridResult {
    Real markovian_deviation = 0.0; // max |split-first-step value - 1/2|
    Real stationary_maxmin = 0.0;   // max_x min_p of the stationary average
    Real minmax = 0.0;              // min_p max_x of the stationary average
};
BigMatchGridResult loop_or_quit_grid(int points = 101);

/// Escape chain: action 0 absorbs (reward-0 state w.p. 1-p, reward-1 w.p. p);
/// action 1 stays w.p. p and escapes to the reward-1 absorber w.p. 1-p.
Instance build_escape_or_wait(Real p);

Real escape_or_wait_average(Real try_prob, Real p);

/// Worst average of the stationary try-rate policy over a `points`-point
/// adversary grid; approaches 1 - try_prob from below as the grid refines.
Real escape_or_wait_worst(Real try_prob, int points = 101);

/// Cash-or-gamble chain behind the closed-form return
/// R(x, p) = x p (1 + g/(1-g)) + (1-x) (p + (1-p) g/(1-g)).
Instance build_cash_or_gamble(Real p);

Real cash_or_gamble_return(Real x, Real p, Real gamma);

/// Maximin mixing weight x*(gamma) = 1 - 1/(2 gamma) for gamma >= 1/2.
Real cash_or_gamble_worst_mix(Real gamma);

/// Grid argmax over mixing weights of the worst-case return at `gamma`; the
/// return is affine in the adversary parameter, so its endpoints suffice.
Real cash_or_gamble_grid_best_mix(Real gamma, int points = 1001);

// ---------------------------------------------------------------------------
// Benchmark families (uniform initial distribution).

/// Aging forest: wait advances the age class but risks a reset to the
/// youngest class with probability fire_prob; harvesting resets surely.
Instance build_forest(int num_states, Real fire_prob = 0.1);

/// Machine maintenance: waiting lets the condition deteriorate toward the
/// worst operative state; repairing routes through a cheap or a long repair
/// state. Costs enter as negative rewards.
Instance build_machine(int num_states);

/// Treatment intensity: stronger treatment recovers more often but pays a
/// lower per-period reward; the worst health state can tip into an absorbing
/// mortality state.
Instance build_healthcare(int num_states);

/// Random instance: `branch` distinct successors per (s, a) with normalized
/// exponential weights and uniform rewards; bit-reproducible per seed.
Instance build_garnet(int num_states, int num_actions, int branch, std::uint64_t seed);

/// Attach one uncertainty set per (s, a): kind is "singleton", "box"
/// (radius = both box radii) or "ell2". Support masks are applied, and ell2
/// radii are clamped per row to keep each ball inside the simplex.
void attach_uncertainty(Instance& inst, const std::string& kind, Real radius);

/// Build a gallery or benchmark instance by its CLI identifier.
struct GalleryOptions {
    int num_states = 20;
    int num_actions = 5;       // garnet only
    int branch = 10;           // garnet only
    std::uint64_t seed = 0;    // garnet only
    Real adversary_p = 0.5;    // two-player chains
    Real fire_prob = 0.1;      // forest
};
Instance build_by_id(const std::string& id, const GalleryOptions& opt = {});

} // namespace rmdp
