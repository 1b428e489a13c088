#include "rmdp/gallery.hpp"

#include "rmdp/chain.hpp"
#include "rmdp/rng.hpp"
#include "rmdp/robust.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rmdp {

namespace {

Instance blank(int S, int A, const std::string& name) {
    Instance inst;
    inst.num_states = S;
    inst.num_actions = A;
    inst.name = name;
    inst.rewards.assign(static_cast<std::size_t>(S) * A, Vec(S, 0.0));
    inst.nominal.assign(static_cast<std::size_t>(S) * A, Vec(S, 0.0));
    inst.unc.assign(static_cast<std::size_t>(S) * A, Singleton{});
    inst.initial.assign(S, 1.0 / S);
    return inst;
}

void set_row(Instance& inst, int s, int a, const Vec& row) {
    inst.nominal[inst.idx(s, a)] = row;
}

} // namespace

// ---------------------------------------------------------------------------
// Curve chains. States: 0 = live, 1 = absorb at reward -1, 2 = absorb at 0.

namespace {

Instance curve_skeleton(int num_actions, const std::string& name) {
    Instance inst = blank(3, num_actions, name);
    inst.initial = {1.0, 0.0, 0.0};
    for (int a = 0; a < num_actions; ++a) {
        set_row(inst, 0, a, {1.0, 0.0, 0.0});
        set_row(inst, 1, a, {0.0, 1.0, 0.0});
        set_row(inst, 2, a, {0.0, 0.0, 1.0});
        // Occupancy reward: every period spent in state 1 costs 1. Charging
        // the cost on state 1's own outgoing row (rather than on arrival)
        // keeps the closed forms below exact.
        inst.rewards[inst.idx(1, a)] = Vec(3, -1.0);
        inst.unc[inst.idx(1, a)] = Singleton{};
        inst.unc[inst.idx(2, a)] = Singleton{};
    }
    return inst;
}

} // namespace

Instance build_curve_one_action() {
    Instance inst = curve_skeleton(1, "curve_one_action");
    inst.unc[inst.idx(0, 0)] = QuadCurveSet{};
    return inst;
}

Instance build_curve_two_actions(int k_trunc) {
    Instance inst = curve_skeleton(2, "curve_two_actions");
    inst.unc[inst.idx(0, 0)] = make_affine_curve(true, k_trunc);
    inst.unc[inst.idx(0, 1)] = make_affine_curve(false, k_trunc);
    return inst;
}

Real curve_gamma_for_alpha(Real alpha) {
    if (alpha <= 0.0 || alpha >= 0.5)
        throw std::invalid_argument("alpha must lie in (0, 1/2)");
    const Real u = alpha / (1.0 - alpha); // sqrt(1 - gamma)
    return 1.0 - u * u;
}

Real curve_worst_alpha(Real gamma) {
    if (gamma <= 0.0 || gamma >= 1.0)
        throw std::invalid_argument("gamma must lie in (0, 1)");
    return (std::sqrt(1.0 - gamma) - (1.0 - gamma)) / gamma;
}

Real curve_normalized_value(Real gamma) {
    if (gamma <= 0.0 || gamma >= 1.0)
        throw std::invalid_argument("gamma must lie in (0, 1)");
    const Real u = std::sqrt(1.0 - gamma);
    return -(1.0 - 2.0 * u + (1.0 - gamma)) / gamma;
}

std::vector<FlipProbe> optimal_action_flip_points(int k_max) {
    std::vector<FlipProbe> out;
    Instance inst = build_curve_two_actions();
    for (int k = 1; k <= k_max; ++k) {
        FlipProbe probe;
        probe.k = k;
        probe.gamma_first = curve_gamma_for_alpha(1.0 / (2.0 * k + 1.0));
        probe.gamma_second = curve_gamma_for_alpha(1.0 / (2.0 * k + 2.0));
        for (int which = 0; which < 2; ++which) {
            const Real gamma = which == 0 ? probe.gamma_first : probe.gamma_second;
            Vec v = robust_value_iteration(inst, gamma, 1e-10).value;
            // Compare the two actions' one-step worst-case values at the
            // converged fixed point; epsilon-greedy ties would hide the gap.
            Vec w(3);
            for (int t = 0; t < 3; ++t)
                w[t] = inst.rewards[inst.idx(0, 0)][t] + gamma * v[t];
            const Real q0 = worst_case(inst.unc[inst.idx(0, 0)],
                                       inst.nominal[inst.idx(0, 0)], w).value;
            for (int t = 0; t < 3; ++t)
                w[t] = inst.rewards[inst.idx(0, 1)][t] + gamma * v[t];
            const Real q1 = worst_case(inst.unc[inst.idx(0, 1)],
                                       inst.nominal[inst.idx(0, 1)], w).value;
            const int winner = q0 >= q1 ? 0 : 1;
            const Real margin = std::fabs(q0 - q1);
            if (which == 0) {
                probe.winner_first = winner;
                probe.margin_first = margin;
            } else {
                probe.winner_second = winner;
                probe.margin_second = margin;
            }
        }
        out.push_back(probe);
    }
    return out;
}

CurveSolveResult solve_curve_one_action(Real gamma, Real tol) {
    Instance inst = build_curve_one_action();
    SolveReport report = robust_value_iteration(inst, gamma, tol);
    CurveSolveResult out;
    // The worst row is (1-a, b, a-b); the mixing weight is the mass leaving
    // the start state.
    out.alpha = 1.0 - report.worst_rows[inst.idx(0, 0)][0];
    out.normalized_value = (1.0 - gamma) * dot(inst.initial, report.value);
    out.iterations = report.iterations;
    return out;
}

// ---------------------------------------------------------------------------
// Quit-or-loop chain. States: 0 and 1 are live with identical dynamics,
// 2 = absorb at reward 0, 3 = absorb at reward 1. Action 0 (quit) ends the
// game: -> state 2 w.p. 1-p, -> state 3 w.p. p. Action 1 (loop) keeps it
// alive: -> state 0 w.p. 1-p paying 1 on arrival, -> state 1 w.p. p paying
// nothing. Quitting with any positive stationary rate eventually quits, so
// the stationary average jumps from 1-p at quit rate 0 to p at any positive
// rate; no stationary policy guards both sides at once.

Instance build_loop_or_quit(Real p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0, 1]");
    Instance inst = blank(4, 2, "loop_or_quit");
    inst.initial = {1.0, 0.0, 0.0, 0.0};
    for (int s = 0; s < 4; ++s) {
        for (int a = 0; a < 2; ++a) {
            // Arrival pays 1 at state 0 and at the absorbing state 3.
            inst.rewards[inst.idx(s, a)] = {1.0, 0.0, 0.0, 1.0};
        }
    }
    for (int a = 0; a < 2; ++a) {
        set_row(inst, 2, a, {0.0, 0.0, 1.0, 0.0});
        set_row(inst, 3, a, {0.0, 0.0, 0.0, 1.0});
    }
    for (int s = 0; s < 2; ++s) {
        set_row(inst, s, 0, {0.0, 0.0, 1.0 - p, p});
        set_row(inst, s, 1, {1.0 - p, p, 0.0, 0.0});
    }
    return inst;
}

namespace {

// Stationary policy that plays action 0 w.p. x in every live state; the
// absorbing tail states get the (irrelevant) first action.
RandPolicy two_action_mix(int num_states, int num_live, Real x) {
    RandPolicy policy(num_states, Vec{1.0, 0.0});
    for (int s = 0; s < num_live; ++s) policy[s] = {x, 1.0 - x};
    return policy;
}

} // namespace

Real loop_or_quit_average(Real quit_prob, Real p) {
    Instance inst = build_loop_or_quit(p);
    return average_return(inst, two_action_mix(4, 2, quit_prob));
}

Real loop_or_quit_discounted(Real quit_prob, Real p, Real gamma) {
    Instance inst = build_loop_or_quit(p);
    return discounted_return(inst, two_action_mix(4, 2, quit_prob), gamma);
}

Real loop_or_quit_split_first_step(Real p) {
    // Quit w.p. 1/2 on the first step, then loop forever. The first-period
    // reward washes out of the Cesaro limit; the average is the mixture of
    // the quit tail (absorbed at the payer w.p. p) and the loop tail's gain,
    // the latter read off the induced chain.
    Instance inst = build_loop_or_quit(p);
    const Real quit_gain = p;
    DetPolicy always_loop = {1, 1, 0, 0};
    InducedChain chain = induce_chain(inst, to_randomized(always_loop, 2));
    const Vec g = average_gain(chain.P, chain.r);
    const Real loop_gain = g[0];
    return 0.5 * quit_gain + 0.5 * loop_gain;
}

BigMatchGridResult loop_or_quit_grid(int points) {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
    Vec grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = static_cast<Real>(i) / (points - 1);

    BigMatchGridResult out;
    for (Real p : grid)
        out.markovian_deviation =
            std::max(out.markovian_deviation,
                     std::fabs(loop_or_quit_split_first_step(p) - 0.5));

    // One chain evaluation per (quit rate, adversary) pair; both orders of
    // optimization read off the same table.
    std::vector<Vec> table(points, Vec(points));
    for (int xi = 0; xi < points; ++xi)
        for (int pi = 0; pi < points; ++pi)
            table[xi][pi] = loop_or_quit_average(grid[xi], grid[pi]);

    out.stationary_maxmin = -std::numeric_limits<Real>::infinity();
    for (int xi = 0; xi < points; ++xi) {
        Real worst = *std::min_element(table[xi].begin(), table[xi].end());
        out.stationary_maxmin = std::max(out.stationary_maxmin, worst);
    }
    out.minmax = std::numeric_limits<Real>::infinity();
    for (int pi = 0; pi < points; ++pi) {
        Real best = -std::numeric_limits<Real>::infinity();
        for (int xi = 0; xi < points; ++xi) best = std::max(best, table[xi][pi]);
        out.minmax = std::min(out.minmax, best);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Escape chain. States: 0 = live, 1 = absorb at 0, 2 = absorb at 1.

Instance build_escape_or_wait(Real p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0, 1]");
    Instance inst = blank(3, 2, "escape_or_wait");
    inst.initial = {1.0, 0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
        set_row(inst, 1, a, {0.0, 1.0, 0.0});
        set_row(inst, 2, a, {0.0, 0.0, 1.0});
        for (int s = 0; s < 3; ++s) inst.rewards[inst.idx(s, a)][2] = 1.0;
    }
    // Action 0 (try): absorb at 0 w.p. 1-p, at 1 w.p. p.
    set_row(inst, 0, 0, {0.0, 1.0 - p, p});
    // Action 1 (wait): stay w.p. p, escape to the 1-absorber w.p. 1-p.
    set_row(inst, 0, 1, {p, 0.0, 1.0 - p});
    return inst;
}

Real escape_or_wait_average(Real try_prob, Real p) {
    Instance inst = build_escape_or_wait(p);
    return average_return(inst, two_action_mix(3, 1, try_prob));
}

Real escape_or_wait_worst(Real try_prob, int points) {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
    Real worst = std::numeric_limits<Real>::infinity();
    for (int i = 0; i < points; ++i) {
        Real p = static_cast<Real>(i) / (points - 1);
        worst = std::min(worst, escape_or_wait_average(try_prob, p));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Cash-or-gamble chain. States: 0 = live, 1 = absorb at 1, 2 = absorb at 0.

Instance build_cash_or_gamble(Real p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0, 1]");
    Instance inst = blank(3, 2, "cash_or_gamble");
    inst.initial = {1.0, 0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
        set_row(inst, 1, a, {0.0, 1.0, 0.0});
        set_row(inst, 2, a, {0.0, 0.0, 1.0});
        // The 1-absorber pays on every visit, including arrival.
        for (int s = 0; s < 3; ++s) inst.rewards[inst.idx(s, a)][1] = 1.0;
    }
    // Gamble: reach the paying absorber w.p. p, the dead one otherwise.
    set_row(inst, 0, 0, {0.0, p, 1.0 - p});
    // Cash: collect 1 now w.p. p (then nothing), else fall into the payer.
    set_row(inst, 0, 1, {0.0, 1.0 - p, p});
    inst.rewards[inst.idx(0, 1)] = {0.0, 0.0, 1.0};
    return inst;
}

Real cash_or_gamble_return(Real x, Real p, Real gamma) {
    if (gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("gamma must lie in [0, 1)");
    const Real tail = gamma / (1.0 - gamma);
    return x * p * (1.0 + tail) + (1.0 - x) * (p + (1.0 - p) * tail);
}

Real cash_or_gamble_worst_mix(Real gamma) {
    if (gamma < 0.5 || gamma >= 1.0)
        throw std::invalid_argument("gamma must lie in [1/2, 1)");
    return 1.0 - 1.0 / (2.0 * gamma);
}

Real cash_or_gamble_grid_best_mix(Real gamma, int points) {
    if (points < 2) throw std::invalid_argument("grid needs at least 2 points");
    Real best_x = 0.0;
    Real best = -std::numeric_limits<Real>::infinity();
    for (int i = 0; i < points; ++i) {
        Real x = static_cast<Real>(i) / (points - 1);
        Real worst = std::min(cash_or_gamble_return(x, 0.0, gamma),
                              cash_or_gamble_return(x, 1.0, gamma));
        if (worst > best) {
            best = worst;
            best_x = x;
        }
    }
    return best_x;
}

// ---------------------------------------------------------------------------
// Benchmark families.

Instance build_forest(int num_states, Real fire_prob) {
    if (num_states < 2) throw std::invalid_argument("forest needs >= 2 states");
    if (fire_prob < 0.0 || fire_prob > 1.0)
        throw std::invalid_argument("fire_prob must lie in [0, 1]");
    Instance inst = blank(num_states, 2, "forest");
    const int S = num_states;
    for (int s = 0; s < S; ++s) {
        // Action 0 (wait): advance one age class, or burn down to class 0.
        Vec wait(S, 0.0);
        const int next = std::min(s + 1, S - 1);
        wait[0] += fire_prob;
        wait[next] += 1.0 - fire_prob;
        set_row(inst, s, 0, wait);
        if (s == S - 1)
            for (int t = 0; t < S; ++t)
                inst.rewards[inst.idx(s, 0)][t] = 4.0; // mature stand payoff
        // Action 1 (cut): clear-cut back to the youngest class.
        Vec cut(S, 0.0);
        cut[0] = 1.0;
        set_row(inst, s, 1, cut);
        Real timber = 0.0;
        if (s == S - 1) timber = 2.0;
        else if (s >= 1) timber = 1.0;
        for (int t = 0; t < S; ++t) inst.rewards[inst.idx(s, 1)][t] = timber;
    }
    return inst;
}

Instance build_machine(int num_states) {
    if (num_states < 3) throw std::invalid_argument("machine needs >= 3 states");
    Instance inst = blank(num_states, 2, "machine");
    const int S = num_states;
    const int worst = S - 3;          // most degraded operative state
    const int repair_std = S - 2;     // one-period repair
    const int repair_long = S - 1;    // slow repair
    // Per-state operating costs, entering as negative arrival rewards.
    Vec cost(S, 0.0);
    cost[worst] = -20.0;
    cost[repair_std] = -2.0;
    cost[repair_long] = -10.0;
    for (int s = 0; s <= worst; ++s) {
        // Action 0 (run): hold w.p. 0.8, deteriorate w.p. 0.2; the worst
        // operative state is absorbing under run.
        Vec run(S, 0.0);
        if (s == worst) {
            run[worst] = 1.0;
        } else {
            run[s] = 0.8;
            run[s + 1] = 0.2;
        }
        set_row(inst, s, 0, run);
        // Action 1 (repair): standard shop w.p. 0.8, long shop w.p. 0.2.
        Vec rep(S, 0.0);
        rep[repair_std] = 0.8;
        rep[repair_long] = 0.2;
        set_row(inst, s, 1, rep);
    }
    for (int a = 0; a < 2; ++a) {
        // Standard repair finishes in one period.
        Vec done(S, 0.0);
        done[0] = 1.0;
        set_row(inst, repair_std, a, done);
        // Long repair drags on w.p. 0.6.
        Vec slow(S, 0.0);
        slow[repair_long] = 0.6;
        slow[0] = 0.4;
        set_row(inst, repair_long, a, slow);
    }
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < 2; ++a)
            inst.rewards[inst.idx(s, a)] = cost;
    return inst;
}

Instance build_healthcare(int num_states) {
    if (num_states < 2) throw std::invalid_argument("healthcare needs >= 2 states");
    Instance inst = blank(num_states, 3, "healthcare");
    const int S = num_states;
    const int death = S - 1; // absorbing; states 0..S-2 are health levels,
                             // 0 = healthiest.
    const Real improve[3] = {0.2, 0.4, 0.6};
    const Real hold = 0.2;
    const Real payoff[3] = {10.0, 8.0, 6.0};
    for (int s = 0; s < death; ++s) {
        for (int a = 0; a < 3; ++a) {
            Vec row(S, 0.0);
            const int better = std::max(s - 1, 0);
            const int worse = std::min(s + 1, death);
            row[better] += improve[a];
            row[s] += hold;
            row[worse] += 1.0 - improve[a] - hold;
            set_row(inst, s, a, row);
            for (int t = 0; t < death; ++t)
                inst.rewards[inst.idx(s, a)][t] = payoff[a];
        }
    }
    for (int a = 0; a < 3; ++a) {
        Vec stay(S, 0.0);
        stay[death] = 1.0;
        set_row(inst, death, a, stay);
    }
    return inst;
}

Instance build_garnet(int num_states, int num_actions, int branch,
                      std::uint64_t seed) {
    if (num_states < 1 || num_actions < 1)
        throw std::invalid_argument("garnet needs positive sizes");
    if (branch < 1 || branch > num_states)
        throw std::invalid_argument("branch must lie in [1, num_states]");
    Instance inst = blank(num_states, num_actions, "garnet");
    Rng rng(seed);
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) {
            const std::size_t sa = inst.idx(s, a);
            std::vector<int> dests =
                rng.sample_without_replacement(num_states, branch);
            Vec weights(branch);
            Real total = 0.0;
            for (int i = 0; i < branch; ++i) {
                weights[i] = rng.exp1();
                total += weights[i];
            }
            Vec row(num_states, 0.0);
            for (int i = 0; i < branch; ++i) row[dests[i]] = weights[i] / total;
            inst.nominal[sa] = row;
            const Real reward = rng.uniform01();
            for (int t = 0; t < num_states; ++t) inst.rewards[sa][t] = reward;
        }
    }
    return inst;
}

void attach_uncertainty(Instance& inst, const std::string& kind, Real radius) {
    const std::size_t n = inst.nominal.size();
    for (std::size_t sa = 0; sa < n; ++sa) {
        const Vec& nom = inst.nominal[sa];
        if (kind == "singleton") {
            inst.unc[sa] = Singleton{};
        } else if (kind == "box") {
            inst.unc[sa] = make_box(nom, radius, radius);
        } else if (kind == "ell2") {
            // Random rows can carry support probabilities below the requested
            // radius; shrink per row so the ball stays inside the simplex and
            // the closed-form oracle stays exact.
            Real cap = largest_feasible_ball_radius(nom);
            inst.unc[sa] = make_ball2(nom, std::min(radius, cap));
        } else {
            throw std::invalid_argument("unknown uncertainty kind: " + kind);
        }
        inst.unc[sa] = apply_support_mask(inst.unc[sa], nom);
    }
}

Instance build_by_id(const std::string& id, const GalleryOptions& opt) {
    if (id == "curve-one-action") return build_curve_one_action();
    if (id == "curve-two-actions" || id == "no-blackwell")
        return build_curve_two_actions();
    if (id == "loop-or-quit" || id == "big-match")
        return build_loop_or_quit(opt.adversary_p);
    if (id == "escape-or-wait")
        return build_escape_or_wait(opt.adversary_p);
    if (id == "cash-or-gamble" || id == "srect-no-blackwell")
        return build_cash_or_gamble(opt.adversary_p);
    if (id == "forest") return build_forest(opt.num_states, opt.fire_prob);
    if (id == "machine") return build_machine(opt.num_states);
    if (id == "healthcare") return build_healthcare(opt.num_states);
    if (id == "garnet")
        return build_garnet(opt.num_states, opt.num_actions, opt.branch, opt.seed);
    throw std::invalid_argument("unknown instance id: " + id);
}

} // namespace rmdp
