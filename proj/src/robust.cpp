#include "rmdp/robust.hpp"

#include "rmdp/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace rmdp {

namespace {

// Shared core of the Bellman sweep. When `incumbent` is given, each state
// keeps its incumbent action unless another action is strictly better than
// the incumbent's worst-case value by more than a rounding allowance.
BellmanResult improvement_sweep(const Instance& inst, const Vec& v, Real gamma,
                                Real reward_scale, const DetPolicy* incumbent) {
    const int S = inst.num_states;
    const int A = inst.num_actions;
    BellmanResult out;
    out.values.assign(S, 0.0);
    out.argmax.assign(S, 0);
    out.worst_rows.assign(static_cast<size_t>(S) * A, Vec());

    Vec w(S, 0.0);
    for (int s = 0; s < S; ++s) {
        Real best = -std::numeric_limits<Real>::infinity();
        int best_a = 0;
        Real incumbent_q = 0;
        for (int a = 0; a < A; ++a) {
            const Vec& rew = inst.reward_row(s, a);
            for (int j = 0; j < S; ++j)
                w[j] = reward_scale * rew[j] + gamma * v[j];
            WorstCase wc = worst_case(inst.set_at(s, a), inst.nominal_row(s, a), w);
            out.worst_rows[inst.idx(s, a)] = std::move(wc.row);
            if (incumbent && a == (*incumbent)[s]) incumbent_q = wc.value;
            if (wc.value > best) { // strict: lowest index wins ties
                best = wc.value;
                best_a = a;
            }
        }
        if (incumbent && incumbent_q >= best - 1e-12 * (1.0 + std::fabs(best)))
            best_a = (*incumbent)[s];
        out.values[s] = best;
        out.argmax[s] = best_a;
    }
    return out;
}

// Smallest residual a sweep can resolve at this value scale. Values grow
// like 1 / (1 - gamma), so a fixed absolute floor would be unreachable at
// discounts close to one.
Real noise_floor(const Vec& v) {
    Real scale = 1.0;
    for (Real x : v) scale = std::max(scale, std::fabs(x));
    return 32.0 * std::numeric_limits<Real>::epsilon() * scale;
}

} // namespace

BellmanResult bellman_apply(const Instance& inst, const Vec& v, Real gamma,
                            Real reward_scale) {
    if (gamma < 0.0 || gamma > 1.0)
        throw std::invalid_argument("bellman sweep needs gamma in [0, 1]");
    if (static_cast<int>(v.size()) != inst.num_states)
        throw std::invalid_argument("value vector length does not match the state count");
    return improvement_sweep(inst, v, gamma, reward_scale, nullptr);
}

BellmanResult policy_bellman_apply(const Instance& inst, const RandPolicy& policy,
                                   const Vec& v, Real gamma, Real reward_scale) {
    const int S = inst.num_states;
    const int A = inst.num_actions;
    BellmanResult out;
    out.values.assign(S, 0.0);
    out.argmax.assign(S, 0);
    out.worst_rows.assign(static_cast<size_t>(S) * A, Vec());

    Vec w(S, 0.0);
    for (int s = 0; s < S; ++s) {
        Real acc = 0;
        for (int a = 0; a < A; ++a) {
            out.worst_rows[inst.idx(s, a)] = inst.nominal_row(s, a);
            if (policy[s][a] <= 0.0) continue;
            const Vec& rew = inst.reward_row(s, a);
            for (int j = 0; j < S; ++j)
                w[j] = reward_scale * rew[j] + gamma * v[j];
            WorstCase wc = worst_case(inst.set_at(s, a), inst.nominal_row(s, a), w);
            acc += policy[s][a] * wc.value;
            out.worst_rows[inst.idx(s, a)] = std::move(wc.row);
        }
        out.values[s] = acc;
    }
    return out;
}

SolveReport robust_value_iteration(const Instance& inst, Real gamma, Real tol,
                                   int max_iters, const Vec* v0) {
    if (gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("value iteration needs gamma in [0, 1)");
    Vec v = v0 ? *v0 : Vec(inst.num_states, 0.0);
    // Step threshold certifying ||v - v*|| <= tol / 2; any step suffices at
    // gamma = 0 because the operator is then constant.
    Real threshold = gamma > 0.0 ? tol * (1.0 - gamma) / (2.0 * gamma)
                                 : std::numeric_limits<Real>::infinity();
    SolveReport report;
    int k = 0;
    for (; k < max_iters; ++k) {
        BellmanResult step = bellman_apply(inst, v, gamma);
        Real delta = sup_dist(step.values, v);
        v = std::move(step.values);
        if (delta <= threshold) {
            report.converged = true;
            ++k;
            break;
        }
    }
    BellmanResult final = bellman_apply(inst, v, gamma);
    report.residual = sup_dist(final.values, v);
    report.value = std::move(v);
    report.policy = std::move(final.argmax);
    report.worst_rows = std::move(final.worst_rows);
    report.iterations = k;
    return report;
}

EvalReport robust_policy_eval(const Instance& inst, const RandPolicy& policy,
                              Real gamma, Real residual_tol,
                              const std::vector<Vec>* warm_rows, int max_rounds) {
    const int S = inst.num_states;
    const int A = inst.num_actions;
    std::vector<Vec> rows = warm_rows ? *warm_rows : inst.nominal;

    EvalReport report;
    Vec w(S, 0.0), tv(S, 0.0);
    for (int round = 1; round <= max_rounds; ++round) {
        InducedChain chain = induce_chain(inst, policy, &rows);
        Vec v = solve_discounted_chain(chain.P, chain.r, gamma);

        // Adversary improvement: keep the current row unless strictly beaten.
        bool changed = false;
        std::fill(tv.begin(), tv.end(), 0.0);
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < A; ++a) {
                if (policy[s][a] <= 0.0) continue;
                const Vec& rew = inst.reward_row(s, a);
                for (int j = 0; j < S; ++j)
                    w[j] = rew[j] + gamma * v[j];
                WorstCase wc = worst_case(inst.set_at(s, a), inst.nominal_row(s, a), w);
                tv[s] += policy[s][a] * wc.value;
                Real held = dot(rows[inst.idx(s, a)], w);
                if (held > wc.value + 1e-12 * (1.0 + std::fabs(wc.value))) {
                    rows[inst.idx(s, a)] = std::move(wc.row);
                    changed = true;
                }
            }
        }
        report.residual = sup_dist(tv, v);
        report.value = std::move(v);
        report.iterations = round;
        if (report.residual <= residual_tol || !changed) {
            report.converged = true;
            break;
        }
    }

    if (!report.converged) {
        // The row selection cycled without settling: fall back to fixed-policy
        // value iteration, which contracts at rate gamma. After an update
        // v' = Tv with step delta = ||v' - v||, the residual of v' is at most
        // gamma * delta, so stopping on the step certifies the requested
        // residual directly; the noise floor keeps the loop from chasing a
        // tolerance below what a sweep can resolve.
        Vec v = std::move(report.value);
        long budget = 500000;
        for (long i = 0; i < budget; ++i) {
            BellmanResult step = policy_bellman_apply(inst, policy, v, gamma);
            Real delta = sup_dist(step.values, v);
            v = std::move(step.values);
            if (delta <= std::max(residual_tol * 0.5, noise_floor(v))) break;
        }
        BellmanResult final = policy_bellman_apply(inst, policy, v, gamma);
        report.residual = sup_dist(final.values, v);
        report.value = std::move(v);
        rows = std::move(final.worst_rows);
        report.converged = report.residual <= residual_tol;
    }
    report.worst_rows = std::move(rows);
    return report;
}

SolveReport strategy_iteration(const Instance& inst, Real gamma, Real residual_tol,
                               const DetPolicy* start, const std::vector<Vec>* warm_rows,
                               int max_rounds) {
    if (gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("strategy iteration needs gamma in [0, 1)");
    const Vec zeros(inst.num_states, 0.0);
    DetPolicy pi = start ? *start : bellman_apply(inst, zeros, gamma).argmax;
    std::vector<Vec> rows = warm_rows ? *warm_rows : inst.nominal;
    // The convergence test below compares an improvement sweep against the
    // evaluated value, so the evaluation only needs a residual a notch below
    // the caller's; anything tighter wastes inner iterations.
    Real eval_tol = residual_tol / 4.0;

    std::set<DetPolicy> visited;
    SolveReport report;
    for (int round = 1; round <= max_rounds; ++round) {
        EvalReport eval =
            robust_policy_eval(inst, to_randomized(pi, inst.num_actions), gamma,
                               eval_tol, &rows, 200);
        BellmanResult sweep = improvement_sweep(inst, eval.value, gamma, 1.0, &pi);
        report.residual = sup_dist(sweep.values, eval.value);
        report.iterations = round;
        report.value = std::move(eval.value);
        rows = std::move(sweep.worst_rows);

        if (sweep.argmax == pi) {
            if (report.residual <= residual_tol) {
                report.converged = true;
                report.policy = std::move(pi);
                report.worst_rows = std::move(rows);
                return report;
            }
            // Policy is stable but the evaluation was loose: tighten it, but
            // never past the rounding noise of the current value scale.
            eval_tol = std::max(eval_tol / 10.0, noise_floor(report.value));
            continue;
        }
        if (report.residual <= residual_tol) {
            report.converged = true;
            report.policy = std::move(sweep.argmax);
            report.worst_rows = std::move(rows);
            return report;
        }
        if (!visited.insert(pi).second) {
            // Revisited a policy without meeting the tolerance: break the
            // cycle with plain value iteration from the current value. Value
            // iteration's tolerance bounds the value error, but only a
            // residual at the caller's tolerance is needed here, so relax it
            // by the 1 / (1 - gamma) gap between the two certificates.
            SolveReport vi = robust_value_iteration(
                inst, gamma, residual_tol / std::max(1e-300, 1.0 - gamma),
                1000000, &report.value);
            vi.iterations += round;
            return vi;
        }
        pi = std::move(sweep.argmax);
    }
    report.policy = std::move(pi);
    report.worst_rows = std::move(rows);
    report.converged = false;
    return report;
}

} // namespace rmdp
