#include "rmdp/average.hpp"

#include "rmdp/chain.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace rmdp {

namespace {
const Real kNaN = std::numeric_limits<Real>::quiet_NaN();
}

GainTrace solve_limit_discount(const Instance& inst, int iters,
                               const DiscountSchedule& schedule) {
    GainTrace trace;
    trace.algorithm = "limit-discount";
    trace.iterates.reserve(iters);

    DetPolicy pi;
    std::vector<Vec> rows;
    for (int t = 1; t <= iters; ++t) {
        Real gamma = schedule.gamma(t - 1);
        // A Bellman residual of rho certifies a value error of rho / (1 - gamma),
        // so the normalized estimate (1 - gamma) * v is accurate to rho no matter
        // how close gamma gets to 1. Asking for rho below the floating-point
        // floor of the residual itself (about n * eps * ||v||) would spin the
        // solver, so the tolerance stays an absolute residual.
        Real residual_tol = std::min(1e-8, (1.0 - gamma) * 1e-4);
        SolveReport solve = strategy_iteration(
            inst, gamma, residual_tol, pi.empty() ? nullptr : &pi,
            rows.empty() ? nullptr : &rows);
        if (!solve.converged) trace.converged = false;
        pi = solve.policy;
        rows = std::move(solve.worst_rows);

        Vec estimate(inst.num_states);
        for (int s = 0; s < inst.num_states; ++s)
            estimate[s] = (1.0 - gamma) * solve.value[s];
        trace.scalar_estimates.push_back(dot(inst.initial, estimate));
        trace.gammas.push_back(gamma);
        trace.iterates.push_back(std::move(estimate));
    }
    if (!trace.iterates.empty()) {
        trace.final_estimate = trace.iterates.back();
        trace.final_policy = pi;
    }
    return trace;
}

GainTrace solve_long_horizon(const Instance& inst, int iters) {
    GainTrace trace;
    trace.algorithm = "horizon";
    trace.iterates.reserve(iters);

    Vec v(inst.num_states, 0.0);
    DetPolicy last_policy;
    for (int t = 1; t <= iters; ++t) {
        BellmanResult step = bellman_apply(inst, v, 1.0);
        v = std::move(step.values);
        last_policy = std::move(step.argmax);

        Vec estimate(inst.num_states);
        for (int s = 0; s < inst.num_states; ++s)
            estimate[s] = v[s] / static_cast<Real>(t);
        trace.scalar_estimates.push_back(dot(inst.initial, estimate));
        trace.gammas.push_back(kNaN);
        trace.iterates.push_back(std::move(estimate));
    }
    if (!trace.iterates.empty()) {
        trace.final_estimate = trace.iterates.back();
        trace.final_policy = last_policy;
    }
    return trace;
}

GainTrace solve_discount_schedule(const Instance& inst, int iters,
                                  const DiscountSchedule& schedule, const Vec* v0) {
    GainTrace trace;
    trace.algorithm = "discount-schedule";
    trace.iterates.reserve(iters);

    Vec v = v0 ? *v0 : Vec(inst.num_states, 0.0);
    DetPolicy last_policy;
    for (int t = 1; t <= iters; ++t) {
        Real gamma = schedule.gamma(t - 1);
        BellmanResult step = bellman_apply(inst, v, gamma, 1.0 - gamma);
        v = std::move(step.values);
        last_policy = std::move(step.argmax);

        trace.scalar_estimates.push_back(dot(inst.initial, v));
        trace.gammas.push_back(gamma);
        trace.iterates.push_back(v);
    }
    if (!trace.iterates.empty()) {
        trace.final_estimate = trace.iterates.back();
        trace.final_policy = last_policy;
    }
    return trace;
}

DetPolicy extract_average_policy(const GainTrace& trace) {
    if (trace.final_policy.empty())
        throw std::invalid_argument("trace carries no policy (empty run?)");
    return trace.final_policy;
}

bool cauchy_like(const Vec& xs) {
    if (xs.size() < 3) return true;
    Real max_gap = 0, last_gap = 0;
    for (size_t i = 1; i < xs.size(); ++i) {
        Real gap = std::fabs(xs[i] - xs[i - 1]);
        max_gap = std::max(max_gap, gap);
        last_gap = gap;
    }
    if (max_gap <= 1e-12) return true; // flat to rounding noise
    return last_gap <= 0.25 * max_gap + 1e-12;
}

WorstGainEstimate worst_case_gain(const Instance& inst, const RandPolicy& policy,
                                  int k_min, int k_max) {
    if (k_min < 1 || k_max < k_min)
        throw std::invalid_argument("bad probe exponent range");
    WorstGainEstimate out;
    std::vector<Vec> rows;
    for (int k = k_min; k <= k_max; ++k) {
        Real gamma = 1.0 - std::pow(2.0, -k);
        // Residual tolerance scaled so the normalized probe value is good to
        // about 1e-12; a fixed absolute residual would be unreachable once
        // values grow like 1 / (1 - gamma).
        EvalReport eval = robust_policy_eval(inst, policy, gamma,
                                             1e-12 / (1.0 - gamma),
                                             rows.empty() ? nullptr : &rows, 200);
        rows = std::move(eval.worst_rows);
        out.probe_gammas.push_back(gamma);
        out.probe_values.push_back((1.0 - gamma) * dot(inst.initial, eval.value));
    }
    out.estimate = out.probe_values.back();
    out.suspect = !cauchy_like(out.probe_values);
    return out;
}

void write_trace_csv(const GainTrace& trace, std::ostream& out, const Real* reference) {
    out << "algorithm,iteration,gamma_t,estimate,error_vs_reference\n";
    for (size_t t = 0; t < trace.iterates.size(); ++t) {
        out << trace.algorithm << ',' << (t + 1) << ',';
        if (!std::isnan(trace.gammas[t])) out << fmt_exact(trace.gammas[t]);
        out << ',' << fmt_exact(trace.scalar_estimates[t]) << ',';
        if (reference) out << fmt_exact(std::fabs(*reference - trace.scalar_estimates[t]));
        out << '\n';
    }
}

} // namespace rmdp
