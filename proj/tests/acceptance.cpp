// Acceptance gate: every release-blocking check in one binary. Each criterion
// prints exactly one PASS/FAIL line; the process exits nonzero if any fails.
#include "oracles.hpp"
#include "rmdp/average.hpp"
#include "rmdp/chain.hpp"
#include "rmdp/experiment.hpp"
#include "rmdp/gallery.hpp"
#include "rmdp/json_io.hpp"
#include "rmdp/robust.hpp"
#include "rmdp/uncertainty.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace rmdp;

namespace {

using Clock = std::chrono::steady_clock;

struct Criterion {
    std::string label;
    double budget_seconds = 0.0;
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

bool report(Criterion& c, double elapsed) {
    if (elapsed > c.budget_seconds)
        c.require(false, "time budget exceeded: " + fmt12(elapsed) + "s > " +
                             fmt12(c.budget_seconds) + "s");
    std::printf("%s criterion %s (%.2fs)%s%s\n", c.ok ? "PASS" : "FAIL",
                c.label.c_str(), elapsed, c.ok ? "" : ": ",
                c.ok ? "" : c.detail.c_str());
    std::fflush(stdout);
    return c.ok;
}

Real curve_value(Real gamma) {
    return -(1.0 - 2.0 * std::sqrt(1.0 - gamma) + (1.0 - gamma)) / gamma;
}

Real curve_alpha(Real gamma) {
    return (std::sqrt(1.0 - gamma) - (1.0 - gamma)) / gamma;
}

bool criterion_curve_closed_forms() {
    Criterion c{"1: curve chain closed forms", 1.0};
    auto start = Clock::now();
    for (Real gamma : {0.5, 0.75, 0.9, 0.99}) {
        CurveSolveResult res = solve_curve_one_action(gamma);
        c.require(std::fabs(res.normalized_value - curve_value(gamma)) <= 1e-8,
                  "normalized value off at gamma " + fmt12(gamma));
        c.require(std::fabs(res.alpha - curve_alpha(gamma)) <= 1e-6,
                  "adversary mix off at gamma " + fmt12(gamma));
    }
    return report(c, std::chrono::duration<double>(Clock::now() - start).count());
}

bool criterion_flip_alternation() {
    Criterion c{"2: discounted winner alternation", 1.0};
    auto start = Clock::now();
    std::vector<FlipProbe> probes = optimal_action_flip_points(4);
    c.require(probes.size() == 4, "expected 4 probes");
    for (const FlipProbe& probe : probes) {
        c.require(probe.winner_first == 0 && probe.winner_second == 1,
                  "winners failed to alternate at k " + std::to_string(probe.k));
        c.require(probe.margin_first > 1e-12 && probe.margin_second > 1e-12,
                  "degenerate margin at k " + std::to_string(probe.k));
    }
    return report(c, std::chrono::duration<double>(Clock::now() - start).count());
}

bool criterion_big_match_grids() {
    Criterion c{"3: quit-or-loop guarantee gap", 10.0};
    auto start = Clock::now();
    BigMatchGridResult res = loop_or_quit_grid(101);
    c.require(res.markovian_deviation <= 1e-12,
              "split-first-step value drifted from 1/2 by " +
                  fmt12(res.markovian_deviation));
    c.require(std::fabs(res.stationary_maxmin) <= 1e-9,
              "stationary max-min is " + fmt12(res.stationary_maxmin));
    c.require(std::fabs(res.minmax - 0.5) <= 1e-9,
              "min-max is " + fmt12(res.minmax));
    return report(c, std::chrono::duration<double>(Clock::now() - start).count());
}

bool criterion_oracle_equivalence() {
    Criterion c{"4: worst-case oracles vs enumeration", 30.0};
    auto start = Clock::now();
    std::mt19937_64 gen(2024);
    std::exponential_distribution<Real> expo(1.0);
    std::uniform_real_distribution<Real> wdist(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(gen() % 5);
        Vec nominal(n), w(n);
        Real sum = 0.0;
        for (int i = 0; i < n; ++i) {
            nominal[i] = expo(gen) + 1e-9;
            sum += nominal[i];
        }
        for (int i = 0; i < n; ++i) nominal[i] /= sum;
        for (int i = 0; i < n; ++i) w[i] = wdist(gen);

        if (trial % 3 == 0) {
            Real up = 0.02 + 0.4 * std::generate_canonical<Real, 53>(gen);
            Real lo = 0.02 + 0.4 * std::generate_canonical<Real, 53>(gen);
            Box box = make_box(nominal, up, lo);
            Real exact = worst_case(box, nominal, w).value;
            Real reference = oracle::box_vertex_min(box.lo, box.up, w);
            c.require(std::fabs(exact - reference) <= 1e-10,
                      "box gap " + fmt12(std::fabs(exact - reference)));
        } else if (trial % 3 == 1) {
            Real alpha =
                largest_feasible_ball_radius(nominal) *
                (0.05 + 0.9 * std::generate_canonical<Real, 53>(gen));
            UncertaintySet ball = make_ball2(nominal, alpha);
            Real exact = worst_case(ball, nominal, w).value;
            Real reference = oracle::simplex_grid_min(ball, nominal, w, 5e-4);
            c.require(exact <= reference + 1e-12 && reference - exact <= 2e-3,
                      "ell2 gap " + fmt12(reference - exact));
        } else {
            int m = 2 + static_cast<int>(gen() % 4);
            VertexSet vs;
            for (int v = 0; v < m; ++v) {
                Vec vert(n);
                Real vsum = 0.0;
                for (int i = 0; i < n; ++i) {
                    vert[i] = expo(gen) + 1e-9;
                    vsum += vert[i];
                }
                for (int i = 0; i < n; ++i) vert[i] /= vsum;
                vs.vertices.push_back(std::move(vert));
            }
            Real exact = worst_case(vs, nominal, w).value;
            Real reference = oracle::polytope_vertex_min(vs.vertices, w);
            c.require(std::fabs(exact - reference) <= 1e-10,
                      "polytope gap " + fmt12(std::fabs(exact - reference)));
        }
    }
    return report(c, std::chrono::duration<double>(Clock::now() - start).count());
}

Instance toy_drift_or_idle() {
    Instance inst;
    inst.num_states = 2;
    inst.num_actions = 2;
    inst.rewards = {{0.30, 0.30}, {0.60, 0.60}, {0.0, 0.0}, {0.0, 0.0}};
    inst.nominal = {{1.0, 0.0}, {0.8, 0.2}, {1.0, 0.0}, {0.0, 1.0}};
    inst.initial = {1.0, 0.0};
    inst.unc = {Singleton{}, VertexSet{{{0.8, 0.2}, {0.2, 0.8}}}, Singleton{},
                Singleton{}};
    inst.name = "drift_or_idle";
    return inst;
}

Instance toy_wear_and_repair() {
    Instance inst;
    inst.num_states = 3;
    inst.num_actions = 2;
    inst.rewards.assign(6, Vec(3, 0.0));
    inst.nominal.assign(6, Vec(3, 0.0));
    // Action 0 runs the machine, action 1 repairs it to fresh.
    inst.rewards[inst.idx(0, 0)] = {1.0, 1.0, 1.0};
    inst.rewards[inst.idx(1, 0)] = {0.6, 0.6, 0.6};
    inst.rewards[inst.idx(2, 0)] = {0.0, 0.0, 0.0};
    for (int s = 0; s < 3; ++s) inst.rewards[inst.idx(s, 1)] = {0.1, 0.1, 0.1};
    inst.nominal[inst.idx(0, 0)] = {0.7, 0.3, 0.0};
    inst.nominal[inst.idx(1, 0)] = {0.0, 0.6, 0.4};
    inst.nominal[inst.idx(2, 0)] = {0.0, 0.0, 1.0};
    for (int s = 0; s < 3; ++s) inst.nominal[inst.idx(s, 1)] = {1.0, 0.0, 0.0};
    inst.initial = {1.0, 0.0, 0.0};
    inst.unc.assign(6, Singleton{});
    inst.unc[inst.idx(0, 0)] = VertexSet{{{0.7, 0.3, 0.0}, {0.5, 0.4, 0.1}}};
    inst.unc[inst.idx(1, 0)] = VertexSet{{{0.0, 0.6, 0.4}, {0.0, 0.3, 0.7}}};
    inst.name = "wear_and_repair";
    return inst;
}

bool criterion_average_vs_exhaustive() {
    Criterion c{"5: gain solvers vs exhaustive search", 60.0};
    auto start = Clock::now();
    for (const Instance& inst : {toy_drift_or_idle(), toy_wear_and_repair()}) {
        oracle::ExhaustiveResult reference = oracle::exhaustive_avg_optimal(inst, {});
        GainTrace limit = solve_limit_discount(inst, 5000);
        GainTrace sched = solve_discount_schedule(inst, 5000);
        for (const GainTrace* trace : {&limit, &sched}) {
            Real err = std::fabs(trace->scalar_estimates.back() - reference.gain);
            c.require(err <= 1e-3, inst.name + " " + trace->algorithm +
                                       " gain gap " + fmt12(err));
            c.require(extract_average_policy(*trace) == reference.policy,
                      inst.name + " " + trace->algorithm + " policy mismatch");
        }
    }
    return report(c, std::chrono::duration<double>(Clock::now() - start).count());
}

bool criterion_benchmarks() {
    Criterion c{"6: benchmark error decay", 600.0};
    auto start = Clock::now();
    for (const std::string& id : {"machine", "forest", "healthcare"}) {
        for (const std::string& kind : {"box", "ell2"}) {
            ExperimentConfig cfg;
            cfg.instance_id = id;
            cfg.uncertainty = kind;
            cfg.radius = 0.05;
            cfg.num_states = 20;
            cfg.horizon = 1000;
            cfg.reference_horizon = 5000;
            ExperimentResult result = run_experiment(cfg);
            const SeedRun& run = result.runs[0];
            for (int alg = 0; alg < 3; ++alg) {
                const std::string tag =
                    id + "/" + kind + "/" + run.traces[alg].algorithm;
                Real late = run.errors[alg][999];
                Real early = run.errors[alg][9];
                c.require(late <= 1e-2,
                          tag + " error at T=1000 is " + fmt12(late));
                c.require(late <= early / 10.0,
                          tag + " decay stalled: err(1000)=" + fmt12(late) +
                              " err(10)=" + fmt12(early));
            }
        }
    }
    return report(c, std::chrono::duration<double>(Clock::now() - start).count());
}

bool criterion_operator_properties() {
    Criterion c{"7: operator property sweep", 60.0};
    auto start = Clock::now();
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<Real> vdist(-5.0, 5.0);
    std::uniform_real_distribution<Real> wdist(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        int S = 3 + static_cast<int>(gen() % 4);
        int A = 2 + static_cast<int>(gen() % 2);
        Instance inst = build_garnet(S, A, 2 + static_cast<int>(gen() % 2),
                                     9000 + trial);
        attach_uncertainty(inst, trial % 2 ? "box" : "ell2",
                           trial % 2 ? 0.1 : 0.05);
        Real gamma = 0.5 + 0.49 * std::generate_canonical<Real, 53>(gen);

        Vec u(S), v(S);
        for (int s = 0; s < S; ++s) {
            u[s] = vdist(gen);
            v[s] = vdist(gen);
        }
        Vec Tu = bellman_apply(inst, u, gamma).values;
        Vec Tv = bellman_apply(inst, v, gamma).values;
        c.require(sup_dist(Tu, Tv) <= gamma * sup_dist(u, v) + 1e-12,
                  "contraction violated at trial " + std::to_string(trial));

        Vec up = u;
        for (Real& x : up) x += std::fabs(vdist(gen));
        Vec Tup = bellman_apply(inst, up, gamma).values;
        bool monotone = true;
        for (int s = 0; s < S; ++s) monotone = monotone && Tu[s] <= Tup[s] + 1e-12;
        c.require(monotone, "monotonicity violated at trial " + std::to_string(trial));

        Vec shifted = u;
        for (Real& x : shifted) x += 2.0;
        Vec Tshift = bellman_apply(inst, shifted, gamma).values;
        bool shift_ok = true;
        for (int s = 0; s < S; ++s)
            shift_ok = shift_ok && std::fabs(Tshift[s] - Tu[s] - gamma * 2.0) <= 1e-10;
        c.require(shift_ok, "shift equivariance violated at trial " +
                                std::to_string(trial));

        // Worst-case rows must stay on the simplex and inside their sets.
        BellmanResult res = bellman_apply(inst, u, gamma);
        for (int s = 0; s < S && c.ok; ++s) {
            const Vec& row = res.worst_rows[inst.idx(s, res.argmax[s])];
            Real sum = 0.0;
            for (Real x : row) {
                sum += x;
                c.require(x >= -1e-9, "negative kernel mass");
            }
            c.require(std::fabs(sum - 1.0) <= 1e-9, "kernel row off the simplex");
        }
    }
    return report(c, std::chrono::duration<double>(Clock::now() - start).count());
}

bool criterion_reproducible_artifacts() {
    Criterion c{"8: byte-identical artifacts", 120.0};
    auto start = Clock::now();
    ExperimentConfig cfg;
    cfg.instance_id = "garnet";
    cfg.uncertainty = "ell2";
    cfg.num_seeds = 3;
    cfg.horizon = 200;
    cfg.reference_horizon = 5000;
    ExperimentResult first = run_experiment(cfg);
    ExperimentResult second = run_experiment(cfg);
    c.require(!first.csv.empty(), "empty artifact");
    c.require(first.csv == second.csv, "artifacts differ between runs");
    return report(c, std::chrono::duration<double>(Clock::now() - start).count());
}

} // namespace

int main() {
    struct Entry {
        const char* label;
        bool (*fn)();
    };
    const Entry entries[] = {
        {"1", &criterion_curve_closed_forms},
        {"2", &criterion_flip_alternation},
        {"3", &criterion_big_match_grids},
        {"4", &criterion_oracle_equivalence},
        {"5", &criterion_average_vs_exhaustive},
        {"6", &criterion_benchmarks},
        {"7", &criterion_operator_properties},
        {"8", &criterion_reproducible_artifacts},
    };
    bool ok = true;
    for (const Entry& entry : entries) {
        try {
            ok &= entry.fn();
        } catch (const std::exception& e) {
            std::printf("FAIL criterion %s: aborted: %s\n", entry.label, e.what());
            std::fflush(stdout);
            ok = false;
        }
    }
    if (!ok) {
        std::printf("acceptance: at least one criterion failed\n");
        return 1;
    }
    std::printf("acceptance: all criteria passed\n");
    return 0;
}
