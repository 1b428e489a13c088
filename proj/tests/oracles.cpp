#include "oracles.hpp"

#include "rmdp/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <variant>

namespace oracle {

namespace {

Real dot_slow(const Vec& a, const Vec& b) {
    Real s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Advance a mixed-radix counter; false once it wraps around.
bool odometer(std::vector<int>& digits, const std::vector<int>& radix) {
    for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < radix[i]) return true;
        digits[i] = 0;
    }
    return false;
}

} // namespace

void validate(const OracleBudget& budget) {
    if (!(budget.grid_step > 0.0) || budget.max_enumeration <= 0 ||
        budget.trajectory_length <= 0 || !(budget.tolerance > 0.0))
        throw std::invalid_argument("oracle budget fields must all be positive");
}

Real simplex_grid_min(const rmdp::UncertaintySet& u, const Vec& nominal,
                      const Vec& w, Real step) {
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (nominal.size() != w.size())
        throw std::invalid_argument("nominal and weight sizes differ");

    if (std::holds_alternative<rmdp::Singleton>(u)) return dot_slow(nominal, w);

    const rmdp::Box* box = std::get_if<rmdp::Box>(&u);
    const rmdp::Ball2* ball = std::get_if<rmdp::Ball2>(&u);
    if (!box && !ball)
        throw std::invalid_argument(
            "grid oracle supports singleton, box and ell2 sets only");

    auto box_feasible = [&](const Vec& p) {
        for (std::size_t i = 0; i < p.size(); ++i)
            if (p[i] < box->lo[i] - 1e-12 || p[i] > box->up[i] + 1e-12) return false;
        return true;
    };

    // Mass moves only between these coordinates; a ball constrains its support.
    std::vector<int> coords;
    if (ball) {
        coords = ball->free_coords;
    } else {
        coords.resize(nominal.size());
        for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = static_cast<int>(i);
    }

    // Scale the deviation back onto the radius; because construction keeps the
    // whole ball inside the simplex, the result stays a distribution. Without
    // this, every exchange from a suboptimal boundary point would leave the
    // sphere and the descent would jam there.
    auto project = [&](Vec& q) {
        Real d2 = 0.0;
        for (int i : coords) d2 += (q[i] - nominal[i]) * (q[i] - nominal[i]);
        Real norm = std::sqrt(d2);
        if (norm <= ball->alpha || norm <= 0.0) return;
        Real scale = ball->alpha / norm;
        for (int i : coords) q[i] = nominal[i] + scale * (q[i] - nominal[i]);
    };

    Vec p = nominal;
    Real best = dot_slow(p, w);
    for (Real delta = 0.5; delta >= step * 0.5; delta *= 0.5) {
        for (int guard = 0; guard < 10000; ++guard) {
            bool improved = false;
            for (int i : coords) {
                for (int j : coords) {
                    if (i == j || p[j] < delta - 1e-15) continue;
                    Vec q = p;
                    q[i] += delta;
                    q[j] -= delta;
                    if (q[j] < 0.0) q[j] = 0.0;
                    if (ball) {
                        project(q);
                    } else if (q[i] > 1.0 + 1e-12 || !box_feasible(q)) {
                        continue;
                    }
                    Real val = dot_slow(q, w);
                    if (val < best - 1e-15) {
                        best = val;
                        p = std::move(q);
                        improved = true;
                    }
                }
            }
            if (!improved) break;
        }
    }
    return best;
}

std::vector<Vec> enumerate_box_vertices(const Vec& lo, const Vec& up) {
    const int n = static_cast<int>(lo.size());
    std::vector<Vec> out;
    // Choose which coordinates sit at their upper bound, optionally leaving
    // one free coordinate to soak up the remaining mass.
    for (int free = -1; free < n; ++free) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            if (free >= 0 && (mask & (1u << free))) continue;
            Vec p(n);
            Real sum = 0.0;
            for (int i = 0; i < n; ++i) {
                if (i == free) continue;
                p[i] = (mask & (1u << i)) ? up[i] : lo[i];
                sum += p[i];
            }
            if (free < 0) {
                if (std::fabs(sum - 1.0) <= 1e-12) out.push_back(std::move(p));
                continue;
            }
            Real rest = 1.0 - sum;
            if (rest < lo[free] - 1e-12 || rest > up[free] + 1e-12) continue;
            p[free] = rest;
            out.push_back(std::move(p));
        }
    }
    return out;
}

Real box_vertex_min(const Vec& lo, const Vec& up, const Vec& w) {
    std::vector<Vec> verts = enumerate_box_vertices(lo, up);
    if (verts.empty())
        throw std::invalid_argument("box has no simplex vertices; infeasible set");
    Real best = std::numeric_limits<Real>::infinity();
    for (const Vec& v : verts) best = std::min(best, dot_slow(v, w));
    return best;
}

Real polytope_vertex_min(const std::vector<Vec>& vertices, const Vec& w) {
    if (vertices.empty()) throw std::invalid_argument("empty vertex list");
    Real best = std::numeric_limits<Real>::infinity();
    for (const Vec& v : vertices) best = std::min(best, dot_slow(v, w));
    return best;
}

Real curve_grid_min(const std::function<Real(Real)>& bound, const Vec& w,
                    int points) {
    if (points < 2) throw std::invalid_argument("curve grid needs >= 2 points");
    if (w.size() != 3) throw std::invalid_argument("curve sets live on 3 states");
    Real best = std::numeric_limits<Real>::infinity();
    for (int i = 0; i < points; ++i) {
        Real a = static_cast<Real>(i) / (points - 1);
        Real cap = bound(a);
        for (Real b : {0.0, cap}) {
            if (b < 0.0 || b > a) continue;
            Real val = (1.0 - a) * w[0] + b * w[1] + (a - b) * w[2];
            best = std::min(best, val);
        }
    }
    return best;
}

ExhaustiveResult exhaustive_impl(const Instance& inst, const OracleBudget& budget) {
    const int S = inst.num_states;
    const int A = inst.num_actions;
    std::vector<std::vector<Vec>> verts(static_cast<std::size_t>(S) * A);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            const rmdp::UncertaintySet& u = inst.set_at(s, a);
            if (std::holds_alternative<rmdp::Singleton>(u)) {
                verts[inst.idx(s, a)] = {inst.nominal_row(s, a)};
            } else if (const auto* vs = std::get_if<rmdp::VertexSet>(&u)) {
                verts[inst.idx(s, a)] = vs->vertices;
            } else {
                throw std::invalid_argument(
                    "exhaustive oracle needs singleton or polytope sets");
            }
        }
    }

    // Count evaluations up front so a bad call fails fast instead of spinning.
    std::vector<int> pi(S, 0), pol_radix(S, A);
    long total = 0;
    do {
        long combos = 1;
        for (int s = 0; s < S; ++s)
            combos *= static_cast<long>(verts[inst.idx(s, pi[s])].size());
        total += combos;
    } while (odometer(pi, pol_radix));
    if (total > budget.max_enumeration)
        throw std::invalid_argument("exhaustive oracle enumeration over budget");

    ExhaustiveResult out;
    out.gain = -std::numeric_limits<Real>::infinity();
    std::fill(pi.begin(), pi.end(), 0);
    do {
        DetPolicy policy(pi.begin(), pi.end());
        RandPolicy randomized = rmdp::to_randomized(policy, A);
        std::vector<int> choice(S, 0), radix(S);
        for (int s = 0; s < S; ++s)
            radix[s] = static_cast<int>(verts[inst.idx(s, policy[s])].size());
        Real worst = std::numeric_limits<Real>::infinity();
        do {
            std::vector<Vec> rows = inst.nominal;
            for (int s = 0; s < S; ++s)
                rows[inst.idx(s, policy[s])] = verts[inst.idx(s, policy[s])][choice[s]];
            worst = std::min(worst, rmdp::average_return(inst, randomized, &rows));
        } while (odometer(choice, radix));
        // Strict improvement keeps the lexicographically first policy on ties.
        if (worst > out.gain) {
            out.gain = worst;
            out.policy = std::move(policy);
        }
    } while (odometer(pi, pol_radix));
    return out;
}

ExhaustiveResult exhaustive_avg_optimal(const Instance& inst,
                                        const OracleBudget& budget) {
    validate(budget);
    if (static_cast<long>(inst.num_states) * inst.num_actions > 8)
        throw std::invalid_argument("exhaustive oracle handles S*A <= 8 only");
    return exhaustive_impl(inst, budget);
}

Real trajectory_average(const Instance& inst, const RandPolicy& policy,
                        const std::vector<Vec>& kernel_rows, long horizon,
                        std::uint64_t seed, long replicas) {
    if (horizon < 1 || replicas < 1)
        throw std::invalid_argument("horizon and replicas must be positive");
    const int S = inst.num_states;
    const int A = inst.num_actions;

    // States where every action the policy can take self-loops surely; their
    // constant tail reward is added in closed form instead of simulated.
    std::vector<char> absorbing(S, 0);
    Vec absorb_reward(S, 0.0);
    for (int s = 0; s < S; ++s) {
        bool sure = true;
        Real rew = 0.0;
        for (int a = 0; a < A; ++a) {
            if (policy[s][a] <= 0.0) continue;
            if (kernel_rows[inst.idx(s, a)][s] < 1.0 - 1e-15) {
                sure = false;
                break;
            }
            rew += policy[s][a] * inst.reward_row(s, a)[s];
        }
        absorbing[s] = sure ? 1 : 0;
        absorb_reward[s] = rew;
    }

    std::mt19937_64 gen(seed);
    auto sample = [&gen](const Vec& dist) {
        Real u = std::generate_canonical<Real, 53>(gen);
        Real acc = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            acc += dist[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(dist.size()) - 1;
    };

    Real total = 0.0;
    for (long rep = 0; rep < replicas; ++rep) {
        int s = sample(inst.initial);
        Real sum = 0.0;
        for (long t = 0; t < horizon; ++t) {
            if (absorbing[s]) {
                sum += static_cast<Real>(horizon - t) * absorb_reward[s];
                break;
            }
            int a = sample(policy[s]);
            int next = sample(kernel_rows[inst.idx(s, a)]);
            sum += inst.reward_row(s, a)[next];
            s = next;
        }
        total += sum / static_cast<Real>(horizon);
    }
    return total / static_cast<Real>(replicas);
}

Vec power_series_value(const std::vector<Vec>& P, const Vec& r, Real gamma,
                       Real tol) {
    if (gamma < 0.0 || gamma >= 1.0)
        throw std::invalid_argument("power series needs gamma in [0, 1)");
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const std::size_t n = r.size();
    Real r_sup = 0.0;
    for (Real x : r) r_sup = std::max(r_sup, std::fabs(x));

    Vec v(n, 0.0), term = r, next(n);
    Real scale = 1.0; // gamma^t
    while (true) {
        for (std::size_t i = 0; i < n; ++i) v[i] += scale * term[i];
        scale *= gamma;
        if (r_sup * scale / (1.0 - gamma) < tol) break;
        for (std::size_t i = 0; i < n; ++i) next[i] = dot_slow(P[i], term);
        term.swap(next);
    }
    return v;
}

Real golden_max(const std::function<Real(Real)>& f, Real lo, Real hi, Real tol) {
    if (!(lo < hi)) throw std::invalid_argument("empty search interval");
    const Real phi = (std::sqrt(5.0) - 1.0) / 2.0;
    Real a = lo, b = hi;
    Real x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    Real f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace oracle
