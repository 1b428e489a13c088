#pragma once

#include <cassert>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace rmdp {

using Real = double;
using Vec = std::vector<Real>;

/// Deterministic stationary policy: one action index per state.
using DetPolicy = std::vector<int>;

/// Randomized stationary policy: per-state distribution over actions.
using RandPolicy = std::vector<Vec>;

inline RandPolicy to_randomized(const DetPolicy& pi, int num_actions) {
    RandPolicy r(pi.size(), Vec(num_actions, 0.0));
    for (size_t s = 0; s < pi.size(); ++s)
        r[s][pi[s]] = 1.0;
    return r;
}

inline Real dot(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    Real acc = 0;
    for (size_t i = 0; i < a.size(); ++i)
        acc += a[i] * b[i];
    return acc;
}

inline Real sup_norm(const Vec& a) {
    Real m = 0;
    for (Real x : a)
        m = std::max(m, std::fabs(x));
    return m;
}

inline Real sup_dist(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    Real m = 0;
    for (size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

/// Format with 12 significant digits (CLI output contract).
inline std::string fmt12(Real x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

/// Round-trip-exact formatting for CSV artifacts.
inline std::string fmt_exact(Real x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Outcome of a robust dynamic-programming solve.
struct SolveReport {
    Vec value;                    // fixed-point estimate, one entry per state
    DetPolicy policy;             // maximizing actions (lowest-index tie break)
    std::vector<Vec> worst_rows;  // worst-case transition row per (s, a), flat s*A+a
    int iterations = 0;           // improvement rounds (PI) or sweeps (VI)
    Real residual = 0.0;          // sup-norm Bellman residual at the returned value
    bool converged = false;
};

} // namespace rmdp
