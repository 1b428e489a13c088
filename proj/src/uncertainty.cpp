#include "rmdp/uncertainty.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rmdp {

namespace {

std::vector<int> support_of(const Vec& nominal) {
    std::vector<int> sup;
    for (size_t i = 0; i < nominal.size(); ++i)
        if (nominal[i] > 0.0) sup.push_back(static_cast<int>(i));
    return sup;
}

WorstCase worst_case_box(const Box& box, const Vec& w) {
    const size_t n = w.size();
    if (box.lo.size() != n || box.up.size() != n)
        throw std::invalid_argument("box bounds do not match the state count");

    // Start every coordinate at its lower bound and spend the remaining mass
    // greedily on the cheapest coordinates. Stable index order breaks ties.
    Vec p = box.lo;
    Real budget = 1.0 - std::accumulate(p.begin(), p.end(), 0.0);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return w[a] < w[b]; });
    for (int i : order) {
        if (budget <= 0.0) break;
        Real add = std::min(box.up[i] - box.lo[i], budget);
        p[i] += add;
        budget -= add;
    }
    if (budget > 1e-9)
        throw std::invalid_argument("box bounds cannot reach total mass 1");
    Real value = 0;
    for (size_t i = 0; i < n; ++i)
        value += p[i] * w[i];
    return {value, std::move(p)};
}

WorstCase worst_case_ball2(const Ball2& ball, const Vec& nominal, const Vec& w) {
    Real base = 0;
    for (size_t i = 0; i < w.size(); ++i)
        base += nominal[i] * w[i];

    const auto& free = ball.free_coords;
    if (free.size() <= 1) return {base, nominal};

    Real mean = 0;
    for (int i : free)
        mean += w[i];
    mean /= static_cast<Real>(free.size());

    Real norm_sq = 0;
    for (int i : free) {
        Real z = w[i] - mean;
        norm_sq += z * z;
    }
    if (norm_sq <= 0.0) return {base, nominal};

    Real norm = std::sqrt(norm_sq);
    Vec p = nominal;
    for (int i : free) {
        p[i] -= ball.alpha * (w[i] - mean) / norm;
        if (p[i] < 0.0 && p[i] > -1e-12) p[i] = 0.0; // guard rounding at the simplex face
    }
    return {base - ball.alpha * norm, std::move(p)};
}

WorstCase worst_case_vertices(const VertexSet& vs, const Vec& w) {
    if (vs.vertices.empty())
        throw std::invalid_argument("vertex set is empty");
    Real best = 0;
    size_t best_i = 0;
    for (size_t k = 0; k < vs.vertices.size(); ++k) {
        const Vec& v = vs.vertices[k];
        Real val = 0;
        for (size_t i = 0; i < w.size(); ++i)
            val += v[i] * w[i];
        if (k == 0 || val < best) { // strict comparison keeps the lowest index on ties
            best = val;
            best_i = k;
        }
    }
    return {best, vs.vertices[best_i]};
}

Vec curve_row(Real a, Real b) { return {1.0 - a, b, a - b}; }

Real curve_objective(const Vec& w, Real a, Real b) {
    return (1.0 - a) * w[0] + b * w[1] + (a - b) * w[2];
}

// Linear-in-a minimization once the b coordinate is pinned to zero.
WorstCase curve_zero_beta(const Vec& w) {
    Real at0 = curve_objective(w, 0.0, 0.0);
    Real at1 = curve_objective(w, 1.0, 0.0);
    if (at1 < at0) return {at1, curve_row(1.0, 0.0)};
    return {at0, curve_row(0.0, 0.0)};
}

WorstCase worst_case_quad_curve(const Vec& w) {
    if (w.size() != 3)
        throw std::invalid_argument("curve sets require exactly 3 states");
    if (w[1] >= w[2]) return curve_zero_beta(w);

    // b = a(1-a): g(a) = w0 + a(w2 - w0) + a(1-a)(w1 - w2), convex since w2 > w1.
    Real quad = w[2] - w[1];
    Real lin = (w[2] - w[0]) + (w[1] - w[2]);
    Real vertex = -lin / (2.0 * quad);
    Real cands[3] = {0.0, std::clamp(vertex, 0.0, 1.0), 1.0};
    Real best_a = 0.0, best = curve_objective(w, 0.0, 0.0);
    for (Real a : cands) {
        Real val = curve_objective(w, a, a * (1.0 - a));
        if (val < best) {
            best = val;
            best_a = a;
        }
    }
    return {best, curve_row(best_a, best_a * (1.0 - best_a))};
}

WorstCase worst_case_affine_curve(const AffineCurveSet& cs, const Vec& w) {
    if (w.size() != 3)
        throw std::invalid_argument("curve sets require exactly 3 states");
    if (w[1] >= w[2]) return curve_zero_beta(w);

    // The bound polyline is affine between knots and the objective is linear,
    // so enumerating knots is exact. First strict improvement keeps the
    // smallest knot on ties.
    Real best = 0;
    size_t best_j = 0;
    for (size_t j = 0; j < cs.knot_x.size(); ++j) {
        Real val = curve_objective(w, cs.knot_x[j], cs.knot_y[j]);
        if (j == 0 || val < best) {
            best = val;
            best_j = j;
        }
    }
    return {best, curve_row(cs.knot_x[best_j], cs.knot_y[best_j])};
}

} // namespace

WorstCase worst_case(const UncertaintySet& u, const Vec& nominal, const Vec& w) {
    if (nominal.size() != w.size())
        throw std::invalid_argument("nominal row and weight vector sizes differ");
    return std::visit(
        [&](const auto& set) -> WorstCase {
            using T = std::decay_t<decltype(set)>;
            if constexpr (std::is_same_v<T, Singleton>) {
                Real value = 0;
                for (size_t i = 0; i < w.size(); ++i)
                    value += nominal[i] * w[i];
                return {value, nominal};
            } else if constexpr (std::is_same_v<T, Box>) {
                return worst_case_box(set, w);
            } else if constexpr (std::is_same_v<T, Ball2>) {
                return worst_case_ball2(set, nominal, w);
            } else if constexpr (std::is_same_v<T, VertexSet>) {
                return worst_case_vertices(set, w);
            } else if constexpr (std::is_same_v<T, QuadCurveSet>) {
                return worst_case_quad_curve(w);
            } else {
                return worst_case_affine_curve(set, w);
            }
        },
        u);
}

bool ball_fits_simplex(const Vec& nominal, Real alpha) {
    auto free = support_of(nominal);
    if (free.size() <= 1) return true;
    Real n = static_cast<Real>(free.size());
    Real reach = alpha * std::sqrt((n - 1.0) / n);
    for (int i : free)
        if (nominal[i] < reach - 1e-15) return false;
    return true;
}

Real largest_feasible_ball_radius(const Vec& nominal) {
    auto free = support_of(nominal);
    if (free.size() <= 1) return std::numeric_limits<Real>::infinity();
    Real n = static_cast<Real>(free.size());
    Real lowest = 1.0;
    for (int i : free) lowest = std::min(lowest, nominal[i]);
    return lowest * std::sqrt(n / (n - 1.0));
}

Box make_box(const Vec& nominal, Real theta_up, Real theta_low) {
    if (theta_up < 0.0 || theta_up > 1.0 || theta_low < 0.0 || theta_low > 1.0)
        throw std::invalid_argument("box radii must lie in [0, 1]");
    Box box;
    box.theta_up = theta_up;
    box.theta_low = theta_low;
    box.lo.assign(nominal.size(), 0.0);
    box.up.assign(nominal.size(), 0.0);
    for (size_t i = 0; i < nominal.size(); ++i) {
        if (nominal[i] > 0.0) {
            box.lo[i] = (1.0 - theta_low) * nominal[i];
            box.up[i] = (1.0 - theta_up) * nominal[i] + theta_up;
        }
    }
    return box;
}

Box make_box_bounds(Vec lo, Vec up) {
    if (lo.size() != up.size())
        throw std::invalid_argument("box bound vectors differ in length");
    Real lo_sum = 0, up_sum = 0;
    for (size_t i = 0; i < lo.size(); ++i) {
        if (lo[i] < -1e-12 || up[i] > 1.0 + 1e-12 || lo[i] > up[i] + 1e-12)
            throw std::invalid_argument("box bounds out of order or outside [0, 1]");
        lo_sum += lo[i];
        up_sum += up[i];
    }
    if (lo_sum > 1.0 + 1e-12)
        throw std::invalid_argument("box lower bounds sum above 1: set is empty");
    if (up_sum < 1.0 - 1e-12)
        throw std::invalid_argument("box upper bounds sum below 1: set is empty");
    Box box;
    box.lo = std::move(lo);
    box.up = std::move(up);
    return box;
}

Ball2 make_ball2(const Vec& nominal, Real alpha) {
    if (alpha < 0.0)
        throw std::invalid_argument("ball radius must be nonnegative");
    if (!ball_fits_simplex(nominal, alpha))
        throw std::invalid_argument(
            "ball of radius " + fmt12(alpha) +
            " leaves the simplex for this row; reduce the radius");
    Ball2 ball;
    ball.alpha = alpha;
    ball.free_coords = support_of(nominal);
    return ball;
}

AffineCurveSet make_affine_curve(bool even_breakpoints, int k_trunc) {
    if (k_trunc < 1)
        throw std::invalid_argument("curve truncation index must be positive");
    auto breakpoint = [&](int k) {
        return even_breakpoints ? 1.0 / (2.0 * k) : 1.0 / (2.0 * k + 1.0);
    };
    auto bow = [](Real a) { return a * (1.0 - a); };

    AffineCurveSet cs;
    cs.even_breakpoints = even_breakpoints;
    cs.k_trunc = k_trunc;

    // Below the smallest kept breakpoint, close with the chord down to the
    // origin (the breakpoints' accumulation point, which sits on the bow
    // itself). Every segment is then a chord of the concave bow, keeping the
    // whole polyline a minorant of it.
    cs.knot_x = {0.0};
    cs.knot_y = {0.0};
    for (int k = k_trunc; k >= 1; --k) {
        Real x = breakpoint(k);
        cs.knot_x.push_back(x);
        cs.knot_y.push_back(bow(x));
    }
    cs.knot_x.push_back(1.0);
    cs.knot_y.push_back(0.0);
    return cs;
}

UncertaintySet apply_support_mask(const UncertaintySet& u, const Vec& nominal) {
    auto sup = support_of(nominal);
    if (const Box* box = std::get_if<Box>(&u)) {
        if (sup.size() == 1) return Singleton{};
        if (box->theta_up >= 0.0)
            return make_box(nominal, box->theta_up, box->theta_low);
        Box masked = *box;
        for (size_t i = 0; i < nominal.size(); ++i) {
            if (nominal[i] <= 0.0) {
                masked.lo[i] = 0.0;
                masked.up[i] = 0.0;
            }
        }
        return masked;
    }
    if (const Ball2* ball = std::get_if<Ball2>(&u)) {
        if (sup.size() == 1) return Singleton{};
        return make_ball2(nominal, ball->alpha);
    }
    return u;
}

std::string kind_name(const UncertaintySet& u) {
    return std::visit(
        [](const auto& set) -> std::string {
            using T = std::decay_t<decltype(set)>;
            if constexpr (std::is_same_v<T, Singleton>) return "singleton";
            else if constexpr (std::is_same_v<T, Box>) return "box";
            else if constexpr (std::is_same_v<T, Ball2>) return "ell2";
            else if constexpr (std::is_same_v<T, VertexSet>) return "polytope_vertices";
            else if constexpr (std::is_same_v<T, QuadCurveSet>) return "param_alpha_beta";
            else return "param_piecewise";
        },
        u);
}

} // namespace rmdp
