#pragma once

#include "rmdp/types.hpp"

#include <variant>

namespace rmdp {

/// No ambiguity: the transition row is exactly the nominal row.
struct Singleton {};

/**
 * Per-coordinate interval bounds intersected with the probability simplex.
 *
 * When built from radii, lo = (1 - theta_low) * nominal and
 * up = (1 - theta_up) * nominal + theta_up on the support of the nominal row
 * (coordinates outside the support are pinned to zero so worst-case rows
 * keep the nominal support). The radii are retained for serialization.
 */
struct Box {
    Vec lo, up;
    Real theta_up = -1.0, theta_low = -1.0; // negative when built from explicit bounds
};

/**
 * Euclidean ball of radius alpha around the nominal row, restricted to the
 * hyperplane sum(p) = 1 and to the support of the nominal row. Construction
 * requires the ball to sit inside the simplex (every free coordinate of the
 * nominal row at least alpha * sqrt((n-1)/n) for n free coordinates), which
 * makes the closed-form worst case exact.
 */
struct Ball2 {
    Real alpha = 0.0;
    std::vector<int> free_coords;
};

/// Explicit finite vertex list; the feasible set is its convex hull.
struct VertexSet {
    std::vector<Vec> vertices;
};

/**
 * Rows (1-a, b, a-b) over a 3-state chain with 0 <= b <= a(1-a).
 * The worst case is solved exactly: the objective is linear in (a, b), so the
 * minimum sits either on b = 0 (endpoints in a) or on the parabola b = a(1-a),
 * where it reduces to a clamped quadratic vertex.
 */
struct QuadCurveSet {};

/**
 * Rows (1-a, b, a-b) with b bounded by a piecewise-affine minorant of a(1-a)
 * interpolated at the reciprocal breakpoints 1/(2k) ("even") or 1/(2k+1)
 * ("odd"), truncated at index k_trunc and closed with chords to the endpoints
 * (0, 0) and (1, 0), which both sit on the bow. knot_x/knot_y store the
 * effective bound polyline, so the worst case is an exact enumeration over
 * knots.
 */
struct AffineCurveSet {
    bool even_breakpoints = true;
    int k_trunc = 64;
    Vec knot_x, knot_y;
};

using UncertaintySet =
    std::variant<Singleton, Box, Ball2, VertexSet, QuadCurveSet, AffineCurveSet>;

struct WorstCase {
    Real value;
    Vec row;
};

/// min over feasible rows p of dot(p, w); returns the value and a minimizer.
WorstCase worst_case(const UncertaintySet& u, const Vec& nominal, const Vec& w);

/// True when the ball of radius alpha around the row (restricted to its
/// support) stays inside the probability simplex.
bool ball_fits_simplex(const Vec& nominal, Real alpha);

/// Largest radius for which ball_fits_simplex holds; infinity for rows whose
/// support has a single coordinate.
Real largest_feasible_ball_radius(const Vec& nominal);

/// Build a box set from radii; masks coordinates outside the nominal support.
Box make_box(const Vec& nominal, Real theta_up, Real theta_low);

/// Build a box set from explicit bounds. Throws when the bounds are
/// infeasible (sum of lower bounds above 1, or upper bounds below 1).
Box make_box_bounds(Vec lo, Vec up);

/// Build a Euclidean ball set; throws when the ball pokes out of the simplex.
Ball2 make_ball2(const Vec& nominal, Real alpha);

AffineCurveSet make_affine_curve(bool even_breakpoints, int k_trunc = 64);

/**
 * Restrict a set to the support of the nominal row: box bounds and ball
 * coordinates off the support are pinned to zero, and a support of size one
 * collapses the set to a singleton (absorbing states stay absorbing).
 */
UncertaintySet apply_support_mask(const UncertaintySet& u, const Vec& nominal);

/// Interface name of the set kind ("singleton", "box", "ell2", ...).
std::string kind_name(const UncertaintySet& u);

} // namespace rmdp
