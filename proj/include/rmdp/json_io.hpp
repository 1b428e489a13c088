#pragma once

#include "rmdp/instance.hpp"
#include "rmdp/types.hpp"

#include <string>

namespace rmdp {

/**
 * Instance files are JSON documents with the fields `num_states`,
 * `num_actions`, `rewards` (S x A x S), `nominal_kernel` (S x A x S),
 * `initial_distribution` (length S) and `uncertainty` (S x A descriptor
 * objects). Descriptor schemas by kind:
 *   {"kind": "singleton"}
 *   {"kind": "box", "theta_up": x, "theta_low": x}      (radius form)
 *   {"kind": "box", "p_low": [...], "p_up": [...]}      (explicit bounds)
 *   {"kind": "ell2", "alpha": x}
 *   {"kind": "polytope_vertices", "vertices": [[...], ...]}
 *   {"kind": "param_alpha_beta"}
 *   {"kind": "param_piecewise", "breakpoints": "even"|"odd", "k_trunc": n}
 * An optional "name" field round-trips. Field names are a stability contract.
 */

std::string instance_to_json(const Instance& inst);

/// Parse and validate; throws std::invalid_argument on schema or shape errors.
Instance instance_from_json(const std::string& text);

void save_instance(const Instance& inst, const std::string& path);
Instance load_instance(const std::string& path);

/// Solver output as JSON: value, policy, worst_kernel, iterations, residual,
/// converged.
std::string report_to_json(const SolveReport& report);

} // namespace rmdp
