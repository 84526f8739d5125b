#pragma once

#include <cstdint>
#include <utility>

#include "ruleve/approx.hpp"
#include "ruleve/exact.hpp"
#include "ruleve/rulebase.hpp"

namespace ruleve {

// Brute-force reference implementations.  These enumerate the complete joint
// space (complete contexts at most `max_enum`, default 2^22) and use
// compensated summation, sharing no code with the elimination engine.

// Exact posterior of query given evidence by full enumeration.
Distribution enumerate_posterior(const RuleBase& rb, VarId query, const Context& evidence,
                                 std::uint64_t max_enum = 1u << 22);

// Posterior bounds of an approximating base by full enumeration of the
// interval products.
BoundedPosterior enumerate_bounds(const RuleBase& arb, VarId query, const Context& evidence,
                                  std::uint64_t max_enum = 1u << 22);

// Unnormalized mass of a conjunction: sum of interval products over every
// complete context extending ctx.  (With perturbed parameters this is just a
// polynomial in them, not a probability.)
Interval enumerate_conjunction(const RuleBase& rb, const Context& ctx,
                               std::uint64_t max_enum = 1u << 22);

// Copy rb with one rule's interval translated by delta (both endpoints).
// Throws InvalidTarget on an unknown id and OutOfRange if an endpoint would
// leave [0, 1].
RuleBase perturb_parameter(const RuleBase& rb, RuleId rule, double delta);

}  // namespace ruleve
