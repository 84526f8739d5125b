#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ruleve/exact.hpp"
#include "ruleve/rulebase.hpp"

namespace ruleve {

// Posterior bounds per query value, each clamped to [0, 1] with lo <= hi.
struct BoundedPosterior {
  VarId variable = -1;
  std::vector<Interval> bounds;
};

enum class SimplifyStrategy { drop, resolve, both };

struct SimplifyConfig {
  double threshold = 0.0;           // max acceptable width of a produced rule
  SimplifyStrategy strategy = SimplifyStrategy::both;
  // Refuse rewrites producing a non-degenerate interval that reaches into
  // [0, eps] or [1 - eps, 1]: collapsing a qualitative (im)possibility into
  // an ordinary probability is usually not wanted.
  bool extreme_guard = false;
  double extreme_eps = 1e-3;
};

// Drop one body condition from one rule.  The widened rule takes
// [min lower, max upper] over itself and every same-head rule with a body
// compatible with the shortened body; same-head rules whose bodies are
// supersets of the shortened body are removed; remaining same-head rules
// still compatible with it get one distinguishing negated condition so the
// family stays mutually exclusive.  Throws InvalidTarget when `var` is not
// in the rule's body or when no single binary assignment can restore
// exclusivity.
RuleBase drop_condition(const RuleBase& rb, RuleId rule, VarId var);

// Resolution: derive head <- body : [min lv, max uv] from the family member
// for each value of e — the unique same-head rule whose body contains e=v
// and is otherwise a subset of `body`.  Same-head rules whose bodies contain
// `body` are subsumed by the new rule and removed (the members themselves
// may survive when their bodies are strictly more general).  Throws
// IncompleteFamily unless exactly one member exists per value of e.
RuleBase resolve_on(const RuleBase& rb, const Context& head, const Context& body, VarId e);

// Greedy simplification: repeatedly apply the candidate rewrite (per the
// strategy) whose produced rule has the smallest width, as long as that
// width is at most cfg.threshold.  Ties break on rule ids.  Deterministic.
RuleBase simplify(const RuleBase& rb, const SimplifyConfig& cfg);

// Operational approximation check: for every complete context, does the
// interval product of arb contain the (interval) product of rb (up to 1e-12
// rounding slack)?  Returns a witnessing context on failure.  Enumerates up
// to max_enum contexts.
std::optional<Context> check_approximates(const RuleBase& arb, const RuleBase& rb,
                                          std::uint64_t max_enum = 1u << 22);

// Posterior bounds from an approximating base: run the two-number
// elimination to unnormalized masses [P-(v & e), P+(v & e)], then
//
//   low(v)  = P-(v) / (P-(v) + sum_{w != v} P+(w))
//   high(v) = P+(v) / (P+(v) + sum_{w != v} P-(w))
//
// with 0/0 mapping to low = 0, high = 1, and clamping to [0, 1].  Throws
// ImpossibleEvidence when even the upper mass of every value is zero.
std::pair<BoundedPosterior, InferenceStats> bounded_posterior(
    const RuleBase& arb, VarId query, const Context& evidence,
    std::optional<std::vector<VarId>> order = std::nullopt,
    const EngineOptions& opts = {});

// Shared final step: masses -> clamped posterior bounds.
BoundedPosterior posterior_bounds_from_masses(VarId query, const std::vector<Interval>& masses);

}  // namespace ruleve
