#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ruleve/context.hpp"

namespace ruleve {

using RuleId = std::int32_t;

// A closed probability interval.  Exact rules carry a degenerate interval
// (lo == hi); approximating rules carry lo <= hi.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval exact(double p) { return {p, p}; }
  double width() const { return hi - lo; }
  bool degenerate(double eps = 0.0) const { return hi - lo <= eps; }
  bool contains(double p, double slack = 0.0) const { return lo - slack <= p && p <= hi + slack; }
  bool contains(const Interval& other, double slack = 0.0) const {
    return lo - slack <= other.lo && other.hi <= hi + slack;
  }

  friend Interval operator*(const Interval& a, const Interval& b) {
    return {a.lo * b.lo, a.hi * b.hi};  // nonnegative operands only
  }
  friend Interval operator+(const Interval& a, const Interval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
  }
  static Interval hull(const Interval& a, const Interval& b) {
    return {a.lo < b.lo ? a.lo : b.lo, a.hi > b.hi ? a.hi : b.hi};
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// head <- body : [lo, hi].  Head and body assign disjoint variable sets; an
// empty head means "true" (arises only during inference).
struct Rule {
  RuleId id = -1;
  Context head;
  Context body;
  Interval prob;

  // head and body merged into one assignment set.
  Context full_context() const { return unite(head, body); }
  bool mentions(VarId v) const { return head.assigns(v) || body.assigns(v); }
};

enum class RuleBaseKind { exact, approximating };

struct RuleBase {
  VariableTablePtr vars;
  std::vector<Rule> rules;  // kept sorted by id
  RuleBaseKind kind = RuleBaseKind::exact;
  RuleId next_id = 0;

  const Rule* find_rule(RuleId id) const;
  RuleId fresh_id() { return next_id++; }
};

// Def-style applicability, tolerant of partial contexts: every body
// assignment must be present in ctx, and no head assignment may conflict
// with ctx.  On complete contexts this is exactly "ctx satisfies head and
// body".
bool is_applicable(const Rule& rule, const Context& ctx);

// Fast path for enumeration: `values` holds one value index per variable id.
bool applicable_in(const Rule& rule, std::span<const ValueIx> values);

// Two rules are compatible iff no variable is assigned different values
// across their heads and bodies.
bool are_compatible(const Rule& a, const Rule& b);

// Product of the intervals of all rules applicable in a complete context.
Interval interval_product(std::span<const Rule> rules, std::span<const ValueIx> values);

// Probability of a complete context: the product over applicable rules.
// Throws MalformedRuleBase unless every variable has exactly one applicable
// rule carrying it in the head.
Interval complete_context_probability(const RuleBase& rb, const Context& ctx);

std::string format_rule(const VariableTable& vt, const Rule& rule);
std::string format_interval(const Interval& iv);

}  // namespace ruleve
