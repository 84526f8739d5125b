#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ruleve/rulebase.hpp"

namespace ruleve {

struct ValidateOptions {
  // Enumerate complete contexts exhaustively when the joint space is at most
  // this many contexts; otherwise fall back to the symbolic per-family check.
  std::uint64_t max_enum = 1u << 16;
  // Input bases must have every body variable strictly before every head
  // variable in the total ordering.  Intermediate bases produced by the
  // engine are exempt; pass false to skip the check.
  bool require_input_ordering = true;
  // Tolerance for "this variable's rule probabilities sum to one".
  double sum_tol = 1e-6;
};

struct Violation {
  std::string what;
  std::vector<RuleId> rules;        // offending rule ids, if identifiable
  std::optional<Context> witness;   // a context exhibiting the problem
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Check the rule-base invariants: bounds ordered and inside [0, 1]; head and
// body disjoint per rule; degenerate intervals when kind == exact; exactly
// one applicable rule per variable in every complete context; per-variable
// probabilities summing to one (exact bases with single-assignment heads);
// optionally the input body-before-head ordering.
//
// Small joint spaces are checked by exhaustive enumeration.  Larger bases
// with single-assignment heads are checked symbolically (pairwise body
// compatibility, coverage counting, per-family head-value completeness).
// Throws EnumerationBudgetExceeded only when neither strategy applies.
ValidationReport validate(const RuleBase& rb, const ValidateOptions& opts = {});

std::string format_report(const VariableTable& vt, const ValidationReport& report);

}  // namespace ruleve
