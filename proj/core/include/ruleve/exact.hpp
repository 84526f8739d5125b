#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ruleve/ingest.hpp"
#include "ruleve/rulebase.hpp"

namespace ruleve {

// A posterior over one variable's values, normalized to sum to one.
struct Distribution {
  VarId variable = -1;
  std::vector<double> probs;
};

struct StepStats {
  VarId variable = -1;
  std::size_t rules_created = 0;   // rules emitted when summing the variable out
  std::size_t rules_active = 0;    // working-set size after the step
  std::size_t factor_entries = 0;  // entries of the factor created (table engine)
};

struct InferenceStats {
  std::vector<StepStats> steps;
  std::size_t max_rules_created = 0;
  std::size_t max_rules_active = 0;
  std::size_t max_factor_entries = 0;

  void note(const StepStats& s);
};

// Observer hook: called with the working rule set after evidence application
// and after each elimination step.  `eliminated` is -1 for the evidence
// snapshot.  Used by audits and the compare command.
using StepObserver =
    std::function<void(VarId eliminated, const std::vector<Rule>& working,
                       const std::vector<VarId>& remaining)>;

struct SimplifyConfig;  // approx.hpp

struct EngineOptions {
  // Cap on rules emitted while eliminating one variable.
  std::size_t rule_cap = 1'000'000;
  // Optionally simplify the working set after each elimination step.
  const SimplifyConfig* per_step_simplify = nullptr;
  StepObserver observer;
};

// Dense factor for the baseline table engine.  Row-major over `scope` in
// ascending variable order, first variable slowest.
struct Factor {
  std::vector<VarId> scope;
  std::vector<double> table;

  static Factor from_cpt(const VariableTable& vt, const Cpt& cpt);
  static Factor multiply(const VariableTable& vt, const Factor& a, const Factor& b);
  Factor sum_out(const VariableTable& vt, VarId v) const;
  Factor restrict_to(const VariableTable& vt, const Context& evidence) const;
  std::size_t entries() const { return table.size(); }
};

// Default elimination ordering: minimum degree on the interaction graph
// induced by `scopes` (each scope becomes a clique), simulated with fill-in,
// ties broken by smallest variable id.  Returns only variables from
// `to_eliminate`.
std::vector<VarId> min_degree_order(int n_vars,
                                    const std::vector<std::vector<VarId>>& scopes,
                                    std::span<const VarId> to_eliminate);

// Variables of rb that are neither query nor evidence, i.e. the set an
// ordering must cover.
std::vector<VarId> variables_to_eliminate(const VariableTable& vt, VarId query,
                                          const Context& evidence);

// --- rule engine -----------------------------------------------------------

// Condition a rule base on evidence: drop rules mentioning a contradicted
// value, delete satisfied body terms, and move satisfied head terms to
// "true".  Probabilities are untouched.  The result is an intermediate rule
// set (it need not pass input validation).
RuleBase apply_evidence(const RuleBase& rb, const Context& evidence);

// Combine step: `rules` must each contain e = v in the body for some v.
// Per value, compatible rules are split on each other's context variables
// until they coincide, then folded into one product rule (union head, union
// body minus head, interval product), so every emitted rule's probability is
// the product of exactly the inputs applicable in its context.  A rule with
// no compatible partner passes through unchanged.  Emitted rules are
// pairwise incompatible per value and cover the cases the originals covered.
std::vector<Rule> combine_for_variable(const VariableTable& vt, std::span<const Rule> rules,
                                       VarId e, RuleId first_fresh_id,
                                       std::size_t rule_cap = 1'000'000);

// Sum step over a full working set whose e-in-body part has already been
// combined: pair, per value of e, a body rule (or none where nothing
// applies) with the applicable head rule, and emit sum-of-products rules
// without e.  All rules mentioning e are consumed.
std::vector<Rule> eliminate_variable(const VariableTable& vt, std::span<const Rule> rules,
                                     VarId e, RuleId first_fresh_id,
                                     std::size_t rule_cap = 1'000'000);

// Full rule-based posterior on an exact base: apply evidence, eliminate all
// non-query variables (min-degree order when none is given), multiply the
// survivors per query value, normalize.  Throws ImpossibleEvidence when the
// evidence has zero mass.
std::pair<Distribution, InferenceStats> compute_belief(
    const RuleBase& rb, VarId query, const Context& evidence,
    std::optional<std::vector<VarId>> order = std::nullopt,
    const EngineOptions& opts = {});

// Unnormalized interval masses per query value after eliminating everything
// else: the shared core of compute_belief and bounded_posterior.
std::pair<std::vector<Interval>, InferenceStats> eliminate_to_masses(
    const RuleBase& rb, VarId query, const Context& evidence,
    std::optional<std::vector<VarId>> order = std::nullopt,
    const EngineOptions& opts = {});

// --- table engine ----------------------------------------------------------

std::pair<Distribution, InferenceStats> ve_posterior(
    const TabularNetwork& net, VarId query, const Context& evidence,
    std::optional<std::vector<VarId>> order = std::nullopt);

}  // namespace ruleve
