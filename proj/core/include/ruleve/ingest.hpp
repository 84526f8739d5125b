#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ruleve/rulebase.hpp"

namespace ruleve {

// One conditional probability table: rows are stored in canonical row-major
// order over the parent domains (first parent slowest), one probability per
// child value in domain order.
struct Cpt {
  VarId child = -1;
  std::vector<VarId> parents;
  // rows[r][k] = P(child = k | r-th parent assignment)
  std::vector<std::vector<double>> rows;
};

// A fully tabulated network: every variable has a CPT whose parents precede
// it in the total ordering.
struct TabularNetwork {
  VariableTablePtr vars;
  std::vector<Cpt> cpts;  // indexed by child id
};

// Result of parsing one model file: variable declarations plus either a rule
// base or a tabular network (never both).
struct ModelDocument {
  VariableTablePtr vars;
  std::optional<RuleBase> rules;
  std::optional<TabularNetwork> network;

  bool is_tabular() const { return network.has_value(); }
};

// Parse model text.  Grammar (whitespace-insensitive, '#' starts a comment):
//
//   document  := decl*
//   decl      := var_decl | rule_decl | cpt_decl
//   var_decl  := "variable" IDENT "{" IDENT ("," IDENT)* "}"
//   rule_decl := "rule" head "<-" body ":" NUMBER ("," NUMBER)?
//   head      := assign ("&" assign)*
//   body      := [ assign ("&" assign)* ]          (possibly empty)
//   assign    := IDENT "=" IDENT
//   cpt_decl  := "cpt" IDENT "|" IDENT* "{" row* "}"
//   row       := IDENT* ":" NUMBER+
//
// One NUMBER is an exact probability; two give an interval.  Variable order
// of declaration is the global total ordering.  Throws ParseError on grammar
// failures and SemanticError on undeclared names, duplicate declarations,
// domains of size one, probabilities outside [0, 1], lower > upper, rows
// that do not sum to one, and incomplete or duplicated CPT rows.
ModelDocument parse_model(std::string_view text, std::string_view origin = "<input>");

// Canonical text form; parse_model(render(doc)) reproduces doc exactly.
std::string render(const ModelDocument& doc);
std::string render(const TabularNetwork& net);
std::string render(const RuleBase& rb);

// One rule per CPT row per child value: child=v <- parent assignment : p.
// Rule ids run row-major per variable in ordering sequence.
RuleBase cpt_to_rules(const TabularNetwork& net);

// Repeatedly merge rule families {head <- body & e=v : [lv, uv] | v in
// val(e)} into head <- body : [min lv, max uv] whenever the merged width is
// at most `threshold`, scanning candidates in deterministic order (head,
// then residual body, then e) until fixpoint.  With threshold 0 on an exact
// base this removes redundancy without changing any probability.  When
// `extreme_guard` is set, merges that would produce a non-degenerate
// interval reaching into [0, eps] or [1-eps, 1] (eps = 1e-3) are refused.
RuleBase extract_structure(const RuleBase& rb, double threshold,
                           bool extreme_guard = false);

// Per-variable size accounting for compression reports.
struct StructureCount {
  VarId variable = -1;
  std::uint64_t table_rows = 0;     // rows of the tabular CPT (1 if no parents)
  std::uint64_t table_entries = 0;  // rows * |val(child)|
  std::uint64_t rules_exact = 0;    // rules with this head var after threshold-0 merge
  std::uint64_t rules_at_threshold = 0;
};

std::vector<StructureCount> count_structure(const TabularNetwork& net, double threshold,
                                            bool extreme_guard = false);

}  // namespace ruleve
