#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "ruleve/approx.hpp"
#include "ruleve/exact.hpp"

namespace ruleve {

namespace {

constexpr double kUnitTol = 1e-9;  // treat true <- : [1,1] as droppable noise

// Conditioning a rule on evidence either refutes it (nullopt result flag),
// keeps it untouched, or strips the satisfied assignments.
struct Conditioned {
  bool alive = true;
  Context head, body;
};

Conditioned condition(const Rule& r, const Context& evidence) {
  Conditioned c;
  c.head = r.head;
  c.body = r.body;
  for (const Assignment& a : evidence.items()) {
    if (auto hv = c.head.value_of(a.var)) {
      if (*hv != a.value) {
        c.alive = false;
        return c;
      }
      c.head = c.head.without(a.var);
    }
    if (auto bv = c.body.value_of(a.var)) {
      if (*bv != a.value) {
        c.alive = false;
        return c;
      }
      c.body = c.body.without(a.var);
    }
  }
  return c;
}

// First variable assigned by `wider` that `narrow` is silent on, or -1.
VarId first_missing_var(const Context& narrow, const Context& wider) {
  for (const Assignment& a : wider.items())
    if (!narrow.assigns(a.var)) return a.var;
  return -1;
}

std::vector<Rule> combine_impl(const VariableTable& vt, std::vector<const Rule*> rules, VarId e,
                               RuleId& next_id, std::size_t rule_cap) {
  std::sort(rules.begin(), rules.end(),
            [](const Rule* a, const Rule* b) { return a->id < b->id; });
  std::vector<Rule> out;
  for (ValueIx v = 0; v < vt[e].domain_size(); ++v) {
    std::vector<Rule> work;
    for (const Rule* r : rules)
      if (r->body.value_of(e) == v) work.push_back(*r);
    if (work.empty()) continue;

    // Multiply compatible rules pairwise.  Two compatible rules over the
    // same variables agree everywhere, so they fold into one product rule;
    // otherwise the rule silent on one of the other's variables is split on
    // that variable first, so a product never claims contexts where only
    // part of it applied.  Fragments only narrow, so compatibilities only
    // disappear and the loop reaches a pairwise-incompatible fixpoint that
    // still covers every context an input covered.
    bool acted = true;
    while (acted) {
      acted = false;
      for (std::size_t i = 0; i < work.size() && !acted; ++i) {
        Context ci = work[i].full_context();
        for (std::size_t j = i + 1; j < work.size() && !acted; ++j) {
          Context cj = work[j].full_context();
          if (!compatible(ci, cj)) continue;
          VarId split_i = first_missing_var(ci, cj);
          VarId split_j = first_missing_var(cj, ci);
          if (split_i < 0 && split_j < 0) {
            Context head = unite(work[i].head, work[j].head);
            Context body = unite(work[i].body, work[j].body).minus_vars(head);
            Interval prob = work[i].prob * work[j].prob;
            work.erase(work.begin() + static_cast<std::ptrdiff_t>(j));
            work.erase(work.begin() + static_cast<std::ptrdiff_t>(i));
            work.push_back({next_id++, std::move(head), std::move(body), prob});
          } else {
            std::size_t target = split_i >= 0 ? i : j;
            VarId x = split_i >= 0 ? split_i : split_j;
            Rule r = std::move(work[target]);
            work.erase(work.begin() + static_cast<std::ptrdiff_t>(target));
            for (ValueIx w = 0; w < vt[x].domain_size(); ++w)
              work.push_back({next_id++, r.head, r.body.with(x, w), r.prob});
          }
          if (work.size() > rule_cap)
            throw ResourceLimit("combine produced more rules than the configured cap");
          acted = true;
        }
      }
    }
    for (Rule& r : work) out.push_back(std::move(r));
    if (out.size() > rule_cap)
      throw ResourceLimit("combine produced more rules than the configured cap");
  }
  std::sort(out.begin(), out.end(), [](const Rule& a, const Rule& b) { return a.id < b.id; });
  return out;
}

// Split rules until every rule whose head variable also appears as some
// body-rule head for `e` mentions `e` itself. Required so the compatible
// sets seen by the clique search line up exactly with the applicable sets:
// a rule silent on e would otherwise join cliques for every value of e at
// once, and the merged contexts would double-cover part of the space.
void expand_for_elimination(const VariableTable& vt, std::vector<Rule>& rules, VarId e,
                            RuleId& next_id) {
  for (;;) {
    std::set<VarId> involved;
    for (const Rule& r : rules)
      if (r.body.assigns(e))
        for (const Assignment& a : r.head.items()) involved.insert(a.var);
    std::vector<Rule> out;
    bool changed = false;
    for (const Rule& r : rules) {
      bool split = !r.mentions(e) && std::any_of(involved.begin(), involved.end(),
                                                 [&](VarId x) { return r.head.assigns(x); });
      if (!split) {
        out.push_back(r);
        continue;
      }
      changed = true;
      for (ValueIx v = 0; v < vt[e].domain_size(); ++v)
        out.push_back({next_id++, r.head, r.body.with(e, v), r.prob});
    }
    rules = std::move(out);
    if (!changed) return;
  }
}

// One (body choice, head rule) pick per value of e. Body choice may be
// "none" when no combined body rule covers the remaining context.
struct Pick {
  const Rule* body;  // nullptr = none
  const Rule* head;
};

struct SumStep {
  const VariableTable& vt;
  VarId e;
  std::vector<std::vector<const Rule*>> body_by_value, head_by_value;
  std::vector<Rule>* out;
  RuleId* next_id;
  std::size_t rule_cap;

  std::vector<Pick> picks;

  void run() {
    picks.assign(body_by_value.size(), {});
    descend(0, Context{}, Context{});
  }

  void descend(std::size_t vi, const Context& united, const Context& heads) {
    if (vi == body_by_value.size()) {
      emit(united, heads);
      return;
    }
    for (const Rule* h : head_by_value[vi]) {
      Context hctx = h->full_context().without(e);
      // pair with every compatible combined body rule…
      for (const Rule* b : body_by_value[vi]) {
        Context bctx = b->full_context().without(e);
        if (!compatible(bctx, united)) continue;
        Context u1 = unite(bctx, united);
        if (!compatible(hctx, u1)) continue;
        picks[vi] = {b, h};
        descend(vi + 1, unite(hctx, u1), unite(heads, unite(b->head, h->head.without(e))));
      }
      // …and once with no body rule at all
      if (!compatible(hctx, united)) continue;
      picks[vi] = {nullptr, h};
      descend(vi + 1, unite(hctx, united), unite(heads, h->head.without(e)));
    }
  }

  void emit(const Context& united, const Context& heads) {
    // A "none" pick asserts that no body rule for that value applies
    // anywhere under the final context; drop families where one still could.
    for (std::size_t vi = 0; vi < picks.size(); ++vi) {
      if (picks[vi].body != nullptr) continue;
      for (const Rule* b : body_by_value[vi])
        if (compatible(b->full_context().without(e), united)) return;
    }
    Interval prob = Interval::exact(0.0);
    for (const Pick& p : picks) {
      Interval term = p.head->prob;
      if (p.body) term = term * p.body->prob;
      prob = prob + term;
    }
    Context body = united.minus_vars(heads);
    if (heads.empty() && body.empty() && std::fabs(prob.lo - 1.0) <= kUnitTol &&
        std::fabs(prob.hi - 1.0) <= kUnitTol)
      return;  // vacuous "true <- : 1" — carries no information
    out->push_back({(*next_id)++, heads, body, prob});
    if (out->size() > rule_cap)
      throw ResourceLimit("elimination produced more rules than the configured cap");
  }
};

std::vector<Rule> eliminate_impl(const VariableTable& vt, std::vector<Rule> rules, VarId e,
                                 RuleId& next_id, std::size_t rule_cap) {
  SumStep step{vt, e, {}, {}, nullptr, &next_id, rule_cap, {}};
  auto m = static_cast<std::size_t>(vt[e].domain_size());
  step.body_by_value.assign(m, {});
  step.head_by_value.assign(m, {});

  std::vector<Rule> untouched;
  for (const Rule& r : rules) {
    if (auto hv = r.head.value_of(e))
      step.head_by_value[static_cast<std::size_t>(*hv)].push_back(&r);
    else if (auto bv = r.body.value_of(e))
      step.body_by_value[static_cast<std::size_t>(*bv)].push_back(&r);
    else
      untouched.push_back(r);
  }
  for (std::size_t v = 0; v < m; ++v) {
    if (step.head_by_value[v].empty()) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "no rule has %s=%s in its head during elimination",
                    vt[e].name.c_str(), vt[e].values[v].c_str());
      throw MalformedRuleBase(buf);
    }
  }

  std::vector<Rule> emitted;
  step.out = &emitted;
  step.run();
  for (Rule& r : emitted) untouched.push_back(std::move(r));
  std::sort(untouched.begin(), untouched.end(),
            [](const Rule& a, const Rule& b) { return a.id < b.id; });
  if (untouched.size() > rule_cap)
    throw ResourceLimit("elimination produced more rules than the configured cap");
  return untouched;
}

// Full step: uniformize, combine body rules per value, then sum e out.
std::vector<Rule> step_impl(const VariableTable& vt, std::vector<Rule> rules, VarId e,
                            RuleId& next_id, std::size_t rule_cap, std::size_t* created) {
  expand_for_elimination(vt, rules, e, next_id);
  std::vector<Rule> kept;
  std::vector<const Rule*> body_rules;
  for (const Rule& r : rules) {
    if (!r.head.assigns(e) && r.body.assigns(e))
      body_rules.push_back(&r);
    else
      kept.push_back(r);
  }
  std::vector<Rule> combined = combine_impl(vt, std::move(body_rules), e, next_id, rule_cap);
  for (Rule& r : combined) kept.push_back(std::move(r));
  std::sort(kept.begin(), kept.end(), [](const Rule& a, const Rule& b) { return a.id < b.id; });

  std::size_t before_untouched = 0;
  for (const Rule& r : kept)
    if (!r.mentions(e)) ++before_untouched;
  std::vector<Rule> out = eliminate_impl(vt, std::move(kept), e, next_id, rule_cap);
  if (created) *created = out.size() - before_untouched;
  return out;
}

}  // namespace

RuleBase apply_evidence(const RuleBase& rb, const Context& evidence) {
  for (const Assignment& a : evidence.items()) {
    if (a.var < 0 || a.var >= rb.vars->size()) throw InvalidArgument("evidence variable unknown");
    if (a.value < 0 || a.value >= (*rb.vars)[a.var].domain_size())
      throw InvalidArgument("evidence value out of range");
  }
  RuleBase out;
  out.vars = rb.vars;
  out.kind = rb.kind;
  out.next_id = rb.next_id;
  for (const Rule& r : rb.rules) {
    Conditioned c = condition(r, evidence);
    if (c.alive) out.rules.push_back({r.id, std::move(c.head), std::move(c.body), r.prob});
  }
  return out;
}

std::vector<Rule> combine_for_variable(const VariableTable& vt, std::span<const Rule> rules,
                                       VarId e, RuleId first_fresh_id, std::size_t rule_cap) {
  std::vector<const Rule*> ptrs;
  ptrs.reserve(rules.size());
  for (const Rule& r : rules) {
    if (!r.body.assigns(e) || r.head.assigns(e))
      throw InvalidArgument("combine expects rules conditioned on the eliminated variable");
    ptrs.push_back(&r);
  }
  RuleId next = first_fresh_id;
  return combine_impl(vt, std::move(ptrs), e, next, rule_cap);
}

std::vector<Rule> eliminate_variable(const VariableTable& vt, std::span<const Rule> rules,
                                     VarId e, RuleId first_fresh_id, std::size_t rule_cap) {
  RuleId next = first_fresh_id;
  return eliminate_impl(vt, std::vector<Rule>(rules.begin(), rules.end()), e, next, rule_cap);
}

std::pair<std::vector<Interval>, InferenceStats> eliminate_to_masses(
    const RuleBase& rb, VarId query, const Context& evidence,
    std::optional<std::vector<VarId>> order, const EngineOptions& opts) {
  const VariableTable& vt = *rb.vars;
  if (query < 0 || query >= vt.size()) throw InvalidArgument("query variable out of range");
  if (evidence.assigns(query)) throw InvalidArgument("query variable is observed");

  RuleBase ws = apply_evidence(rb, evidence);
  std::vector<VarId> to_elim = variables_to_eliminate(vt, query, evidence);
  std::vector<VarId> elim;
  if (order) {
    elim = *order;
    std::vector<VarId> sorted = elim;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != to_elim)
      throw InvalidArgument("ordering must cover exactly the unobserved non-query variables");
  } else {
    std::vector<std::vector<VarId>> scopes;
    scopes.reserve(ws.rules.size());
    for (const Rule& r : ws.rules) {
      std::vector<VarId> s;
      Context fc = r.full_context();  // keep alive: items() refers into it
      for (const Assignment& a : fc.items()) s.push_back(a.var);
      scopes.push_back(std::move(s));
    }
    elim = min_degree_order(vt.size(), scopes, to_elim);
  }

  std::vector<VarId> remaining = to_elim;
  remaining.push_back(query);
  std::sort(remaining.begin(), remaining.end());
  if (opts.observer) opts.observer(-1, ws.rules, remaining);

  InferenceStats stats;
  RuleId next_id = ws.next_id;
  for (VarId e : elim) {
    std::size_t created = 0;
    ws.rules = step_impl(vt, std::move(ws.rules), e, next_id, opts.rule_cap, &created);
    if (opts.per_step_simplify) {
      RuleBase tmp;
      tmp.vars = rb.vars;
      tmp.rules = std::move(ws.rules);
      tmp.kind = ws.kind;
      tmp.next_id = next_id;
      RuleBase simplified = simplify(tmp, *opts.per_step_simplify);
      ws.rules = std::move(simplified.rules);
      ws.kind = simplified.kind;
      next_id = simplified.next_id;
    }
    StepStats s;
    s.variable = e;
    s.rules_created = created;
    s.rules_active = ws.rules.size();
    stats.note(s);
    remaining.erase(std::find(remaining.begin(), remaining.end(), e));
    if (opts.observer) opts.observer(e, ws.rules, remaining);
  }

  std::vector<Interval> masses;
  for (ValueIx v = 0; v < vt[query].domain_size(); ++v) {
    Interval m = Interval::exact(1.0);
    Context ctx = Context::single(query, v);
    for (const Rule& r : ws.rules) {
      Context fc = r.full_context();
      for (const Assignment& a : fc.items())
        if (a.var != query)
          throw MalformedRuleBase("rule mentioning an eliminated variable survived");
      if (is_applicable(r, ctx)) m = m * r.prob;
    }
    masses.push_back(m);
  }
  return {std::move(masses), std::move(stats)};
}

std::pair<Distribution, InferenceStats> compute_belief(const RuleBase& rb, VarId query,
                                                       const Context& evidence,
                                                       std::optional<std::vector<VarId>> order,
                                                       const EngineOptions& opts) {
  if (rb.kind != RuleBaseKind::exact)
    throw InvalidArgument("belief computation requires point-valued rules");
  auto [masses, stats] = eliminate_to_masses(rb, query, evidence, std::move(order), opts);
  double total = 0.0;
  for (const Interval& m : masses) {
    if (m.hi - m.lo > 1e-12)
      throw InvalidArgument(
          "per-step simplification widened the result; use bounded_posterior instead");
    total += m.lo;
  }
  if (total <= 0.0) throw ImpossibleEvidence("evidence has zero probability");
  Distribution dist;
  dist.variable = query;
  dist.probs.reserve(masses.size());
  for (const Interval& m : masses) dist.probs.push_back(m.lo / total);
  return {std::move(dist), std::move(stats)};
}

}  // namespace ruleve
