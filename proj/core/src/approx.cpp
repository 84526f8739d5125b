#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "ruleve/approx.hpp"
#include "ruleve/oracle.hpp"

namespace ruleve {

namespace {

constexpr double kGuardEps = 1e-3;

bool guard_refuses(const Interval& merged, double eps) {
  return merged.width() > 0.0 && (merged.lo <= eps || merged.hi >= 1.0 - eps);
}

// Smallest-id body variable of `wide` that `narrow` does not constrain and
// that can be negated with a single assignment (binary domain).
std::optional<Assignment> distinguishing_negation(const VariableTable& vt, const Context& wide,
                                                  const Context& narrow) {
  for (const Assignment& a : wide.items()) {
    if (narrow.assigns(a.var)) continue;
    if (vt[a.var].domain_size() != 2) continue;
    return Assignment{a.var, a.value == 0 ? ValueIx{1} : ValueIx{0}};
  }
  return std::nullopt;
}

struct DropPlan {
  Context new_body;
  Interval bounds;
  std::vector<RuleId> remove;                      // compat rules subsumed by the widened one
  std::vector<std::pair<RuleId, Assignment>> add;  // compat rules kept, with the negation to add
};

// Work out the full effect of removing `var` from the body of `target`
// without touching the base. Returns nullopt when exclusivity cannot be
// restored by single negated conditions.
std::optional<DropPlan> plan_drop(const RuleBase& rb, const Rule& target, VarId var) {
  DropPlan plan;
  plan.new_body = target.body.without(var);
  plan.bounds = target.prob;
  for (const Rule& s : rb.rules) {
    if (s.id == target.id || !(s.head == target.head)) continue;
    if (!compatible(s.body, plan.new_body)) continue;
    plan.bounds = Interval::hull(plan.bounds, s.prob);
    if (s.body.contains(plan.new_body)) {
      plan.remove.push_back(s.id);
    } else {
      auto neg = distinguishing_negation(*rb.vars, plan.new_body, s.body);
      if (!neg) return std::nullopt;
      plan.add.push_back({s.id, *neg});
    }
  }
  return plan;
}

RuleBase apply_drop(const RuleBase& rb, const Rule& target, const DropPlan& plan) {
  RuleBase out;
  out.vars = rb.vars;
  out.kind = RuleBaseKind::approximating;
  out.next_id = rb.next_id;
  for (const Rule& r : rb.rules) {
    if (std::find(plan.remove.begin(), plan.remove.end(), r.id) != plan.remove.end()) continue;
    if (r.id == target.id) {
      out.rules.push_back({r.id, r.head, plan.new_body, plan.bounds});
      continue;
    }
    auto it = std::find_if(plan.add.begin(), plan.add.end(),
                           [&](const auto& p) { return p.first == r.id; });
    if (it != plan.add.end()) {
      out.rules.push_back({r.id, r.head, r.body.with(it->second.var, it->second.value), r.prob});
    } else {
      out.rules.push_back(r);
    }
  }
  return out;
}

struct ResolveKey {
  Context head, body;
  VarId on;
  auto operator<=>(const ResolveKey&) const = default;
};

// Families {head <- body & on=v} covering every value of `on` exactly once.
std::map<ResolveKey, std::vector<RuleId>> resolve_candidates(const RuleBase& rb) {
  const VariableTable& vt = *rb.vars;
  std::map<ResolveKey, std::vector<std::pair<ValueIx, RuleId>>> groups;
  for (const Rule& r : rb.rules)
    for (const Assignment& a : r.body.items())
      groups[{r.head, r.body.without(a.var), a.var}].push_back({a.value, r.id});
  std::map<ResolveKey, std::vector<RuleId>> out;
  for (auto& [key, members] : groups) {
    if (members.size() != static_cast<std::size_t>(vt[key.on].domain_size())) continue;
    std::sort(members.begin(), members.end());
    bool full = true;
    for (std::size_t v = 0; v < members.size(); ++v)
      full = full && members[v].first == static_cast<ValueIx>(v);
    if (!full) continue;
    std::vector<RuleId> ids;
    for (const auto& [value, rid] : members) ids.push_back(rid);
    out.emplace(key, std::move(ids));
  }
  return out;
}

}  // namespace

RuleBase drop_condition(const RuleBase& rb, RuleId rule, VarId var) {
  const Rule* target = rb.find_rule(rule);
  if (!target) throw InvalidTarget("no rule with the requested id");
  if (!target->body.assigns(var))
    throw InvalidTarget("the rule's body does not constrain the requested variable");
  auto plan = plan_drop(rb, *target, var);
  if (!plan)
    throw InvalidTarget(
        "dropping the condition leaves overlapping rules that no single negated "
        "condition can separate");
  return apply_drop(rb, *target, *plan);
}

RuleBase resolve_on(const RuleBase& rb, const Context& head, const Context& body, VarId e) {
  if (e < 0 || e >= rb.vars->size()) throw InvalidTarget("unknown variable");
  if (head.assigns(e) || body.assigns(e))
    throw InvalidArgument("the residual head and body must not mention the resolved variable");
  const VariableTable& vt = *rb.vars;

  // One member per value of e: same head, e = v in the body, and the rest of
  // the body contained in the residual body.  This admits members more
  // general than the residual (their residual a subset of `body`), which is
  // what lets one specific rule take part in several resolutions.
  Interval hull{1.0, 0.0};
  bool first = true;
  for (ValueIx v = 0; v < vt[e].domain_size(); ++v) {
    const Rule* found = nullptr;
    for (const Rule& r : rb.rules) {
      if (!(r.head == head) || r.body.value_of(e) != v) continue;
      if (!body.contains(r.body.without(e))) continue;
      if (found) throw IncompleteFamily("ambiguous family member");
      found = &r;
    }
    if (!found) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "no family member for %s=%s", vt[e].name.c_str(),
                    vt[e].values[static_cast<std::size_t>(v)].c_str());
      throw IncompleteFamily(buf);
    }
    hull = first ? found->prob : Interval::hull(hull, found->prob);
    first = false;
  }

  // The new rule covers every context extending `body`, so any same-head
  // rule whose body extends it is subsumed.  Members with strictly smaller
  // bodies stay: they still cover contexts the new rule does not.
  RuleBase out;
  out.vars = rb.vars;
  out.kind = RuleBaseKind::approximating;
  out.next_id = rb.next_id;
  for (const Rule& r : rb.rules)
    if (!(r.head == head) || !r.body.contains(body)) out.rules.push_back(r);
  out.rules.push_back({out.next_id++, head, body, hull});
  return out;
}

RuleBase simplify(const RuleBase& rb, const SimplifyConfig& cfg) {
  if (cfg.threshold < 0.0) throw InvalidArgument("threshold must be non-negative");
  RuleBase out = rb;
  // A positive threshold can widen intervals; zero-width rewrites keep the
  // base exact if it was exact.
  if (cfg.threshold > 0.0) out.kind = RuleBaseKind::approximating;

  // Ordered action key: narrowest hull first, resolve before drop on ties,
  // then the structural key. Rebuilt from scratch after every rewrite since
  // ids and bodies shift under us.
  struct Action {
    double width;
    int kind;  // 0 = resolve, 1 = drop
    ResolveKey rkey;
    std::vector<RuleId> rids;
    RuleId drop_rule = -1;
    VarId drop_var = -1;
    bool operator<(const Action& o) const {
      if (width != o.width) return width < o.width;
      if (kind != o.kind) return kind < o.kind;
      if (kind == 0) return rkey < o.rkey;
      return std::tie(drop_rule, drop_var) < std::tie(o.drop_rule, o.drop_var);
    }
  };

  for (;;) {
    std::optional<Action> best;
    auto consider = [&](Action a) {
      if (!best || a < *best) best = std::move(a);
    };
    if (cfg.strategy == SimplifyStrategy::resolve || cfg.strategy == SimplifyStrategy::both) {
      for (auto& [key, ids] : resolve_candidates(out)) {
        Interval hull = out.find_rule(ids[0])->prob;
        for (RuleId rid : ids) hull = Interval::hull(hull, out.find_rule(rid)->prob);
        if (hull.width() > cfg.threshold) continue;
        if (cfg.extreme_guard && guard_refuses(hull, cfg.extreme_eps)) continue;
        consider({hull.width(), 0, key, ids, -1, -1});
      }
    }
    if (cfg.strategy == SimplifyStrategy::drop || cfg.strategy == SimplifyStrategy::both) {
      for (const Rule& r : out.rules) {
        for (const Assignment& a : r.body.items()) {
          auto plan = plan_drop(out, r, a.var);
          if (!plan) continue;
          // Progress guard: a drop that removes nothing while lengthening a
          // sibling's body can undo an earlier drop and cycle forever.  Keep
          // only plans that shrink the base outright or shorten the target
          // with no side effects; every step then strictly decreases
          // (rule count, total body size), so the loop terminates.
          if (plan->remove.empty() && !plan->add.empty()) continue;
          if (plan->bounds.width() > cfg.threshold) continue;
          if (cfg.extreme_guard && guard_refuses(plan->bounds, cfg.extreme_eps)) continue;
          consider({plan->bounds.width(), 1, {}, {}, r.id, a.var});
        }
      }
    }
    if (!best) break;
    RuleBaseKind kind = out.kind;
    if (best->kind == 0)
      out = resolve_on(out, best->rkey.head, best->rkey.body, best->rkey.on);
    else
      out = drop_condition(out, best->drop_rule, best->drop_var);
    out.kind = kind;  // the operators mark approximating; the threshold decides here
    std::sort(out.rules.begin(), out.rules.end(),
              [](const Rule& a, const Rule& b) { return a.id < b.id; });
  }
  return out;
}

std::optional<Context> check_approximates(const RuleBase& arb, const RuleBase& rb,
                                          std::uint64_t max_enum) {
  if (!arb.vars->same_shape(*rb.vars))
    throw InvalidArgument("rule bases must share the same variables");
  auto joint = arb.vars->joint_size(max_enum);
  if (!joint) throw EnumerationBudgetExceeded("joint space exceeds the enumeration budget");
  // Slack for rounding: the two bases multiply different factor counts, so
  // equal products can differ in the last ulps.
  constexpr double kSlack = 1e-12;
  std::optional<Context> witness;
  for_each_complete(*arb.vars, [&](std::span<const ValueIx> values) {
    if (witness) return;
    Interval wide = interval_product(arb.rules, values);
    Interval tight = interval_product(rb.rules, values);
    if (wide.lo <= tight.lo + kSlack && tight.hi <= wide.hi + kSlack) return;
    std::vector<Assignment> items;
    items.reserve(values.size());
    for (VarId v = 0; v < static_cast<VarId>(values.size()); ++v)
      items.push_back({v, values[static_cast<std::size_t>(v)]});
    witness = Context{std::move(items)};
  });
  return witness;
}

BoundedPosterior posterior_bounds_from_masses(VarId query, const std::vector<Interval>& masses) {
  BoundedPosterior bp;
  bp.variable = query;
  for (std::size_t v = 0; v < masses.size(); ++v) {
    double rest_hi = 0.0, rest_lo = 0.0;
    for (std::size_t w = 0; w < masses.size(); ++w) {
      if (w == v) continue;
      rest_hi += masses[w].hi;
      rest_lo += masses[w].lo;
    }
    double den_lo = masses[v].lo + rest_hi;
    double den_hi = masses[v].hi + rest_lo;
    double lo = den_lo > 0.0 ? masses[v].lo / den_lo : 0.0;
    double hi = den_hi > 0.0 ? masses[v].hi / den_hi : 1.0;
    lo = std::clamp(lo, 0.0, 1.0);
    hi = std::clamp(hi, 0.0, 1.0);
    bp.bounds.push_back({lo, std::max(lo, hi)});
  }
  return bp;
}

std::pair<BoundedPosterior, InferenceStats> bounded_posterior(
    const RuleBase& arb, VarId query, const Context& evidence,
    std::optional<std::vector<VarId>> order, const EngineOptions& opts) {
  auto [masses, stats] = eliminate_to_masses(arb, query, evidence, std::move(order), opts);
  double upper_total = 0.0;
  for (const Interval& m : masses) upper_total += m.hi;
  if (upper_total <= 0.0) throw ImpossibleEvidence("evidence has zero probability");
  return {posterior_bounds_from_masses(query, masses), std::move(stats)};
}

}  // namespace ruleve
