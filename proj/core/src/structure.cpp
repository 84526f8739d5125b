#include <algorithm>
#include <map>
#include <tuple>

#include "ruleve/ingest.hpp"

namespace ruleve {

RuleBase cpt_to_rules(const TabularNetwork& net) {
  const VariableTable& vt = *net.vars;
  RuleBase rb;
  rb.vars = net.vars;
  rb.kind = RuleBaseKind::exact;
  RuleId id = 0;
  for (const Cpt& cpt : net.cpts) {
    std::size_t row = 0;
    for_each_assignment(vt, cpt.parents, [&](std::span<const ValueIx> values) {
      std::vector<Assignment> items;
      items.reserve(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) items.push_back({cpt.parents[i], values[i]});
      Context body{std::move(items)};
      for (ValueIx v = 0; v < vt[cpt.child].domain_size(); ++v) {
        rb.rules.push_back({id++, Context::single(cpt.child, v), body,
                            Interval::exact(cpt.rows[row][static_cast<std::size_t>(v)])});
      }
      ++row;
    });
  }
  rb.next_id = id;
  return rb;
}

namespace {

// Refuse merges that would smear a (near-)deterministic value: a widened
// interval touching the edge of [0,1] destroys the strongest information a
// model carries.
bool guard_refuses(const Interval& merged, double eps) {
  return merged.width() > 0.0 && (merged.lo <= eps || merged.hi >= 1.0 - eps);
}

struct MergeKey {
  Context head, body;
  VarId on;
  auto operator<=>(const MergeKey&) const = default;
};

// One pass over the rule set: find every family {head <- body & on=v : I_v}
// that covers each value of `on` exactly once and whose interval hull is
// narrow enough. Returns candidates keyed for deterministic selection.
std::map<MergeKey, std::vector<RuleId>> merge_candidates(const RuleBase& rb, double threshold,
                                                         bool extreme_guard, double eps) {
  const VariableTable& vt = *rb.vars;
  std::map<MergeKey, std::vector<std::pair<ValueIx, RuleId>>> groups;
  for (const Rule& r : rb.rules)
    for (const Assignment& a : r.body.items())
      groups[{r.head, r.body.without(a.var), a.var}].push_back({a.value, r.id});

  std::map<MergeKey, std::vector<RuleId>> out;
  for (auto& [key, members] : groups) {
    if (members.size() != static_cast<std::size_t>(vt[key.on].domain_size())) continue;
    std::sort(members.begin(), members.end());
    bool full = true;
    for (std::size_t v = 0; v < members.size(); ++v)
      full = full && members[v].first == static_cast<ValueIx>(v);
    if (!full) continue;
    Interval hull = rb.find_rule(members[0].second)->prob;
    std::vector<RuleId> ids;
    for (const auto& [value, rid] : members) {
      hull = Interval::hull(hull, rb.find_rule(rid)->prob);
      ids.push_back(rid);
    }
    if (hull.width() > threshold) continue;
    if (extreme_guard && guard_refuses(hull, eps)) continue;
    out.emplace(key, std::move(ids));
  }
  return out;
}

void apply_merge(RuleBase& rb, const MergeKey& key, const std::vector<RuleId>& ids) {
  Interval hull = rb.find_rule(ids[0])->prob;
  for (RuleId rid : ids) hull = Interval::hull(hull, rb.find_rule(rid)->prob);
  std::erase_if(rb.rules, [&](const Rule& r) {
    return std::find(ids.begin(), ids.end(), r.id) != ids.end();
  });
  rb.rules.push_back({rb.next_id++, key.head, key.body, hull});
}

}  // namespace

RuleBase extract_structure(const RuleBase& rb, double threshold, bool extreme_guard) {
  if (threshold < 0.0) throw InvalidArgument("threshold must be non-negative");
  RuleBase out = rb;
  constexpr double kGuardEps = 1e-3;
  for (;;) {
    auto candidates = merge_candidates(out, threshold, extreme_guard, kGuardEps);
    if (candidates.empty()) break;
    const auto& [key, ids] = *candidates.begin();
    apply_merge(out, key, ids);
  }
  std::sort(out.rules.begin(), out.rules.end(),
            [](const Rule& a, const Rule& b) { return a.id < b.id; });
  if (threshold > 0.0) out.kind = RuleBaseKind::approximating;
  return out;
}

std::vector<StructureCount> count_structure(const TabularNetwork& net, double threshold,
                                            bool extreme_guard) {
  const VariableTable& vt = *net.vars;
  RuleBase flat = cpt_to_rules(net);
  RuleBase exact = extract_structure(flat, 0.0, false);
  RuleBase at = extract_structure(flat, threshold, extreme_guard);

  std::vector<StructureCount> out;
  for (const Cpt& cpt : net.cpts) {
    StructureCount c;
    c.variable = cpt.child;
    c.table_rows = cpt.rows.size();
    c.table_entries = cpt.rows.size() * static_cast<std::size_t>(vt[cpt.child].domain_size());
    c.rules_exact = 0;
    c.rules_at_threshold = 0;
    for (const Rule& r : exact.rules)
      if (r.head.assigns(cpt.child)) ++c.rules_exact;
    for (const Rule& r : at.rules)
      if (r.head.assigns(cpt.child)) ++c.rules_at_threshold;
    out.push_back(c);
  }
  return out;
}

}  // namespace ruleve
