#include "ruleve/rulebase.hpp"

#include <algorithm>
#include <cstdio>

namespace ruleve {

const Rule* RuleBase::find_rule(RuleId id) const {
  auto it = std::lower_bound(rules.begin(), rules.end(), id,
                             [](const Rule& r, RuleId w) { return r.id < w; });
  if (it == rules.end() || it->id != id) return nullptr;
  return &*it;
}

bool is_applicable(const Rule& rule, const Context& ctx) {
  if (!ctx.contains(rule.body)) return false;
  for (const Assignment& a : rule.head.items()) {
    auto v = ctx.value_of(a.var);
    if (v && *v != a.value) return false;
  }
  return true;
}

bool applicable_in(const Rule& rule, std::span<const ValueIx> values) {
  for (const Assignment& a : rule.body.items())
    if (values[static_cast<std::size_t>(a.var)] != a.value) return false;
  for (const Assignment& a : rule.head.items())
    if (values[static_cast<std::size_t>(a.var)] != a.value) return false;
  return true;
}

bool are_compatible(const Rule& a, const Rule& b) {
  return compatible(a.head, b.head) && compatible(a.head, b.body) &&
         compatible(a.body, b.head) && compatible(a.body, b.body);
}

Interval interval_product(std::span<const Rule> rules, std::span<const ValueIx> values) {
  Interval p{1.0, 1.0};
  for (const Rule& r : rules)
    if (applicable_in(r, values)) p = p * r.prob;
  return p;
}

Interval complete_context_probability(const RuleBase& rb, const Context& ctx) {
  const VariableTable& vt = *rb.vars;
  if (static_cast<int>(ctx.size()) != vt.size())
    throw InvalidArgument("complete_context_probability needs a complete context");

  std::vector<int> head_hits(static_cast<std::size_t>(vt.size()), 0);
  Interval p{1.0, 1.0};
  for (const Rule& r : rb.rules) {
    if (!is_applicable(r, ctx)) continue;
    p = p * r.prob;
    for (const Assignment& a : r.head.items()) ++head_hits[static_cast<std::size_t>(a.var)];
  }
  for (int v = 0; v < vt.size(); ++v) {
    if (head_hits[static_cast<std::size_t>(v)] != 1) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "variable '%s' has %d applicable rules in this context",
                    vt[v].name.c_str(), head_hits[static_cast<std::size_t>(v)]);
      throw MalformedRuleBase(buf);
    }
  }
  return p;
}

std::string format_interval(const Interval& iv) {
  char buf[64];
  if (iv.lo == iv.hi) {
    std::snprintf(buf, sizeof buf, "%.12g", iv.lo);
    return buf;
  }
  std::snprintf(buf, sizeof buf, "[%.12g, %.12g]", iv.lo, iv.hi);
  return buf;
}

std::string format_rule(const VariableTable& vt, const Rule& rule) {
  std::string out = format_context(vt, rule.head);
  out += " <- ";
  out += format_context(vt, rule.body);
  out += " : ";
  out += format_interval(rule.prob);
  return out;
}

}  // namespace ruleve
