#include <algorithm>
#include <vector>

#include "ruleve/oracle.hpp"

namespace ruleve {

namespace {

// Kahan-compensated accumulator; enumeration sums millions of tiny products
// and the acceptance tolerances leave no room for drift.
struct Accumulator {
  double sum = 0.0, carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

std::size_t checked_joint(const VariableTable& vt, std::uint64_t max_enum) {
  auto joint = vt.joint_size(max_enum);
  if (!joint) throw EnumerationBudgetExceeded("joint space exceeds the enumeration budget");
  return static_cast<std::size_t>(*joint);
}

void check_query(const VariableTable& vt, VarId query, const Context& evidence) {
  if (query < 0 || query >= vt.size()) throw InvalidArgument("query variable out of range");
  if (evidence.assigns(query)) throw InvalidArgument("query variable is observed");
}

bool matches_evidence(std::span<const ValueIx> values, const Context& evidence) {
  for (const Assignment& a : evidence.items())
    if (values[static_cast<std::size_t>(a.var)] != a.value) return false;
  return true;
}

}  // namespace

Distribution enumerate_posterior(const RuleBase& rb, VarId query, const Context& evidence,
                                 std::uint64_t max_enum) {
  if (rb.kind != RuleBaseKind::exact)
    throw InvalidArgument("posterior enumeration requires point-valued rules");
  const VariableTable& vt = *rb.vars;
  check_query(vt, query, evidence);
  checked_joint(vt, max_enum);

  std::vector<Accumulator> mass(static_cast<std::size_t>(vt[query].domain_size()));
  for_each_complete(vt, [&](std::span<const ValueIx> values) {
    if (!matches_evidence(values, evidence)) return;
    double p = 1.0;
    for (const Rule& r : rb.rules)
      if (applicable_in(r, values)) p *= r.prob.lo;
    mass[static_cast<std::size_t>(values[static_cast<std::size_t>(query)])].add(p);
  });

  double total = 0.0;
  for (const Accumulator& a : mass) total += a.sum;
  if (total <= 0.0) throw ImpossibleEvidence("evidence has zero probability");
  Distribution dist;
  dist.variable = query;
  for (const Accumulator& a : mass) dist.probs.push_back(a.sum / total);
  return dist;
}

BoundedPosterior enumerate_bounds(const RuleBase& arb, VarId query, const Context& evidence,
                                  std::uint64_t max_enum) {
  const VariableTable& vt = *arb.vars;
  check_query(vt, query, evidence);
  checked_joint(vt, max_enum);

  auto k = static_cast<std::size_t>(vt[query].domain_size());
  std::vector<Accumulator> lo(k), hi(k);
  for_each_complete(vt, [&](std::span<const ValueIx> values) {
    if (!matches_evidence(values, evidence)) return;
    double plo = 1.0, phi = 1.0;
    for (const Rule& r : arb.rules) {
      if (!applicable_in(r, values)) continue;
      plo *= r.prob.lo;
      phi *= r.prob.hi;
    }
    auto qv = static_cast<std::size_t>(values[static_cast<std::size_t>(query)]);
    lo[qv].add(plo);
    hi[qv].add(phi);
  });

  double upper_total = 0.0;
  for (const Accumulator& a : hi) upper_total += a.sum;
  if (upper_total <= 0.0) throw ImpossibleEvidence("evidence has zero probability");

  BoundedPosterior bp;
  bp.variable = query;
  for (std::size_t v = 0; v < k; ++v) {
    double rest_hi = 0.0, rest_lo = 0.0;
    for (std::size_t w = 0; w < k; ++w) {
      if (w == v) continue;
      rest_hi += hi[w].sum;
      rest_lo += lo[w].sum;
    }
    double den_lo = lo[v].sum + rest_hi;
    double den_hi = hi[v].sum + rest_lo;
    double l = den_lo > 0.0 ? lo[v].sum / den_lo : 0.0;
    double h = den_hi > 0.0 ? hi[v].sum / den_hi : 1.0;
    l = std::clamp(l, 0.0, 1.0);
    h = std::clamp(h, 0.0, 1.0);
    bp.bounds.push_back({l, std::max(l, h)});
  }
  return bp;
}

Interval enumerate_conjunction(const RuleBase& rb, const Context& ctx, std::uint64_t max_enum) {
  const VariableTable& vt = *rb.vars;
  checked_joint(vt, max_enum);
  Accumulator lo, hi;
  for_each_complete(vt, [&](std::span<const ValueIx> values) {
    if (!matches_evidence(values, ctx)) return;
    double plo = 1.0, phi = 1.0;
    for (const Rule& r : rb.rules) {
      if (!applicable_in(r, values)) continue;
      plo *= r.prob.lo;
      phi *= r.prob.hi;
    }
    lo.add(plo);
    hi.add(phi);
  });
  return {lo.sum, std::max(lo.sum, hi.sum)};
}

RuleBase perturb_parameter(const RuleBase& rb, RuleId rule, double delta) {
  const Rule* target = rb.find_rule(rule);
  if (!target) throw InvalidTarget("no rule with the requested id");
  Interval moved{target->prob.lo + delta, target->prob.hi + delta};
  if (moved.lo < 0.0 || moved.hi > 1.0)
    throw OutOfRange("perturbed probability leaves [0, 1]");
  RuleBase out = rb;
  for (Rule& r : out.rules)
    if (r.id == rule) r.prob = moved;
  return out;
}

}  // namespace ruleve
