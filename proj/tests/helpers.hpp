#pragma once

// Shared fixtures for the test binaries.  The two recurring models:
//  - a two-variable chain (prior 0.3 on a, b depends on a) whose posteriors
//    are easy to compute by hand, and
//  - the six-rule context-specific base over b,c,d,e -> a used throughout
//    the approximation tests, with complement rules and priors so the base
//    as a whole is valid.

#include <memory>
#include <vector>

#include "ruleve/exact.hpp"
#include "ruleve/ingest.hpp"
#include "ruleve/rulebase.hpp"

namespace fixtures {

using namespace ruleve;

inline Context ctx(std::initializer_list<Assignment> items) {
  return Context{std::vector<Assignment>(items)};
}

// a -> b chain: P(a=t)=0.3, P(b=t|a=t)=0.9, P(b=t|a=f)=0.2.
// P(b=t) = 0.41, P(a=t|b=t) = 27/41.
inline RuleBase chain_rules() {
  auto vt = std::make_shared<VariableTable>();
  VarId a = vt->add("a", {"t", "f"});
  VarId b = vt->add("b", {"t", "f"});
  RuleBase rb;
  rb.vars = vt;
  rb.rules = {
      {0, Context::single(a, 0), {}, Interval::exact(0.3)},
      {1, Context::single(a, 1), {}, Interval::exact(0.7)},
      {2, Context::single(b, 0), Context::single(a, 0), Interval::exact(0.9)},
      {3, Context::single(b, 1), Context::single(a, 0), Interval::exact(0.1)},
      {4, Context::single(b, 0), Context::single(a, 1), Interval::exact(0.2)},
      {5, Context::single(b, 1), Context::single(a, 1), Interval::exact(0.8)},
  };
  rb.next_id = 6;
  return rb;
}

inline TabularNetwork chain_network() {
  auto vt = std::make_shared<VariableTable>();
  VarId a = vt->add("a", {"t", "f"});
  VarId b = vt->add("b", {"t", "f"});
  TabularNetwork net;
  net.vars = vt;
  net.cpts.push_back({a, {}, {{0.3, 0.7}}});
  net.cpts.push_back({b, {a}, {{0.9, 0.1}, {0.2, 0.8}}});
  return net;
}

// Holds the context-specific base plus the ids the tests refer to.
struct CsiBase {
  RuleBase rb;
  VarId b = 0, c = 1, d = 2, e = 3, a = 4;
  // ids of the six a=t rules, in the order usually numbered 3..8
  RuleId r3 = 3, r4 = 4, r5 = 5, r6 = 6, r7 = 7, r8 = 8;
};

// Six context-specific rules for a=t:
//   (3) a <- b & c         : 0.6
//   (4) a <- b & ~c & d    : 0.8
//   (5) a <- b & ~c & ~d   : 0.4
//   (6) a <- ~b & e        : 0.06
//   (7) a <- ~b & ~e & c   : 0.96
//   (8) a <- ~b & ~e & ~c  : 0.16
// plus a=f complements (ids 13..18) and priors on b,c,d,e (ids 20..27).
inline CsiBase csi_base() {
  CsiBase f;
  auto vt = std::make_shared<VariableTable>();
  f.b = vt->add("b", {"t", "f"});
  f.c = vt->add("c", {"t", "f"});
  f.d = vt->add("d", {"t", "f"});
  f.e = vt->add("e", {"t", "f"});
  f.a = vt->add("a", {"t", "f"});
  const ValueIx T = 0, F = 1;

  auto at = Context::single(f.a, T);
  auto af = Context::single(f.a, F);
  std::vector<std::pair<Context, double>> shapes = {
      {ctx({{f.b, T}, {f.c, T}}), 0.6},          // (3)
      {ctx({{f.b, T}, {f.c, F}, {f.d, T}}), 0.8},  // (4)
      {ctx({{f.b, T}, {f.c, F}, {f.d, F}}), 0.4},  // (5)
      {ctx({{f.b, F}, {f.e, T}}), 0.06},         // (6)
      {ctx({{f.b, F}, {f.e, F}, {f.c, T}}), 0.96},  // (7)
      {ctx({{f.b, F}, {f.e, F}, {f.c, F}}), 0.16},  // (8)
  };
  RuleBase rb;
  rb.vars = vt;
  RuleId id = 3;
  for (const auto& [body, p] : shapes) rb.rules.push_back({id++, at, body, Interval::exact(p)});
  id = 13;
  for (const auto& [body, p] : shapes)
    rb.rules.push_back({id++, af, body, Interval::exact(1.0 - p)});
  id = 20;
  for (auto [v, p] : std::vector<std::pair<VarId, double>>{
           {f.b, 0.3}, {f.c, 0.6}, {f.d, 0.2}, {f.e, 0.55}}) {
    rb.rules.push_back({id++, Context::single(v, T), {}, Interval::exact(p)});
    rb.rules.push_back({id++, Context::single(v, F), {}, Interval::exact(1.0 - p)});
  }
  rb.next_id = 30;
  f.rb = rb;
  return f;
}

}  // namespace fixtures
