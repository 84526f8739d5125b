#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "ruleve/approx.hpp"
#include "ruleve/generate.hpp"
#include "ruleve/oracle.hpp"
#include "ruleve/validate.hpp"

using namespace ruleve;
using fixtures::ctx;

TEST_CASE("drop_condition widens over the covered siblings") {
  auto f = fixtures::csi_base();

  SUBCASE("dropping c from the b&c rule swallows the b&~c family") {
    RuleBase out = drop_condition(f.rb, f.r3, f.c);
    const Rule* r = out.find_rule(f.r3);
    REQUIRE(r != nullptr);
    CHECK(r->body == Context::single(f.b, 0));
    CHECK(r->prob == (Interval{0.4, 0.8}));
    CHECK(out.find_rule(f.r4) == nullptr);
    CHECK(out.find_rule(f.r5) == nullptr);
    // the ~b side of the family is untouched
    for (RuleId id : {f.r6, f.r7, f.r8}) {
      const Rule* s = out.find_rule(id);
      REQUIRE(s != nullptr);
      CHECK(s->body == f.rb.find_rule(id)->body);
      CHECK(s->prob == f.rb.find_rule(id)->prob);
    }
    CHECK(out.kind == RuleBaseKind::approximating);
    CHECK(validate(out).ok());
    CHECK(!check_approximates(out, f.rb).has_value());
  }

  SUBCASE("dropping b adds a distinguishing negation to an overlap") {
    RuleBase out = drop_condition(f.rb, f.r3, f.b);
    const Rule* r = out.find_rule(f.r3);
    REQUIRE(r != nullptr);
    CHECK(r->body == Context::single(f.c, 0));
    CHECK(r->prob == (Interval{0.06, 0.96}));
    // ~b & ~e & c was inside the new rule's cover: gone
    CHECK(out.find_rule(f.r7) == nullptr);
    // ~b & e overlapped it on c=t only: it gains c=f
    const Rule* r6 = out.find_rule(f.r6);
    REQUIRE(r6 != nullptr);
    CHECK(r6->body == ctx({{f.b, 1}, {f.c, 1}, {f.e, 0}}));
    CHECK(r6->prob == Interval::exact(0.06));
    // ~b & ~e & ~c conflicts on c: untouched
    CHECK(out.find_rule(f.r8)->body == f.rb.find_rule(f.r8)->body);
    CHECK(validate(out).ok());
    CHECK(!check_approximates(out, f.rb).has_value());
  }
}

TEST_CASE("drop_condition rejects bad targets") {
  auto f = fixtures::csi_base();
  CHECK_THROWS_AS(drop_condition(f.rb, 99, f.b), InvalidTarget);
  CHECK_THROWS_AS(drop_condition(f.rb, f.r3, f.e), InvalidTarget);  // e not in (3)'s body

  // overlap that only a three-valued variable could separate
  auto vt = std::make_shared<VariableTable>();
  VarId w = vt->add("w", {"r", "g", "b"});
  VarId p = vt->add("p", {"t", "f"});
  VarId x = vt->add("x", {"t", "f"});
  RuleBase rb;
  rb.vars = vt;
  rb.rules = {
      {0, Context::single(x, 0), ctx({{p, 0}, {w, 0}}), Interval::exact(0.5)},
      {1, Context::single(x, 0), Context::single(p, 1), Interval::exact(0.3)},
  };
  rb.next_id = 2;
  CHECK_THROWS_AS(drop_condition(rb, 0, p), InvalidTarget);
}

TEST_CASE("resolve_on reproduces the three-step collapse to a<-b") {
  auto f = fixtures::csi_base();
  const auto at = Context::single(f.a, 0);

  // (3),(4) resolve on c at residual b&d: the b&c rule joins but survives
  RuleBase s1 = resolve_on(f.rb, at, ctx({{f.b, 0}, {f.d, 0}}), f.c);
  const Rule* r11 = s1.find_rule(30);
  REQUIRE(r11 != nullptr);
  CHECK(r11->body == ctx({{f.b, 0}, {f.d, 0}}));
  CHECK(r11->prob == (Interval{0.6, 0.8}));
  CHECK(s1.find_rule(f.r4) == nullptr);
  CHECK(s1.find_rule(f.r3) != nullptr);

  // (3),(5) resolve on c at residual b&~d
  RuleBase s2 = resolve_on(s1, at, ctx({{f.b, 0}, {f.d, 1}}), f.c);
  const Rule* r12 = s2.find_rule(31);
  REQUIRE(r12 != nullptr);
  CHECK(r12->prob == (Interval{0.4, 0.6}));
  CHECK(s2.find_rule(f.r5) == nullptr);

  // the two derived rules resolve on d; everything under b collapses
  RuleBase s3 = resolve_on(s2, at, Context::single(f.b, 0), f.d);
  const Rule* r9 = s3.find_rule(32);
  REQUIRE(r9 != nullptr);
  CHECK(r9->body == Context::single(f.b, 0));
  CHECK(r9->prob == (Interval{0.4, 0.8}));
  for (RuleId gone : {f.r3, RuleId{30}, RuleId{31}}) CHECK(s3.find_rule(gone) == nullptr);
  for (RuleId kept : {f.r6, f.r7, f.r8}) CHECK(s3.find_rule(kept) != nullptr);

  CHECK(validate(s3).ok());
  CHECK(!check_approximates(s3, f.rb).has_value());
}

TEST_CASE("resolve_on reports incomplete and ambiguous families") {
  auto f = fixtures::csi_base();
  const auto at = Context::single(f.a, 0);
  // no c=f rule fits under residual body b alone
  CHECK_THROWS_AS(resolve_on(f.rb, at, Context::single(f.b, 0), f.c), IncompleteFamily);
  // residual mentioning the resolved variable is a usage error
  CHECK_THROWS_AS(resolve_on(f.rb, at, ctx({{f.b, 0}, {f.c, 0}}), f.c), InvalidArgument);

  auto vt = std::make_shared<VariableTable>();
  VarId e = vt->add("e", {"t", "f"});
  VarId y = vt->add("y", {"t", "f"});
  VarId x = vt->add("x", {"t", "f"});
  RuleBase rb;
  rb.vars = vt;
  rb.rules = {
      {0, Context::single(x, 0), Context::single(e, 0), Interval::exact(0.5)},
      {1, Context::single(x, 0), ctx({{e, 0}, {y, 0}}), Interval::exact(0.6)},
      {2, Context::single(x, 0), Context::single(e, 1), Interval::exact(0.7)},
  };
  rb.next_id = 3;
  CHECK_THROWS_AS(resolve_on(rb, Context::single(x, 0), Context::single(y, 0), e),
                  IncompleteFamily);  // two candidates for e=t
}

TEST_CASE("simplify with resolve strategy reaches the width-0.4 fixpoint") {
  auto f = fixtures::csi_base();
  SimplifyConfig cfg;
  cfg.threshold = 0.4;
  cfg.strategy = SimplifyStrategy::resolve;
  RuleBase out = simplify(f.rb, cfg);

  CHECK(out.kind == RuleBaseKind::approximating);
  for (RuleId gone : {f.r3, f.r4, f.r5}) CHECK(out.find_rule(gone) == nullptr);
  // the surviving a=t rules: the collapsed a<-b plus the untouched ~b family
  const Rule* merged = nullptr;
  for (const Rule& r : out.rules)
    if (r.head == Context::single(f.a, 0) && r.body == Context::single(f.b, 0)) merged = &r;
  REQUIRE(merged != nullptr);
  CHECK(merged->prob == (Interval{0.4, 0.8}));
  for (RuleId kept : {f.r6, f.r7, f.r8}) CHECK(out.find_rule(kept) != nullptr);
  // complement side collapsed the same way
  const Rule* cmerged = nullptr;
  for (const Rule& r : out.rules)
    if (r.head == Context::single(f.a, 1) && r.body == Context::single(f.b, 0)) cmerged = &r;
  REQUIRE(cmerged != nullptr);
  CHECK(cmerged->prob.lo == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(cmerged->prob.hi == doctest::Approx(0.6).epsilon(1e-12));

  CHECK(validate(out).ok());
  CHECK(!check_approximates(out, f.rb).has_value());

  // drop and both are allowed to choose different rewrites, but the result
  // must still approximate the original
  for (auto strat : {SimplifyStrategy::drop, SimplifyStrategy::both}) {
    SimplifyConfig c2 = cfg;
    c2.strategy = strat;
    RuleBase o2 = simplify(f.rb, c2);
    CHECK(o2.rules.size() < f.rb.rules.size());
    CHECK(validate(o2).ok());
    CHECK(!check_approximates(o2, f.rb).has_value());
  }

  CHECK_THROWS_AS(simplify(f.rb, SimplifyConfig{-0.1}), InvalidArgument);
}

TEST_CASE("simplify at threshold zero only merges exact redundancy") {
  std::mt19937_64 rng(11);
  NetConfig cfg;
  cfg.n_vars = 4;
  auto injected = inject_row_redundancy(rng, random_network(rng, cfg));
  RuleBase rb = cpt_to_rules(injected.net);

  SimplifyConfig sc;  // threshold 0
  sc.strategy = SimplifyStrategy::resolve;
  RuleBase merged = simplify(rb, sc);
  CHECK(merged.kind == RuleBaseKind::exact);
  CHECK(merged.rules.size() < rb.rules.size());

  RuleBase extracted = extract_structure(rb, 0.0);
  CHECK(extracted.rules.size() == merged.rules.size());
  // same rules up to ids
  auto key = [](const Rule& r) { return std::make_tuple(r.head, r.body, r.prob.lo, r.prob.hi); };
  auto collect = [&](const RuleBase& b) {
    std::vector<decltype(key(b.rules[0]))> v;
    for (const Rule& r : b.rules) v.push_back(key(r));
    std::sort(v.begin(), v.end());
    return v;
  };
  CHECK(collect(merged) == collect(extracted));
  CHECK(!check_approximates(merged, rb).has_value());
}

TEST_CASE("extreme guard refuses to blur near-certainty") {
  auto vt = std::make_shared<VariableTable>();
  VarId y = vt->add("y", {"t", "f"});
  VarId x = vt->add("x", {"t", "f"});
  RuleBase rb;
  rb.vars = vt;
  rb.rules = {
      {0, Context::single(y, 0), {}, Interval::exact(0.5)},
      {1, Context::single(y, 1), {}, Interval::exact(0.5)},
      {2, Context::single(x, 0), Context::single(y, 0), Interval::exact(1.0)},
      {3, Context::single(x, 0), Context::single(y, 1), Interval::exact(0.97)},
      {4, Context::single(x, 1), Context::single(y, 0), Interval::exact(0.0)},
      {5, Context::single(x, 1), Context::single(y, 1), Interval::exact(0.03)},
  };
  rb.next_id = 6;
  SimplifyConfig cfg;
  cfg.threshold = 0.5;
  cfg.extreme_guard = true;
  RuleBase guarded = simplify(rb, cfg);
  CHECK(guarded.rules.size() == rb.rules.size());  // nothing applied
  cfg.extreme_guard = false;
  RuleBase free = simplify(rb, cfg);
  CHECK(free.rules.size() < rb.rules.size());
}

TEST_CASE("check_approximates produces a witness when containment fails") {
  auto f = fixtures::csi_base();
  CHECK(!check_approximates(f.rb, f.rb).has_value());

  RuleBase tweaked = f.rb;
  for (Rule& r : tweaked.rules)
    if (r.id == f.r3) r.prob = Interval::exact(0.5);
  auto witness = check_approximates(tweaked, f.rb);
  REQUIRE(witness.has_value());
  CHECK(witness->value_of(f.b) == 0);
  CHECK(witness->value_of(f.c) == 0);

  auto other = std::make_shared<VariableTable>();
  other->add("z", {"t", "f"});
  RuleBase alien;
  alien.vars = other;
  CHECK_THROWS_AS(check_approximates(alien, f.rb), InvalidArgument);
}

TEST_CASE("posterior bounds formulas") {
  SUBCASE("hand-checked masses") {
    BoundedPosterior bp =
        posterior_bounds_from_masses(0, {{0.2, 0.3}, {0.1, 0.2}});
    CHECK(bp.bounds[0].lo == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(bp.bounds[0].hi == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(bp.bounds[1].lo == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(bp.bounds[1].hi == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("zero mass values pin to the edges") {
    BoundedPosterior bp = posterior_bounds_from_masses(0, {{0.0, 0.0}, {0.5, 0.5}});
    CHECK(bp.bounds[0].lo == 0.0);
    CHECK(bp.bounds[0].hi == 0.0);
    CHECK(bp.bounds[1].lo == 1.0);
    CHECK(bp.bounds[1].hi == 1.0);
  }
  SUBCASE("all-zero lower masses give vacuous bounds") {
    BoundedPosterior bp = posterior_bounds_from_masses(0, {{0.0, 0.4}, {0.0, 0.6}});
    CHECK(bp.bounds[0].lo == 0.0);
    CHECK(bp.bounds[0].hi == 1.0);
  }
}

TEST_CASE("bounded_posterior degenerates to the exact posterior on exact bases") {
  auto rb = fixtures::chain_rules();
  auto [bp, stats] = bounded_posterior(rb, 1, {});
  CHECK(bp.bounds[0].lo == doctest::Approx(0.41).epsilon(1e-12));
  CHECK(bp.bounds[0].hi == doctest::Approx(0.41).epsilon(1e-12));
}

TEST_CASE("bounded_posterior brackets the original posterior after simplify") {
  auto f = fixtures::csi_base();
  SimplifyConfig cfg;
  cfg.threshold = 0.4;
  RuleBase wide = simplify(f.rb, cfg);

  for (const Context& ev : {Context{}, Context::single(f.b, 0), Context::single(f.e, 1)}) {
    Distribution exact = enumerate_posterior(f.rb, f.a, ev);
    auto [bp, stats] = bounded_posterior(wide, f.a, ev);
    BoundedPosterior oracle = enumerate_bounds(wide, f.a, ev);
    for (std::size_t v = 0; v < bp.bounds.size(); ++v) {
      CHECK(bp.bounds[v].lo == doctest::Approx(oracle.bounds[v].lo).epsilon(1e-9));
      CHECK(bp.bounds[v].hi == doctest::Approx(oracle.bounds[v].hi).epsilon(1e-9));
      CHECK(bp.bounds[v].lo <= exact.probs[v] + 1e-12);
      CHECK(bp.bounds[v].hi >= exact.probs[v] - 1e-12);
    }
  }
}

TEST_CASE("two-number elimination matches enumeration on random widened bases") {
  std::mt19937_64 rng(23);
  NetConfig cfg;
  cfg.n_vars = 5;
  cfg.max_parents = 3;
  for (int trial = 0; trial < 10; ++trial) {
    RuleBase rb = cpt_to_rules(random_network(rng, cfg));
    rb.kind = RuleBaseKind::approximating;
    for (Rule& r : rb.rules) {
      if (rand_below(rng, 3) != 0) continue;
      double d = rand_range(rng, 0.01, 0.15);
      r.prob = Interval{std::max(0.0, r.prob.lo - d), std::min(1.0, r.prob.hi + d)};
    }
    REQUIRE(validate(rb).ok());
    VarId query = static_cast<VarId>(rand_below(rng, 5));
    Context ev;
    VarId e = static_cast<VarId>(rand_below(rng, 5));
    if (e != query && trial % 2 == 0) ev = Context::single(e, 0);

    auto [bp, stats] = bounded_posterior(rb, query, ev);
    BoundedPosterior want = enumerate_bounds(rb, query, ev);
    REQUIRE(bp.bounds.size() == want.bounds.size());
    for (std::size_t v = 0; v < bp.bounds.size(); ++v) {
      CHECK(bp.bounds[v].lo == doctest::Approx(want.bounds[v].lo).epsilon(1e-9));
      CHECK(bp.bounds[v].hi == doctest::Approx(want.bounds[v].hi).epsilon(1e-9));
    }
  }
}

TEST_CASE("bounded_posterior raises on zero upper mass") {
  auto vt = std::make_shared<VariableTable>();
  VarId a = vt->add("a", {"t", "f"});
  VarId b = vt->add("b", {"t", "f"});
  RuleBase rb;
  rb.vars = vt;
  rb.kind = RuleBaseKind::approximating;
  rb.rules = {{0, Context::single(a, 0), {}, Interval::exact(1.0)},
              {1, Context::single(a, 1), {}, Interval::exact(0.0)},
              {2, Context::single(b, 0), Context::single(a, 0), Interval::exact(1.0)},
              {3, Context::single(b, 1), Context::single(a, 0), Interval::exact(0.0)},
              {4, Context::single(b, 0), Context::single(a, 1), Interval::exact(0.0)},
              {5, Context::single(b, 1), Context::single(a, 1), Interval::exact(1.0)}};
  rb.next_id = 6;
  CHECK_THROWS_AS(bounded_posterior(rb, 0, Context::single(b, 1)), ImpossibleEvidence);
}
