#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "ruleve/validate.hpp"

using namespace ruleve;
using fixtures::ctx;

TEST_CASE("variable table basics") {
  VariableTable vt;
  VarId a = vt.add("a", {"t", "f"});
  VarId s = vt.add("season", {"spring", "summer", "autumn", "winter"});
  CHECK(vt.size() == 2);
  CHECK(vt[a].name == "a");
  CHECK(vt[s].domain_size() == 4);
  CHECK(vt.find("season") == s);
  CHECK(!vt.find("nope").has_value());
  CHECK(vt[s].value_index("autumn") == ValueIx{2});
  CHECK(!vt[s].value_index("fall").has_value());
  CHECK(vt.joint_size(100) == 8u);
  CHECK(!vt.joint_size(7).has_value());

  CHECK_THROWS_AS(vt.add("a", {"x", "y"}), InvalidArgument);       // duplicate name
  CHECK_THROWS_AS(vt.add("u", {"only"}), InvalidArgument);         // domain too small
  CHECK_THROWS_AS(vt.add("v", {"t", "t"}), InvalidArgument);       // duplicate value
}

TEST_CASE("context operations") {
  Context empty;
  CHECK(empty.empty());
  CHECK(!empty.assigns(0));

  Context bc = ctx({{1, 0}, {0, 1}});  // stored sorted by variable
  CHECK(bc.size() == 2);
  CHECK(bc.items()[0].var == 0);
  CHECK(bc.value_of(0) == ValueIx{1});
  CHECK(bc.value_of(1) == ValueIx{0});
  CHECK(!bc.value_of(2).has_value());

  CHECK_THROWS_AS(Context(std::vector<Assignment>{{0, 0}, {0, 1}}), InvalidArgument);

  Context bcd = bc.with(2, 1);
  CHECK(bcd.size() == 3);
  CHECK(bcd.contains(bc));
  CHECK(!bc.contains(bcd));
  CHECK_THROWS_AS(bc.with(0, 0), InvalidArgument);  // conflicts with 0=1
  CHECK(bc.with(1, 0) == bc);                       // re-assigning same value is fine

  CHECK(bcd.without(2) == bc);
  CHECK(bcd.without(9) == bcd);
  CHECK(bcd.minus_vars(bc) == Context::single(2, 1));

  Context other = ctx({{0, 1}, {3, 0}});
  CHECK(compatible(bc, other));
  CHECK(unite(bc, other) == ctx({{0, 1}, {1, 0}, {3, 0}}));
  Context clash = ctx({{1, 1}});
  CHECK(!compatible(bc, clash));
  CHECK(conflict_var(bc, clash) == VarId{1});
  CHECK(!conflict_var(bc, other).has_value());
  CHECK(bc.mentions_any(clash));
  CHECK(!bc.mentions_any(Context::single(7, 0)));
}

TEST_CASE("context ordering is by variable then value") {
  Context x = ctx({{0, 0}});
  Context y = ctx({{0, 1}});
  Context z = ctx({{0, 0}, {1, 0}});
  CHECK(x < y);
  CHECK(x < z);  // prefix compares less
  std::map<Context, int> m;
  m[y] = 1;
  m[x] = 2;
  m[z] = 3;
  CHECK(m.begin()->second == 2);
}

TEST_CASE("format_context") {
  VariableTable vt;
  vt.add("a", {"t", "f"});
  vt.add("b", {"t", "f"});
  CHECK(format_context(vt, Context{}) == "true");
  CHECK(format_context(vt, ctx({{0, 1}, {1, 0}})) == "a=f & b=t");
}

TEST_CASE("applicability and compatibility") {
  auto f = fixtures::csi_base();
  const Rule& r3 = *f.rb.find_rule(f.r3);
  // body satisfied, head variable free
  CHECK(is_applicable(r3, ctx({{f.b, 0}, {f.c, 0}})));
  // body satisfied, head agrees
  CHECK(is_applicable(r3, ctx({{f.b, 0}, {f.c, 0}, {f.a, 0}})));
  // head disagrees
  CHECK(!is_applicable(r3, ctx({{f.b, 0}, {f.c, 0}, {f.a, 1}})));
  // body not contained
  CHECK(!is_applicable(r3, ctx({{f.b, 0}})));
  CHECK(!is_applicable(r3, ctx({{f.b, 0}, {f.c, 1}})));

  const Rule& r4 = *f.rb.find_rule(f.r4);
  CHECK(!are_compatible(r3, r4));  // bodies differ on c
  const Rule& r6 = *f.rb.find_rule(f.r6);
  CHECK(!are_compatible(r3, r6));  // b=t vs b=f
  const Rule& prior_b = *f.rb.find_rule(20);
  CHECK(are_compatible(r3, prior_b));

  std::vector<ValueIx> values = {0, 0, 0, 0, 0};  // b=c=d=e=a = t
  CHECK(applicable_in(r3, values));
  values[static_cast<std::size_t>(f.c)] = 1;
  CHECK(!applicable_in(r3, values));
}

TEST_CASE("complete context probability multiplies one rule per variable") {
  auto rb = fixtures::chain_rules();
  // P(a=t, b=t) = 0.3 * 0.9
  Interval p = complete_context_probability(rb, ctx({{0, 0}, {1, 0}}));
  CHECK(p.lo == doctest::Approx(0.27).epsilon(1e-12));
  CHECK(p.degenerate());
  // incomplete context is rejected
  CHECK_THROWS_AS(complete_context_probability(rb, Context::single(0, 0)), InvalidArgument);

  // break the exactly-one invariant: remove one b rule
  RuleBase broken = rb;
  std::erase_if(broken.rules, [](const Rule& r) { return r.id == 2; });
  CHECK_THROWS_AS(complete_context_probability(broken, ctx({{0, 0}, {1, 0}})),
                  MalformedRuleBase);
}

TEST_CASE("interval product over applicable rules") {
  auto f = fixtures::csi_base();
  // b=t c=t d=t e=t a=t: rules 3, 20, 22, 24, 26 apply
  std::vector<ValueIx> values = {0, 0, 0, 0, 0};
  Interval p = interval_product(f.rb.rules, values);
  CHECK(p.lo == doctest::Approx(0.6 * 0.3 * 0.6 * 0.2 * 0.55).epsilon(1e-12));
  CHECK(p.degenerate());
}

TEST_CASE("validate accepts the fixtures") {
  CHECK(validate(fixtures::chain_rules()).ok());
  CHECK(validate(fixtures::csi_base().rb).ok());
}

TEST_CASE("validate rejects structural problems") {
  auto rb = fixtures::chain_rules();

  SUBCASE("bounds out of range") {
    rb.rules[0].prob = {1.2, 1.3};
    auto rep = validate(rb);
    CHECK(!rep.ok());
  }
  SUBCASE("interval on an exact base") {
    rb.rules[0].prob = {0.2, 0.4};
    rb.rules[1].prob = {0.6, 0.8};
    CHECK(!validate(rb).ok());
    rb.kind = RuleBaseKind::approximating;
    CHECK(validate(rb).ok());
  }
  SUBCASE("head and body overlap") {
    rb.rules[2].body = ctx({{0, 0}, {1, 0}});
    CHECK(!validate(rb).ok());
  }
  SUBCASE("body variable after head variable") {
    // flip the chain: a now depends on b, b carries the prior
    RuleBase flipped;
    flipped.vars = rb.vars;
    flipped.rules = {
        {0, Context::single(0, 0), Context::single(1, 0), Interval::exact(0.3)},
        {1, Context::single(0, 1), Context::single(1, 0), Interval::exact(0.7)},
        {2, Context::single(0, 0), Context::single(1, 1), Interval::exact(0.6)},
        {3, Context::single(0, 1), Context::single(1, 1), Interval::exact(0.4)},
        {4, Context::single(1, 0), {}, Interval::exact(0.5)},
        {5, Context::single(1, 1), {}, Interval::exact(0.5)},
    };
    flipped.next_id = 6;
    CHECK(!validate(flipped).ok());
    ValidateOptions lax;
    lax.require_input_ordering = false;
    CHECK(validate(flipped, lax).ok());
  }
  SUBCASE("probabilities not summing to one") {
    rb.rules[0].prob = Interval::exact(0.4);  // a: 0.4 + 0.7
    CHECK(!validate(rb).ok());
  }
}

TEST_CASE("validate finds coverage gaps and overlaps with witnesses") {
  auto rb = fixtures::chain_rules();

  SUBCASE("missing rule leaves a context uncovered") {
    std::erase_if(rb.rules, [](const Rule& r) { return r.id == 4; });  // b=t <- a=f
    auto rep = validate(rb);
    REQUIRE(!rep.ok());
    bool witnessed = false;
    for (const auto& v : rep.violations)
      if (v.witness.has_value()) witnessed = true;
    CHECK(witnessed);
  }
  SUBCASE("duplicated rule fires twice") {
    Rule dup = *rb.find_rule(2);
    dup.id = rb.next_id++;
    rb.rules.push_back(dup);
    // also fix the sum so only the exactly-one check can fire
    auto rep = validate(rb);
    CHECK(!rep.ok());
  }
  SUBCASE("no rules at all for one variable") {
    std::erase_if(rb.rules, [](const Rule& r) { return r.head.assigns(1); });
    CHECK(!validate(rb).ok());
  }
}

TEST_CASE("validate uses the symbolic path beyond the enumeration budget") {
  // 20 binary variables: 2^20 complete contexts, beyond the default budget
  auto vt = std::make_shared<VariableTable>();
  for (int i = 0; i < 20; ++i) vt->add("v" + std::to_string(i), {"t", "f"});
  RuleBase rb;
  rb.vars = vt;
  RuleId id = 0;
  for (VarId v = 0; v < vt->size(); ++v) {
    Context body = v == 0 ? Context{} : Context::single(v - 1, 0);
    Context body2 = v == 0 ? Context{} : Context::single(v - 1, 1);
    rb.rules.push_back({id++, Context::single(v, 0), body, Interval::exact(0.4)});
    rb.rules.push_back({id++, Context::single(v, 1), body, Interval::exact(0.6)});
    if (v > 0) {
      rb.rules.push_back({id++, Context::single(v, 0), body2, Interval::exact(0.1)});
      rb.rules.push_back({id++, Context::single(v, 1), body2, Interval::exact(0.9)});
    }
  }
  rb.next_id = id;
  ValidateOptions opts;
  opts.max_enum = 1u << 10;
  CHECK(validate(rb, opts).ok());

  // drop one branch: coverage check must notice without enumerating 2^20
  std::erase_if(rb.rules, [](const Rule& r) { return r.id == 4; });
  CHECK(!validate(rb, opts).ok());
}

TEST_CASE("interval helpers") {
  Interval i{0.2, 0.5};
  CHECK(i.width() == doctest::Approx(0.3));
  CHECK(!i.degenerate());
  CHECK(Interval::exact(0.3).degenerate());
  CHECK(i.contains(0.2));
  CHECK(!i.contains(0.51));
  CHECK(i.contains({0.3, 0.4}));
  CHECK(Interval::hull({0.1, 0.2}, {0.6, 0.7}) == Interval{0.1, 0.7});
  Interval prod = Interval{0.5, 0.5} * Interval{0.2, 0.4};
  CHECK(prod.lo == doctest::Approx(0.1));
  CHECK(prod.hi == doctest::Approx(0.2));
  CHECK(format_interval(Interval::exact(0.25)) == "0.25");
  CHECK(format_interval({0.25, 0.75}) == "[0.25, 0.75]");
}
