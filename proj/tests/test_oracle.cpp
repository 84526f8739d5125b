#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"
#include "ruleve/oracle.hpp"

using namespace ruleve;
using fixtures::ctx;

TEST_CASE("enumerate_posterior on the chain") {
  auto rb = fixtures::chain_rules();
  Distribution pb = enumerate_posterior(rb, 1, {});
  CHECK(pb.probs[0] == doctest::Approx(0.41).epsilon(1e-12));
  Distribution pa = enumerate_posterior(rb, 0, Context::single(1, 0));
  CHECK(pa.probs[0] == doctest::Approx(0.27 / 0.41).epsilon(1e-12));

  CHECK_THROWS_AS(enumerate_posterior(rb, 0, Context::single(0, 0)), InvalidArgument);
  CHECK_THROWS_AS(enumerate_posterior(rb, 7, {}), InvalidArgument);
  CHECK_THROWS_AS(enumerate_posterior(rb, 0, {}, 2), EnumerationBudgetExceeded);

  RuleBase approx = rb;
  approx.kind = RuleBaseKind::approximating;
  CHECK_THROWS_AS(enumerate_posterior(approx, 0, {}), InvalidArgument);
}

TEST_CASE("enumerate_conjunction multiplies applicable rules") {
  auto rb = fixtures::chain_rules();
  CHECK(enumerate_conjunction(rb, ctx({{0, 0}, {1, 0}})).lo == doctest::Approx(0.27));
  CHECK(enumerate_conjunction(rb, Context::single(1, 0)).lo ==
        doctest::Approx(0.41).epsilon(1e-12));
  CHECK(enumerate_conjunction(rb, {}).lo == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumerate_bounds is a point on exact bases and brackets on wide ones") {
  auto f = fixtures::csi_base();
  BoundedPosterior point = enumerate_bounds(f.rb, f.a, {});
  Distribution exact = enumerate_posterior(f.rb, f.a, {});
  for (std::size_t v = 0; v < point.bounds.size(); ++v) {
    CHECK(point.bounds[v].lo == doctest::Approx(exact.probs[v]).epsilon(1e-12));
    CHECK(point.bounds[v].hi == doctest::Approx(exact.probs[v]).epsilon(1e-12));
  }

  RuleBase wide = f.rb;
  wide.kind = RuleBaseKind::approximating;
  for (Rule& r : wide.rules)
    if (r.id == f.r3) r.prob = Interval{0.4, 0.8};
  BoundedPosterior bp = enumerate_bounds(wide, f.a, Context::single(f.b, 0));
  Distribution inside = enumerate_posterior(f.rb, f.a, Context::single(f.b, 0));
  for (std::size_t v = 0; v < bp.bounds.size(); ++v) {
    CHECK(bp.bounds[v].lo <= inside.probs[v] + 1e-12);
    CHECK(bp.bounds[v].hi >= inside.probs[v] - 1e-12);
    CHECK(bp.bounds[v].lo <= bp.bounds[v].hi);
  }
}

TEST_CASE("impossible evidence is reported by the oracle") {
  auto vt = std::make_shared<VariableTable>();
  VarId a = vt->add("a", {"t", "f"});
  VarId b = vt->add("b", {"t", "f"});
  RuleBase rb;
  rb.vars = vt;
  rb.rules = {{0, Context::single(a, 0), {}, Interval::exact(1.0)},
              {1, Context::single(a, 1), {}, Interval::exact(0.0)},
              {2, Context::single(b, 0), Context::single(a, 0), Interval::exact(1.0)},
              {3, Context::single(b, 1), Context::single(a, 0), Interval::exact(0.0)},
              {4, Context::single(b, 0), Context::single(a, 1), Interval::exact(0.0)},
              {5, Context::single(b, 1), Context::single(a, 1), Interval::exact(1.0)}};
  rb.next_id = 6;
  CHECK_THROWS_AS(enumerate_posterior(rb, 0, Context::single(b, 1)), ImpossibleEvidence);
}

TEST_CASE("perturb_parameter shifts one interval and nothing else") {
  auto rb = fixtures::chain_rules();
  RuleBase moved = perturb_parameter(rb, 2, -0.2);
  CHECK(moved.find_rule(2)->prob == Interval::exact(0.7));
  CHECK(moved.find_rule(3)->prob == Interval::exact(0.1));
  // sensitivity readout: mass of (a=t, b=t) under the perturbed parameter
  CHECK(enumerate_conjunction(moved, ctx({{0, 0}, {1, 0}})).lo ==
        doctest::Approx(0.21).epsilon(1e-12));

  CHECK_THROWS_AS(perturb_parameter(rb, 2, 0.2), OutOfRange);
  CHECK_THROWS_AS(perturb_parameter(rb, 2, -0.95), OutOfRange);
  CHECK_THROWS_AS(perturb_parameter(rb, 42, 0.01), InvalidTarget);
}
