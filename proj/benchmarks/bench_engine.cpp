// Engine comparison on generated networks: rule elimination vs the classic
// table engine vs brute-force enumeration, plus the standalone passes
// (structure extraction, simplification, bounded inference).

#include <benchmark/benchmark.h>

#include <random>

#include <ruleve/approx.hpp>
#include <ruleve/exact.hpp>
#include <ruleve/generate.hpp>
#include <ruleve/ingest.hpp>
#include <ruleve/oracle.hpp>

namespace {

// Same network for the same size, so the engines race on identical inputs.
ruleve::TabularNetwork make_net(int n_vars) {
  std::mt19937_64 rng(90210 + static_cast<std::uint64_t>(n_vars));
  ruleve::NetConfig cfg;
  cfg.n_vars = n_vars;
  cfg.max_parents = 3;
  return ruleve::random_network(rng, cfg);
}

}  // namespace

static void BM_rule_engine(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  ruleve::RuleBase rb = ruleve::cpt_to_rules(make_net(n));
  ruleve::VarId query = static_cast<ruleve::VarId>(n - 1);
  for (auto _ : state) {
    auto [dist, stats] = ruleve::compute_belief(rb, query, ruleve::Context{});
    benchmark::DoNotOptimize(dist);
  }
  state.counters["rules"] = static_cast<double>(rb.rules.size());
}
BENCHMARK(BM_rule_engine)->DenseRange(6, 14, 2);

static void BM_table_engine(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  ruleve::TabularNetwork net = make_net(n);
  ruleve::VarId query = static_cast<ruleve::VarId>(n - 1);
  for (auto _ : state) {
    auto [dist, stats] = ruleve::ve_posterior(net, query, ruleve::Context{});
    benchmark::DoNotOptimize(dist);
  }
}
BENCHMARK(BM_table_engine)->DenseRange(6, 14, 2);

// Joint enumeration is the correctness oracle; it walks all 2^n contexts, so
// keep it to sizes where that stays in the millisecond range.
static void BM_enumeration(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  ruleve::RuleBase rb = ruleve::cpt_to_rules(make_net(n));
  ruleve::VarId query = static_cast<ruleve::VarId>(n - 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ruleve::enumerate_posterior(rb, query, ruleve::Context{}));
  }
}
BENCHMARK(BM_enumeration)->DenseRange(6, 12, 2);

// Threshold-0 merge on a base with planted row redundancy: pure structure
// recovery, no approximation.
static void BM_structure_extraction(benchmark::State& state) {
  std::mt19937_64 rng(31);
  ruleve::InjectedRedundancy planted = ruleve::inject_row_redundancy(rng, make_net(10));
  ruleve::RuleBase rb = ruleve::cpt_to_rules(planted.net);
  std::size_t out_rules = 0;
  for (auto _ : state) {
    ruleve::RuleBase merged = ruleve::extract_structure(rb, 0.0);
    out_rules = merged.rules.size();
    benchmark::DoNotOptimize(merged);
  }
  state.counters["rules_in"] = static_cast<double>(rb.rules.size());
  state.counters["rules_out"] = static_cast<double>(out_rules);
}
BENCHMARK(BM_structure_extraction);

// Lossy simplification at a width threshold (argument is threshold * 100),
// then interval inference on the smaller base.
static void BM_bounded_inference(benchmark::State& state) {
  ruleve::RuleBase rb = ruleve::cpt_to_rules(make_net(10));
  ruleve::SimplifyConfig cfg;
  cfg.threshold = static_cast<double>(state.range(0)) / 100.0;
  ruleve::RuleBase srb = ruleve::simplify(rb, cfg);
  ruleve::VarId query = 9;
  for (auto _ : state) {
    auto [bp, stats] = ruleve::bounded_posterior(srb, query, ruleve::Context{});
    benchmark::DoNotOptimize(bp);
  }
  state.counters["rules"] = static_cast<double>(srb.rules.size());
}
BENCHMARK(BM_bounded_inference)->Arg(0)->Arg(5)->Arg(10)->Arg(20);

BENCHMARK_MAIN();
