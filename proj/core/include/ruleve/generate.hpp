#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "ruleve/ingest.hpp"

namespace ruleve {

// Deterministic helpers on top of std::mt19937_64.  The standard
// distributions are not pinned across library implementations, so anything
// that must reproduce byte-for-byte goes through these.
std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n);     // uniform in [0, n)
double rand_unit(std::mt19937_64& rng);                              // uniform in [0, 1)
double rand_range(std::mt19937_64& rng, double lo, double hi);

struct NetConfig {
  int n_vars = 8;
  int max_parents = 4;
  double edge_prob = 0.35;
  // CPT entries are drawn uniformly from [p_lo, p_hi] (binary variables get
  // {p, 1-p}; larger domains get a normalized draw).
  double p_lo = 0.01;
  double p_hi = 0.99;
  int min_domain = 2;
  int max_domain = 2;
};

// Random DAG over variables v0..v{n-1} (edges only from lower to higher
// index) with random CPTs.  Deterministic for a given rng state.
TabularNetwork random_network(std::mt19937_64& rng, const NetConfig& cfg);

// Copy of net where one randomly chosen variable with parents has its rows
// duplicated across one parent's values, making that parent locally
// irrelevant.  Guarantees the threshold-0 merge removes rules.  Returns the
// modified network; reports which child/parent were rewritten.
struct InjectedRedundancy {
  TabularNetwork net;
  VarId child = -1;
  VarId parent = -1;
};
InjectedRedundancy inject_row_redundancy(std::mt19937_64& rng, const TabularNetwork& net);

// Random model document text for parser round-trip tests: either a CPT
// document or a rule document (sometimes with interval probabilities).
std::string random_document(std::mt19937_64& rng);

}  // namespace ruleve
