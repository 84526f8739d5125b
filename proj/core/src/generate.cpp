#include <algorithm>
#include <string>

#include "ruleve/generate.hpp"
#include "ruleve/ingest.hpp"

namespace ruleve {

std::uint64_t rand_below(std::mt19937_64& rng, std::uint64_t n) {
  // rejection sampling keeps results identical across standard libraries,
  // unlike std::uniform_int_distribution
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double rand_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double rand_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * rand_unit(rng);
}

namespace {

std::vector<std::string> value_names(int k) {
  if (k == 2) return {"t", "f"};
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) names.push_back("s" + std::to_string(i));
  return names;
}

std::vector<double> random_row(std::mt19937_64& rng, int k, double lo, double hi) {
  if (k == 2) {
    double p = rand_range(rng, lo, hi);
    return {p, 1.0 - p};
  }
  std::vector<double> row;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    row.push_back(rand_range(rng, lo, hi));
    total += row.back();
  }
  for (double& p : row) p /= total;
  return row;
}

}  // namespace

TabularNetwork random_network(std::mt19937_64& rng, const NetConfig& cfg) {
  auto vt = std::make_shared<VariableTable>();
  for (int i = 0; i < cfg.n_vars; ++i) {
    int k = cfg.min_domain;
    if (cfg.max_domain > cfg.min_domain)
      k += static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(cfg.max_domain -
                                                                       cfg.min_domain + 1)));
    vt->add("v" + std::to_string(i), value_names(k));
  }

  TabularNetwork net;
  net.vars = vt;
  for (VarId child = 0; child < vt->size(); ++child) {
    Cpt cpt;
    cpt.child = child;
    for (VarId p = 0; p < child; ++p)
      if (rand_unit(rng) < cfg.edge_prob) cpt.parents.push_back(p);
    while (cpt.parents.size() > static_cast<std::size_t>(cfg.max_parents))
      cpt.parents.erase(cpt.parents.begin() +
                        static_cast<std::ptrdiff_t>(rand_below(rng, cpt.parents.size())));
    std::size_t rows = 1;
    for (VarId p : cpt.parents) rows *= static_cast<std::size_t>((*vt)[p].domain_size());
    for (std::size_t r = 0; r < rows; ++r)
      cpt.rows.push_back(random_row(rng, (*vt)[child].domain_size(), cfg.p_lo, cfg.p_hi));
    net.cpts.push_back(std::move(cpt));
  }
  return net;
}

InjectedRedundancy inject_row_redundancy(std::mt19937_64& rng, const TabularNetwork& net) {
  const VariableTable& vt = *net.vars;
  std::vector<VarId> candidates;
  for (const Cpt& cpt : net.cpts)
    if (!cpt.parents.empty()) candidates.push_back(cpt.child);
  if (candidates.empty()) throw InvalidArgument("network has no variable with parents");

  InjectedRedundancy inj;
  inj.net = net;
  inj.child = candidates[rand_below(rng, candidates.size())];
  Cpt& cpt = inj.net.cpts[static_cast<std::size_t>(inj.child)];
  auto pix = static_cast<std::size_t>(rand_below(rng, cpt.parents.size()));
  inj.parent = cpt.parents[pix];

  // make the child's rows constant along the chosen parent: copy the rows
  // for parent value 0 across every other parent value
  std::vector<std::size_t> dims;
  dims.reserve(cpt.parents.size());
  for (VarId p : cpt.parents) dims.push_back(static_cast<std::size_t>(vt[p].domain_size()));
  auto decode = [&](std::size_t r) {
    std::vector<std::size_t> vals(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
      vals[k] = r % dims[k];
      r /= dims[k];
    }
    return vals;
  };
  auto encode = [&](const std::vector<std::size_t>& vals) {
    std::size_t r = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) r = r * dims[k] + vals[k];
    return r;
  };
  for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
    std::vector<std::size_t> vals = decode(r);
    if (vals[pix] != 0) continue;
    for (std::size_t v = 1; v < dims[pix]; ++v) {
      vals[pix] = v;
      cpt.rows[encode(vals)] = cpt.rows[r];
    }
  }
  return inj;
}

std::string random_document(std::mt19937_64& rng) {
  NetConfig cfg;
  cfg.n_vars = 2 + static_cast<int>(rand_below(rng, 4));
  cfg.max_parents = 3;
  cfg.edge_prob = 0.4;
  cfg.max_domain = rand_below(rng, 4) == 0 ? 3 : 2;
  TabularNetwork net = random_network(rng, cfg);
  if (rand_below(rng, 2) == 0) return render(net);

  RuleBase rb = cpt_to_rules(net);
  // sometimes widen a few parameters so interval syntax gets exercised too
  if (rand_below(rng, 2) == 0) {
    for (Rule& r : rb.rules) {
      if (rand_below(rng, 4) != 0) continue;
      double d = rand_range(rng, 0.01, 0.1);
      r.prob = {std::max(0.0, r.prob.lo - d), std::min(1.0, r.prob.hi + d)};
    }
    bool any = std::any_of(rb.rules.begin(), rb.rules.end(),
                           [](const Rule& r) { return r.prob.width() > 0; });
    if (any) rb.kind = RuleBaseKind::approximating;
  }
  return render(rb);
}

}  // namespace ruleve
