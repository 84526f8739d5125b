#include <algorithm>
#include <set>

#include "ruleve/exact.hpp"

namespace ruleve {

namespace {

// Strides of each scope variable (row-major, first variable slowest).
std::vector<std::size_t> strides(const VariableTable& vt, const std::vector<VarId>& scope) {
  std::vector<std::size_t> s(scope.size(), 1);
  for (int i = static_cast<int>(scope.size()) - 2; i >= 0; --i) {
    auto ix = static_cast<std::size_t>(i);
    s[ix] = s[ix + 1] * static_cast<std::size_t>(vt[scope[ix + 1]].domain_size());
  }
  return s;
}

std::size_t table_size(const VariableTable& vt, const std::vector<VarId>& scope) {
  std::size_t n = 1;
  for (VarId v : scope) n *= static_cast<std::size_t>(vt[v].domain_size());
  return n;
}

// Iterate all assignments of `scope`, calling fn(values).
template <class F>
void scan(const VariableTable& vt, const std::vector<VarId>& scope, F&& fn) {
  std::vector<ValueIx> values(scope.size(), 0);
  for (;;) {
    fn(values);
    int i = static_cast<int>(scope.size()) - 1;
    while (i >= 0) {
      auto ix = static_cast<std::size_t>(i);
      if (++values[ix] < static_cast<ValueIx>(vt[scope[ix]].domain_size())) break;
      values[ix] = 0;
      --i;
    }
    if (i < 0) return;
  }
}

}  // namespace

Factor Factor::from_cpt(const VariableTable& vt, const Cpt& cpt) {
  Factor f;
  f.scope = cpt.parents;
  f.scope.push_back(cpt.child);
  std::sort(f.scope.begin(), f.scope.end());
  f.table.assign(table_size(vt, f.scope), 0.0);
  auto st = strides(vt, f.scope);

  // position of each cpt parent and the child inside the sorted scope
  auto pos_of = [&](VarId v) {
    return static_cast<std::size_t>(
        std::lower_bound(f.scope.begin(), f.scope.end(), v) - f.scope.begin());
  };
  scan(vt, f.scope, [&](const std::vector<ValueIx>& values) {
    std::uint64_t row = 0;
    for (VarId p : cpt.parents)
      row = row * static_cast<std::uint64_t>(vt[p].domain_size()) +
            static_cast<std::uint64_t>(values[pos_of(p)]);
    ValueIx cv = values[pos_of(cpt.child)];
    std::size_t ix = 0;
    for (std::size_t k = 0; k < f.scope.size(); ++k)
      ix += st[k] * static_cast<std::size_t>(values[k]);
    f.table[ix] = cpt.rows[row][static_cast<std::size_t>(cv)];
  });
  return f;
}

Factor Factor::multiply(const VariableTable& vt, const Factor& a, const Factor& b) {
  Factor f;
  std::set_union(a.scope.begin(), a.scope.end(), b.scope.begin(), b.scope.end(),
                 std::back_inserter(f.scope));
  f.table.assign(table_size(vt, f.scope), 0.0);
  auto st = strides(vt, f.scope);
  auto sa = strides(vt, a.scope);
  auto sb = strides(vt, b.scope);
  // map union positions to positions in a and b (npos if absent)
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<std::size_t> ia(f.scope.size(), npos), ib(f.scope.size(), npos);
  for (std::size_t k = 0; k < f.scope.size(); ++k) {
    auto pa = std::lower_bound(a.scope.begin(), a.scope.end(), f.scope[k]);
    if (pa != a.scope.end() && *pa == f.scope[k])
      ia[k] = static_cast<std::size_t>(pa - a.scope.begin());
    auto pb = std::lower_bound(b.scope.begin(), b.scope.end(), f.scope[k]);
    if (pb != b.scope.end() && *pb == f.scope[k])
      ib[k] = static_cast<std::size_t>(pb - b.scope.begin());
  }
  scan(vt, f.scope, [&](const std::vector<ValueIx>& values) {
    std::size_t ix = 0, axe = 0, bxe = 0;
    for (std::size_t k = 0; k < f.scope.size(); ++k) {
      auto v = static_cast<std::size_t>(values[k]);
      ix += st[k] * v;
      if (ia[k] != npos) axe += sa[ia[k]] * v;
      if (ib[k] != npos) bxe += sb[ib[k]] * v;
    }
    f.table[ix] = a.table[axe] * b.table[bxe];
  });
  return f;
}

Factor Factor::sum_out(const VariableTable& vt, VarId v) const {
  Factor f;
  for (VarId s : scope)
    if (s != v) f.scope.push_back(s);
  f.table.assign(table_size(vt, f.scope), 0.0);
  auto st = strides(vt, f.scope);
  auto ss = strides(vt, scope);
  scan(vt, scope, [&](const std::vector<ValueIx>& values) {
    std::size_t src = 0, dst = 0, j = 0;
    for (std::size_t k = 0; k < scope.size(); ++k) {
      src += ss[k] * static_cast<std::size_t>(values[k]);
      if (scope[k] != v) dst += st[j++] * static_cast<std::size_t>(values[k]);
    }
    f.table[dst] += table[src];
  });
  return f;
}

Factor Factor::restrict_to(const VariableTable& vt, const Context& evidence) const {
  bool touched = false;
  for (VarId s : scope) touched = touched || evidence.assigns(s);
  if (!touched) return *this;
  Factor f;
  for (VarId s : scope)
    if (!evidence.assigns(s)) f.scope.push_back(s);
  f.table.assign(table_size(vt, f.scope), 0.0);
  auto st = strides(vt, f.scope);
  auto ss = strides(vt, scope);
  scan(vt, scope, [&](const std::vector<ValueIx>& values) {
    std::size_t src = 0, dst = 0, j = 0;
    for (std::size_t k = 0; k < scope.size(); ++k) {
      auto ev = evidence.value_of(scope[k]);
      if (ev && *ev != values[k]) return;
      src += ss[k] * static_cast<std::size_t>(values[k]);
      if (!ev) dst += st[j++] * static_cast<std::size_t>(values[k]);
    }
    f.table[dst] = table[src];
  });
  return f;
}

std::vector<VarId> variables_to_eliminate(const VariableTable& vt, VarId query,
                                          const Context& evidence) {
  std::vector<VarId> out;
  for (VarId v = 0; v < vt.size(); ++v)
    if (v != query && !evidence.assigns(v)) out.push_back(v);
  return out;
}

std::vector<VarId> min_degree_order(int n_vars, const std::vector<std::vector<VarId>>& scopes,
                                    std::span<const VarId> to_eliminate) {
  std::vector<std::set<VarId>> adj(static_cast<std::size_t>(n_vars));
  for (const auto& scope : scopes) {
    for (std::size_t i = 0; i < scope.size(); ++i) {
      for (std::size_t j = i + 1; j < scope.size(); ++j) {
        adj[static_cast<std::size_t>(scope[i])].insert(scope[j]);
        adj[static_cast<std::size_t>(scope[j])].insert(scope[i]);
      }
    }
  }
  std::set<VarId> pending(to_eliminate.begin(), to_eliminate.end());
  std::vector<VarId> order;
  order.reserve(pending.size());
  while (!pending.empty()) {
    VarId best = -1;
    std::size_t best_deg = 0;
    for (VarId v : pending) {
      std::size_t deg = adj[static_cast<std::size_t>(v)].size();
      if (best < 0 || deg < best_deg) {
        best = v;
        best_deg = deg;
      }
    }
    // connect the neighborhood, then remove the chosen variable
    auto& nb = adj[static_cast<std::size_t>(best)];
    for (VarId a : nb)
      for (VarId b : nb)
        if (a != b) adj[static_cast<std::size_t>(a)].insert(b);
    for (VarId a : nb) adj[static_cast<std::size_t>(a)].erase(best);
    nb.clear();
    pending.erase(best);
    order.push_back(best);
  }
  return order;
}

void InferenceStats::note(const StepStats& s) {
  steps.push_back(s);
  max_rules_created = std::max(max_rules_created, s.rules_created);
  max_rules_active = std::max(max_rules_active, s.rules_active);
  max_factor_entries = std::max(max_factor_entries, s.factor_entries);
}

std::pair<Distribution, InferenceStats> ve_posterior(const TabularNetwork& net, VarId query,
                                                     const Context& evidence,
                                                     std::optional<std::vector<VarId>> order) {
  const VariableTable& vt = *net.vars;
  if (query < 0 || query >= vt.size()) throw InvalidArgument("query variable out of range");
  if (evidence.assigns(query)) throw InvalidArgument("query variable is observed");

  std::vector<Factor> factors;
  factors.reserve(net.cpts.size());
  for (const Cpt& cpt : net.cpts)
    factors.push_back(Factor::from_cpt(vt, cpt).restrict_to(vt, evidence));

  std::vector<VarId> to_elim = variables_to_eliminate(vt, query, evidence);
  std::vector<VarId> elim;
  if (order) {
    elim = *order;
    std::vector<VarId> sorted = elim;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != to_elim)
      throw InvalidArgument("ordering must cover exactly the unobserved non-query variables");
  } else {
    std::vector<std::vector<VarId>> scopes;
    for (const Factor& f : factors) scopes.push_back(f.scope);
    elim = min_degree_order(vt.size(), scopes, to_elim);
  }

  InferenceStats stats;
  for (VarId e : elim) {
    std::vector<Factor> rest;
    Factor prod;
    bool have = false;
    for (Factor& f : factors) {
      bool has = std::binary_search(f.scope.begin(), f.scope.end(), e);
      if (!has) {
        rest.push_back(std::move(f));
      } else if (!have) {
        prod = std::move(f);
        have = true;
      } else {
        prod = Factor::multiply(vt, prod, f);
      }
    }
    StepStats s;
    s.variable = e;
    if (have) {
      Factor summed = prod.sum_out(vt, e);
      s.factor_entries = summed.entries();
      rest.push_back(std::move(summed));
    }
    factors = std::move(rest);
    s.rules_active = 0;
    stats.note(s);
  }

  Factor result;
  result.scope = {query};
  result.table.assign(static_cast<std::size_t>(vt[query].domain_size()), 1.0);
  for (const Factor& f : factors) result = Factor::multiply(vt, result, f);

  double total = 0.0;
  for (double p : result.table) total += p;
  if (total <= 0.0) throw ImpossibleEvidence("evidence has zero probability");
  Distribution dist;
  dist.variable = query;
  dist.probs.reserve(result.table.size());
  for (double p : result.table) dist.probs.push_back(p / total);
  return {std::move(dist), std::move(stats)};
}

}  // namespace ruleve
