#include "ruleve/validate.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

namespace ruleve {

namespace {

std::string msgf(const char* fmt, const std::string& a, const std::string& b = {}) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a.c_str(), b.c_str());
  return buf;
}

Context context_from_values(std::span<const ValueIx> values) {
  std::vector<Assignment> items;
  items.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    items.push_back({static_cast<VarId>(i), values[i]});
  return Context(std::move(items));
}

}  // namespace

ValidationReport validate(const RuleBase& rb, const ValidateOptions& opts) {
  const VariableTable& vt = *rb.vars;
  ValidationReport report;
  auto flag = [&](std::string what, std::vector<RuleId> ids = {},
                  std::optional<Context> witness = std::nullopt) {
    report.violations.push_back({std::move(what), std::move(ids), std::move(witness)});
  };

  bool heads_single = true;

  // Per-rule structure.
  RuleId prev_id = -1;
  for (const Rule& r : rb.rules) {
    if (r.id <= prev_id) flag("rule ids are not strictly increasing", {r.id});
    prev_id = r.id;
    if (r.head.size() != 1) heads_single = false;
    if (!(r.prob.lo >= 0.0 && r.prob.lo <= r.prob.hi && r.prob.hi <= 1.0))
      flag("rule bounds must satisfy 0 <= lower <= upper <= 1", {r.id});
    if (rb.kind == RuleBaseKind::exact && r.prob.width() > 0.0)
      flag("interval probability in an exact rule base", {r.id});
    if (r.head.mentions_any(r.body))
      flag("head and body mention a common variable", {r.id});
    for (const Assignment& a : r.head.items()) {
      if (a.var < 0 || a.var >= vt.size() || a.value < 0 || a.value >= vt[a.var].domain_size())
        flag("head assignment out of range", {r.id});
    }
    for (const Assignment& a : r.body.items()) {
      if (a.var < 0 || a.var >= vt.size() || a.value < 0 || a.value >= vt[a.var].domain_size())
        flag("body assignment out of range", {r.id});
    }
    if (opts.require_input_ordering && !r.head.empty()) {
      VarId min_head = r.head.items().front().var;
      for (const Assignment& a : r.head.items()) min_head = std::min(min_head, a.var);
      for (const Assignment& a : r.body.items()) {
        if (a.var >= min_head) {
          flag(msgf("body variable '%s' does not precede head variable '%s'",
                    vt[a.var].name, vt[min_head].name),
               {r.id});
          break;
        }
      }
    }
  }
  if (!report.ok()) return report;  // structural damage makes the rest unreliable

  // Family bookkeeping: rules grouped by (head variable, body), only
  // meaningful when every head is a single assignment.
  if (heads_single) {
    std::map<std::pair<VarId, Context>, std::vector<const Rule*>> families;
    for (const Rule& r : rb.rules)
      families[{r.head.items().front().var, r.body}].push_back(&r);
    for (const auto& [key, members] : families) {
      const auto& [var, body] = key;
      std::vector<int> seen(static_cast<std::size_t>(vt[var].domain_size()), 0);
      for (const Rule* r : members) ++seen[static_cast<std::size_t>(r->head.items().front().value)];
      bool once_each = true;
      for (int c : seen) once_each = once_each && c == 1;
      if (!once_each) continue;  // the context checks below report it
      if (rb.kind == RuleBaseKind::exact) {
        double sum = 0.0;
        std::vector<RuleId> ids;
        for (const Rule* r : members) {
          sum += r->prob.lo;
          ids.push_back(r->id);
        }
        if (std::abs(sum - 1.0) > opts.sum_tol)
          flag(msgf("probabilities for '%s' given %s do not sum to one", vt[var].name,
                    format_context(vt, body)),
               ids, body);
      }
    }
  }

  auto joint = vt.joint_size(opts.max_enum);
  if (joint) {
    // Exhaustive check: exactly one applicable rule per variable everywhere.
    std::set<std::pair<VarId, bool>> already;  // (variable, zero-vs-multiple)
    std::vector<int> hits(static_cast<std::size_t>(vt.size()));
    for_each_complete(vt, [&](std::span<const ValueIx> values) {
      std::fill(hits.begin(), hits.end(), 0);
      for (const Rule& r : rb.rules) {
        if (!applicable_in(r, values)) continue;
        for (const Assignment& a : r.head.items()) ++hits[static_cast<std::size_t>(a.var)];
      }
      for (int v = 0; v < vt.size(); ++v) {
        int n = hits[static_cast<std::size_t>(v)];
        if (n == 1) continue;
        if (!already.insert({v, n == 0}).second) continue;
        Context witness = context_from_values(values);
        if (n == 0) {
          flag(msgf("no applicable rule for '%s' in some context", vt[v].name), {}, witness);
        } else {
          std::vector<RuleId> ids;
          for (const Rule& r : rb.rules)
            if (applicable_in(r, values) && r.head.assigns(v)) ids.push_back(r.id);
          flag(msgf("%s applicable rules for '%s' in one context",
                    std::to_string(n), vt[v].name),
               ids, witness);
        }
      }
    });
    return report;
  }

  if (!heads_single)
    throw EnumerationBudgetExceeded(
        "joint space exceeds max_enum and heads are not single assignments");

  // Symbolic path: per head variable, distinct bodies must be pairwise
  // incompatible, jointly cover the body-variable union, and each body must
  // carry every head value exactly once.
  for (int x = 0; x < vt.size(); ++x) {
    std::map<Context, std::vector<const Rule*>> by_body;
    for (const Rule& r : rb.rules)
      if (r.head.items().front().var == x) by_body[r.body].push_back(&r);
    if (by_body.empty()) {
      flag(msgf("no rules for variable '%s'", vt[x].name));
      continue;
    }
    std::vector<const Context*> bodies;
    for (const auto& [body, members] : by_body) {
      bodies.push_back(&body);
      std::vector<int> seen(static_cast<std::size_t>(vt[x].domain_size()), 0);
      std::vector<RuleId> ids;
      for (const Rule* r : members) {
        ++seen[static_cast<std::size_t>(r->head.items().front().value)];
        ids.push_back(r->id);
      }
      for (int v = 0; v < vt[x].domain_size(); ++v) {
        if (seen[static_cast<std::size_t>(v)] == 1) continue;
        flag(msgf("value '%s' of '%s' is not covered exactly once for one body",
                  vt[x].values[static_cast<std::size_t>(v)], vt[x].name),
             ids, body);
      }
    }
    for (std::size_t i = 0; i < bodies.size(); ++i) {
      for (std::size_t j = i + 1; j < bodies.size(); ++j) {
        if (compatible(*bodies[i], *bodies[j])) {
          std::vector<RuleId> ids;
          for (const Rule* r : by_body[*bodies[i]]) ids.push_back(r->id);
          for (const Rule* r : by_body[*bodies[j]]) ids.push_back(r->id);
          flag(msgf("two rule bodies for '%s' overlap", vt[x].name), ids,
               unite(*bodies[i], *bodies[j]));
        }
      }
    }
    // Coverage count over the union of body variables.
    std::set<VarId> uset;
    for (const Context* b : bodies)
      for (const Assignment& a : b->items()) uset.insert(a.var);
    std::vector<VarId> u(uset.begin(), uset.end());
    double total = 1.0;
    for (VarId v : u) total *= vt[v].domain_size();
    double covered = 0.0;
    for (const Context* b : bodies) {
      double ext = 1.0;
      for (VarId v : u)
        if (!b->assigns(v)) ext *= vt[v].domain_size();
      covered += ext;
    }
    if (covered != total) {
      // Hunt for a small witness when the projected space is enumerable.
      std::optional<Context> witness;
      double uspace = total;
      if (uspace <= static_cast<double>(opts.max_enum)) {
        for_each_assignment(vt, u, [&](std::span<const ValueIx> values) {
          if (witness) return;
          std::vector<Assignment> items;
          for (std::size_t k = 0; k < u.size(); ++k) items.push_back({u[k], values[k]});
          Context ctx{std::move(items)};
          for (const Context* b : bodies)
            if (ctx.contains(*b)) return;
          witness = ctx;
        });
      }
      flag(msgf("rule bodies for '%s' do not cover every context", vt[x].name), {}, witness);
    }
  }
  return report;
}

std::string format_report(const VariableTable& vt, const ValidationReport& report) {
  std::string out;
  for (const Violation& v : report.violations) {
    out += v.what;
    if (!v.rules.empty()) {
      out += " (rules";
      for (RuleId id : v.rules) {
        out += ' ';
        out += std::to_string(id);
      }
      out += ')';
    }
    if (v.witness) {
      out += "; witness: ";
      out += format_context(vt, *v.witness);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ruleve
