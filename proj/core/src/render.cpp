#include <charconv>
#include <string>

#include "ruleve/ingest.hpp"

namespace ruleve {

namespace {

// Shortest decimal form that parses back to the same double.
std::string number(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, p);
}

void render_variables(const VariableTable& vt, std::string& out) {
  for (const Variable& v : vt.all()) {
    out += "variable ";
    out += v.name;
    out += " { ";
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      if (i) out += ", ";
      out += v.values[i];
    }
    out += " }\n";
  }
}

void render_assigns(const VariableTable& vt, const Context& ctx, std::string& out) {
  bool first = true;
  for (const Assignment& a : ctx.items()) {
    if (!first) out += " & ";
    first = false;
    out += vt[a.var].name;
    out += '=';
    out += vt[a.var].values[static_cast<std::size_t>(a.value)];
  }
}

}  // namespace

std::string render(const RuleBase& rb) {
  const VariableTable& vt = *rb.vars;
  std::string out;
  render_variables(vt, out);
  if (!rb.rules.empty()) out += '\n';
  for (const Rule& r : rb.rules) {
    out += "rule ";
    render_assigns(vt, r.head, out);
    out += " <- ";
    if (!r.body.empty()) {
      render_assigns(vt, r.body, out);
      out += ' ';
    }
    out += ": ";
    out += number(r.prob.lo);
    if (r.prob.hi != r.prob.lo) {
      out += ", ";
      out += number(r.prob.hi);
    }
    out += '\n';
  }
  return out;
}

std::string render(const TabularNetwork& net) {
  const VariableTable& vt = *net.vars;
  std::string out;
  render_variables(vt, out);
  for (const Cpt& cpt : net.cpts) {
    out += "\ncpt ";
    out += vt[cpt.child].name;
    out += " |";
    for (VarId p : cpt.parents) {
      out += ' ';
      out += vt[p].name;
    }
    out += " {\n";
    // rows in canonical row-major order, each naming its parent values
    std::vector<ValueIx> pv(cpt.parents.size(), 0);
    for (std::size_t r = 0; r < cpt.rows.size(); ++r) {
      out += "  ";
      for (std::size_t k = 0; k < cpt.parents.size(); ++k) {
        out += vt[cpt.parents[k]].values[static_cast<std::size_t>(pv[k])];
        out += ' ';
      }
      out += ':';
      for (double p : cpt.rows[r]) {
        out += ' ';
        out += number(p);
      }
      out += '\n';
      for (int k = static_cast<int>(cpt.parents.size()) - 1; k >= 0; --k) {
        auto ks = static_cast<std::size_t>(k);
        if (++pv[ks] < static_cast<ValueIx>(vt[cpt.parents[ks]].domain_size())) break;
        pv[ks] = 0;
      }
    }
    out += "}\n";
  }
  return out;
}

std::string render(const ModelDocument& doc) {
  if (doc.network) return render(*doc.network);
  if (doc.rules) return render(*doc.rules);
  std::string out;
  render_variables(*doc.vars, out);
  return out;
}

}  // namespace ruleve
