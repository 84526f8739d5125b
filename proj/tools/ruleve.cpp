// Command line front end: validate, convert, compress, infer, bounds,
// compare.  Exit codes: 0 ok, 1 property/validation violation, 2 input
// error, 3 impossible evidence.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ruleve/approx.hpp"
#include "ruleve/exact.hpp"
#include "ruleve/generate.hpp"
#include "ruleve/ingest.hpp"
#include "ruleve/oracle.hpp"
#include "ruleve/validate.hpp"

using namespace ruleve;

namespace {

// ---------------------------------------------------------------- plumbing

// model path, for "path:line:col" prefixes on parse diagnostics
std::string g_model_path;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_digest(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct LoadedModel {
  std::string path;
  std::string digest;
  ModelDocument doc;

  // Rule view of the model (converted from the tables when tabular).
  RuleBase rules() const { return doc.is_tabular() ? cpt_to_rules(*doc.network) : *doc.rules; }
};

LoadedModel load_model(const std::string& path) {
  g_model_path = path;
  std::string text = read_file(path);
  LoadedModel m;
  m.path = path;
  m.digest = fnv1a_digest(text);
  m.doc = parse_model(text, path);
  return m;
}

VarId lookup_var(const VariableTable& vt, const std::string& name) {
  auto id = vt.find(name);
  if (!id) throw InvalidArgument("unknown variable: " + name);
  return *id;
}

Context parse_evidence(const VariableTable& vt, const std::vector<std::string>& items) {
  std::vector<Assignment> asg;
  for (const std::string& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("evidence must look like var=value: " + item);
    VarId v = lookup_var(vt, item.substr(0, eq));
    auto val = vt[v].value_index(item.substr(eq + 1));
    if (!val) throw InvalidArgument("unknown value for " + vt[v].name + ": " + item.substr(eq + 1));
    asg.push_back({v, *val});
  }
  return Context{std::move(asg)};
}

std::optional<std::vector<VarId>> parse_order(const VariableTable& vt, const std::string& spec) {
  if (spec.empty() || spec == "auto") return std::nullopt;
  std::vector<VarId> order;
  std::string name;
  std::istringstream ss(spec);
  while (std::getline(ss, name, ',')) order.push_back(lookup_var(vt, name));
  return order;
}

std::string format_evidence(const VariableTable& vt, const Context& ev) {
  std::string out;
  for (const Assignment& a : ev.items()) {
    if (!out.empty()) out += ',';
    out += vt[a.var].name;
    out += '=';
    out += vt[a.var].values[static_cast<std::size_t>(a.value)];
  }
  return out;
}

std::string format_order(const VariableTable& vt, const std::vector<VarId>& order) {
  std::string out;
  for (VarId v : order) {
    if (!out.empty()) out += ',';
    out += vt[v].name;
  }
  return out;
}

// Table vs record output.  Record mode is stable key = value text, one pair
// per line, no timing, so runs are byte-comparable; table mode is for
// humans and ends with the wall time.
struct Report {
  bool record = false;
  std::string table, rec;

  void kv(const std::string& key, const std::string& value) {
    rec += key;
    rec += " = ";
    rec += value;
    rec += '\n';
  }
  void line(const std::string& s) {
    table += s;
    table += '\n';
  }
  std::string text() const { return record ? rec : table; }
};

void emit(const Report& r, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(r.text().c_str(), stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write: " + out_path);
  out << r.text();
}

void stats_into(Report& r, const VariableTable& vt, const InferenceStats& stats) {
  if (!stats.steps.empty()) {
    r.line("step  variable  rules_created  rules_active  factor_entries");
    int i = 1;
    for (const StepStats& s : stats.steps) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-5d %-9s %-14zu %-13zu %zu", i, vt[s.variable].name.c_str(),
                    s.rules_created, s.rules_active, s.factor_entries);
      r.line(buf);
      std::string k = "step." + std::to_string(i);
      r.kv(k + ".variable", vt[s.variable].name);
      r.kv(k + ".rules_created", std::to_string(s.rules_created));
      r.kv(k + ".rules_active", std::to_string(s.rules_active));
      r.kv(k + ".factor_entries", std::to_string(s.factor_entries));
      ++i;
    }
  }
  r.line("peak: rules_created=" + std::to_string(stats.max_rules_created) +
         " rules_active=" + std::to_string(stats.max_rules_active) +
         " factor_entries=" + std::to_string(stats.max_factor_entries));
  r.kv("peak.rules_created", std::to_string(stats.max_rules_created));
  r.kv("peak.rules_active", std::to_string(stats.max_rules_active));
  r.kv("peak.factor_entries", std::to_string(stats.max_factor_entries));
}

using Clock = std::chrono::steady_clock;

void finish(Report& r, Clock::time_point start, const std::string& out_path) {
  double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  char buf[48];
  std::snprintf(buf, sizeof buf, "wall: %.3f ms", ms);
  r.line(buf);
  emit(r, out_path);
}

// ---------------------------------------------------------------- commands

struct CommonArgs {
  std::string model, query, order_spec = "auto", format = "table", out;
  std::vector<std::string> evidence;
};

int cmd_validate(const CommonArgs& args) {
  auto start = Clock::now();
  LoadedModel m = load_model(args.model);
  Report r;
  r.record = args.format == "record";
  r.line("validate model=" + m.path + " digest=" + m.digest);
  r.kv("command", "validate");
  r.kv("model", m.path);
  r.kv("digest", m.digest);
  r.kv("variables", std::to_string(m.doc.vars->size()));

  RuleBase rb = m.rules();
  if (m.doc.is_tabular())
    r.kv("cpts", std::to_string(m.doc.network->cpts.size()));
  r.kv("rules", std::to_string(rb.rules.size()));
  r.kv("kind", rb.kind == RuleBaseKind::exact ? "exact" : "approximating");

  ValidationReport report = validate(rb);
  r.kv("valid", report.ok() ? "yes" : "no");
  if (report.ok()) {
    r.line("ok: " + std::to_string(m.doc.vars->size()) + " variables, " +
           std::to_string(rb.rules.size()) + " rules (" +
           (rb.kind == RuleBaseKind::exact ? "exact" : "approximating") + ")");
    finish(r, start, args.out);
    return 0;
  }
  r.line(format_report(*m.doc.vars, report));
  r.line("invalid: " + std::to_string(report.violations.size()) + " violation(s)");
  int i = 1;
  for (const Violation& v : report.violations) {
    std::string detail = v.what;
    if (v.witness) detail += " at " + format_evidence(*m.doc.vars, *v.witness);
    r.kv("violation." + std::to_string(i++), detail);
  }
  finish(r, start, args.out);
  return 1;
}

int cmd_convert(const CommonArgs& args) {
  LoadedModel m = load_model(args.model);
  std::string text = m.doc.is_tabular() ? render(cpt_to_rules(*m.doc.network)) : render(m.doc);
  if (args.out.empty()) {
    std::fputs(text.c_str(), stdout);
    return 0;
  }
  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write: " + args.out);
  out << text;
  std::printf("converted %s -> %s\n", m.path.c_str(), args.out.c_str());
  return 0;
}

int cmd_compress(const CommonArgs& args, double threshold, bool extreme_guard) {
  auto start = Clock::now();
  LoadedModel m = load_model(args.model);
  Report r;
  r.record = args.format == "record";
  r.line("compress model=" + m.path + " digest=" + m.digest + " threshold=" + num(threshold));
  r.kv("command", "compress");
  r.kv("model", m.path);
  r.kv("digest", m.digest);
  r.kv("threshold", num(threshold));

  const VariableTable& vt = *m.doc.vars;
  RuleBase rb = m.rules();
  std::uint64_t tot_entries = 0, tot_exact = 0, tot_at = 0;
  r.line("variable  entries  rules(0)  rules(threshold)");
  if (m.doc.is_tabular()) {
    for (const StructureCount& c : count_structure(*m.doc.network, threshold, extreme_guard)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-9s %-8llu %-9llu %llu", vt[c.variable].name.c_str(),
                    static_cast<unsigned long long>(c.table_entries),
                    static_cast<unsigned long long>(c.rules_exact),
                    static_cast<unsigned long long>(c.rules_at_threshold));
      r.line(buf);
      std::string k = "var." + vt[c.variable].name;
      r.kv(k + ".entries", std::to_string(c.table_entries));
      r.kv(k + ".exact", std::to_string(c.rules_exact));
      r.kv(k + ".at_threshold", std::to_string(c.rules_at_threshold));
      tot_entries += c.table_entries;
      tot_exact += c.rules_exact;
      tot_at += c.rules_at_threshold;
    }
  } else {
    // rule input: the "entries" column counts the rules we started from
    RuleBase exact = extract_structure(rb, 0.0, extreme_guard);
    RuleBase at = extract_structure(rb, threshold, extreme_guard);
    for (VarId v = 0; v < vt.size(); ++v) {
      auto count = [&](const RuleBase& b) {
        std::uint64_t n = 0;
        for (const Rule& rule : b.rules)
          if (rule.head.assigns(v)) ++n;
        return n;
      };
      std::uint64_t in = count(rb), r0 = count(exact), rt = count(at);
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-9s %-8llu %-9llu %llu", vt[v].name.c_str(),
                    static_cast<unsigned long long>(in), static_cast<unsigned long long>(r0),
                    static_cast<unsigned long long>(rt));
      r.line(buf);
      std::string k = "var." + vt[v].name;
      r.kv(k + ".entries", std::to_string(in));
      r.kv(k + ".exact", std::to_string(r0));
      r.kv(k + ".at_threshold", std::to_string(rt));
      tot_entries += in;
      tot_exact += r0;
      tot_at += rt;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "total     %-8llu %-9llu %llu",
                static_cast<unsigned long long>(tot_entries),
                static_cast<unsigned long long>(tot_exact),
                static_cast<unsigned long long>(tot_at));
  r.line(buf);
  r.kv("total.entries", std::to_string(tot_entries));
  r.kv("total.exact", std::to_string(tot_exact));
  r.kv("total.at_threshold", std::to_string(tot_at));

  if (!args.out.empty()) {
    RuleBase compressed = extract_structure(rb, threshold, extreme_guard);
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write: " + args.out);
    out << render(compressed);
    r.line("wrote " + args.out);
  }
  // table report goes to stdout even when --out holds the compressed base
  double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  std::snprintf(buf, sizeof buf, "wall: %.3f ms", ms);
  r.line(buf);
  std::fputs(r.text().c_str(), stdout);
  return 0;
}

int cmd_infer(const CommonArgs& args, const std::string& engine) {
  auto start = Clock::now();
  LoadedModel m = load_model(args.model);
  const VariableTable& vt = *m.doc.vars;
  VarId query = lookup_var(vt, args.query);
  Context evidence = parse_evidence(vt, args.evidence);
  auto order = parse_order(vt, args.order_spec);

  Distribution dist;
  InferenceStats stats;
  std::vector<VarId> used_order;
  if (engine == "ve") {
    if (!m.doc.is_tabular())
      throw InvalidArgument("the ve engine needs a tabular model; use convert or engine=rules");
    std::tie(dist, stats) = ve_posterior(*m.doc.network, query, evidence, order);
  } else if (engine == "rules") {
    std::tie(dist, stats) = compute_belief(m.rules(), query, evidence, order);
  } else if (engine == "enum") {
    dist = enumerate_posterior(m.rules(), query, evidence);
  } else {
    throw InvalidArgument("unknown engine: " + engine);
  }
  for (const StepStats& s : stats.steps) used_order.push_back(s.variable);

  Report r;
  r.record = args.format == "record";
  r.line("infer model=" + m.path + " digest=" + m.digest + " engine=" + engine);
  r.kv("command", "infer");
  r.kv("model", m.path);
  r.kv("digest", m.digest);
  r.kv("engine", engine);
  r.kv("query", vt[query].name);
  r.kv("evidence", format_evidence(vt, evidence));
  std::string shown_order = format_order(vt, used_order);
  r.line("query: " + vt[query].name + "   evidence: " +
         (evidence.empty() ? "(none)" : format_evidence(vt, evidence)));
  r.line("order: " + (order ? shown_order : "(auto) " + shown_order));
  r.kv("order", shown_order);
  for (ValueIx v = 0; v < vt[query].domain_size(); ++v) {
    const std::string& val = vt[query].values[static_cast<std::size_t>(v)];
    r.line("P(" + vt[query].name + " = " + val + ") = " + num(dist.probs[static_cast<std::size_t>(v)]));
    r.kv("posterior." + val, num(dist.probs[static_cast<std::size_t>(v)]));
  }
  stats_into(r, vt, stats);
  finish(r, start, args.out);
  return 0;
}

int cmd_bounds(const CommonArgs& args, double threshold, const std::string& strategy,
               bool extreme_guard) {
  auto start = Clock::now();
  LoadedModel m = load_model(args.model);
  const VariableTable& vt = *m.doc.vars;
  VarId query = lookup_var(vt, args.query);
  Context evidence = parse_evidence(vt, args.evidence);
  auto order = parse_order(vt, args.order_spec);

  SimplifyConfig cfg;
  cfg.threshold = threshold;
  cfg.extreme_guard = extreme_guard;
  if (strategy == "drop") cfg.strategy = SimplifyStrategy::drop;
  else if (strategy == "resolve") cfg.strategy = SimplifyStrategy::resolve;
  else if (strategy == "both") cfg.strategy = SimplifyStrategy::both;
  else throw InvalidArgument("unknown strategy: " + strategy);

  RuleBase original = m.rules();
  RuleBase wide = simplify(original, cfg);
  auto [bp, stats] = bounded_posterior(wide, query, evidence, order);

  Report r;
  r.record = args.format == "record";
  r.line("bounds model=" + m.path + " digest=" + m.digest + " threshold=" + num(threshold) +
         " strategy=" + strategy);
  r.kv("command", "bounds");
  r.kv("model", m.path);
  r.kv("digest", m.digest);
  r.kv("threshold", num(threshold));
  r.kv("strategy", strategy);
  r.kv("query", vt[query].name);
  r.kv("evidence", format_evidence(vt, evidence));
  std::vector<VarId> used_order;
  for (const StepStats& s : stats.steps) used_order.push_back(s.variable);
  r.kv("order", format_order(vt, used_order));
  r.kv("rules.before", std::to_string(original.rules.size()));
  r.kv("rules.after", std::to_string(wide.rules.size()));
  r.line("query: " + vt[query].name + "   evidence: " +
         (evidence.empty() ? "(none)" : format_evidence(vt, evidence)));
  r.line("order: " + (order ? format_order(vt, used_order) : "(auto) " + format_order(vt, used_order)));
  r.line("rules: " + std::to_string(original.rules.size()) + " -> " +
         std::to_string(wide.rules.size()));
  for (ValueIx v = 0; v < vt[query].domain_size(); ++v) {
    const std::string& val = vt[query].values[static_cast<std::size_t>(v)];
    const Interval& b = bp.bounds[static_cast<std::size_t>(v)];
    r.line("P(" + vt[query].name + " = " + val + ") in [" + num(b.lo) + ", " + num(b.hi) + "]");
    r.kv("bounds." + val + ".lo", num(b.lo));
    r.kv("bounds." + val + ".hi", num(b.hi));
  }

  // When the joint space is small enough, also show the exact posterior and
  // check the bounds actually contain it.
  int exit_code = 0;
  if (original.kind == RuleBaseKind::exact && vt.joint_size(1u << 22)) {
    Distribution exact = enumerate_posterior(original, query, evidence);
    bool contained = true;
    for (ValueIx v = 0; v < vt[query].domain_size(); ++v) {
      const std::string& val = vt[query].values[static_cast<std::size_t>(v)];
      double p = exact.probs[static_cast<std::size_t>(v)];
      const Interval& b = bp.bounds[static_cast<std::size_t>(v)];
      bool in = b.lo - 1e-12 <= p && p <= b.hi + 1e-12;
      contained = contained && in;
      r.line("exact P(" + vt[query].name + " = " + val + ") = " + num(p) +
             (in ? "  (within bounds)" : "  (OUTSIDE bounds)"));
      r.kv("exact." + val, num(p));
    }
    r.line(std::string("containment: ") + (contained ? "ok" : "violated"));
    r.kv("containment", contained ? "ok" : "violated");
    if (!contained) exit_code = 1;
  } else {
    r.kv("containment", "skipped");
  }
  stats_into(r, vt, stats);
  finish(r, start, args.out);
  return exit_code;
}

int cmd_compare(const CommonArgs& args, int trials, std::uint64_t seed, bool corrupt_bounds) {
  LoadedModel m = load_model(args.model);
  const VariableTable& vt = *m.doc.vars;
  RuleBase rb = m.rules();
  const bool tabular = m.doc.is_tabular();
  const bool exact_model = rb.kind == RuleBaseKind::exact;
  std::mt19937_64 rng(seed);

  Report r;
  r.record = args.format == "record";
  r.line("compare model=" + m.path + " digest=" + m.digest + " trials=" +
         std::to_string(trials) + " seed=" + std::to_string(seed));
  r.kv("command", "compare");
  r.kv("model", m.path);
  r.kv("digest", m.digest);
  r.kv("trials", std::to_string(trials));
  r.kv("seed", std::to_string(seed));

  const double thresholds[] = {0.0, 0.05, 0.1, 0.2};
  int agree = 0, sound = 0;
  for (int t = 0; t < trials; ++t) {
    VarId query = static_cast<VarId>(rand_below(rng, static_cast<std::uint64_t>(vt.size())));
    Context evidence;
    if (rand_below(rng, 2) == 1 && vt.size() > 1) {
      VarId ev;
      do {
        ev = static_cast<VarId>(rand_below(rng, static_cast<std::uint64_t>(vt.size())));
      } while (ev == query);
      evidence = Context::single(
          ev, static_cast<ValueIx>(rand_below(rng, static_cast<std::uint64_t>(vt[ev].domain_size()))));
    }
    std::vector<VarId> order = variables_to_eliminate(vt, query, evidence);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rand_below(rng, i)]);
    double threshold = thresholds[t % 4];

    auto blame = [&](const std::string& kind, const std::string& detail) {
      r.line("violation: trial=" + std::to_string(t) + " query=" + vt[query].name +
             " evidence=" + (evidence.empty() ? "(none)" : format_evidence(vt, evidence)) +
             " order=" + format_order(vt, order) + " kind=" + kind);
      r.line("  " + detail);
      r.line("repro: --seed " + std::to_string(seed) + " --trials " + std::to_string(trials) +
             " (trial " + std::to_string(t) + ")");
      std::string k = "violation.trial" + std::to_string(t);
      r.kv(k + ".kind", kind);
      r.kv(k + ".query", vt[query].name);
      r.kv(k + ".evidence", format_evidence(vt, evidence));
      r.kv(k + ".order", format_order(vt, order));
      r.kv(k + ".detail", detail);
    };

    try {
      if (exact_model) {
        Distribution ref = enumerate_posterior(rb, query, evidence);
        bool engines_ok = true;
        Distribution got = compute_belief(rb, query, evidence, order).first;
        for (std::size_t v = 0; v < ref.probs.size(); ++v)
          if (std::abs(got.probs[v] - ref.probs[v]) > 1e-9) {
            blame("rules-vs-enum", "value " + vt[query].values[v] + ": " + num(got.probs[v]) +
                                       " vs " + num(ref.probs[v]));
            engines_ok = false;
          }
        if (tabular) {
          Distribution vd = ve_posterior(*m.doc.network, query, evidence, order).first;
          for (std::size_t v = 0; v < ref.probs.size(); ++v)
            if (std::abs(vd.probs[v] - ref.probs[v]) > 1e-9) {
              blame("ve-vs-enum", "value " + vt[query].values[v] + ": " + num(vd.probs[v]) +
                                      " vs " + num(ref.probs[v]));
              engines_ok = false;
            }
        }
        if (engines_ok) ++agree;

        SimplifyConfig cfg;
        cfg.threshold = threshold;
        RuleBase wide = simplify(rb, cfg);
        BoundedPosterior bp = bounded_posterior(wide, query, evidence, order).first;
        if (corrupt_bounds)
          for (Interval& b : bp.bounds) b = Interval::exact(std::min(1.0, b.hi + 0.01));
        bool bounds_ok = true;
        for (std::size_t v = 0; v < ref.probs.size(); ++v) {
          const Interval& b = bp.bounds[v];
          if (!(b.lo - 1e-12 <= ref.probs[v] && ref.probs[v] <= b.hi + 1e-12)) {
            blame("bounds-containment",
                  "value " + vt[query].values[v] + ": " + num(ref.probs[v]) + " outside [" +
                      num(b.lo) + ", " + num(b.hi) + "] at threshold " + num(threshold));
            bounds_ok = false;
          }
        }
        if (bounds_ok) ++sound;
      } else {
        // approximating model: dual-route bound agreement
        BoundedPosterior bp = bounded_posterior(rb, query, evidence, order).first;
        if (corrupt_bounds)
          for (Interval& b : bp.bounds) b = Interval::exact(std::min(1.0, b.hi + 0.01));
        BoundedPosterior want = enumerate_bounds(rb, query, evidence);
        bool bounds_ok = true;
        for (std::size_t v = 0; v < want.bounds.size(); ++v)
          if (std::abs(bp.bounds[v].lo - want.bounds[v].lo) > 1e-9 ||
              std::abs(bp.bounds[v].hi - want.bounds[v].hi) > 1e-9) {
            blame("bounds-vs-enum", "value " + vt[query].values[v]);
            bounds_ok = false;
          }
        if (bounds_ok) {
          ++agree;
          ++sound;
        }
      }
    } catch (const ImpossibleEvidence&) {
      // zero-probability evidence draws count as agreeing: every engine
      // refuses them the same way
      ++agree;
      ++sound;
    }
  }

  bool all_ok = agree == trials && sound == trials;
  r.line((all_ok ? "ok: " : "FAILED: ") + std::string("engines agree on ") +
         std::to_string(agree) + "/" + std::to_string(trials) + " trials; bounds sound on " +
         std::to_string(sound) + "/" + std::to_string(trials));
  r.kv("engines_agree", std::to_string(agree));
  r.kv("bounds_sound", std::to_string(sound));
  r.kv("result", all_ok ? "ok" : "failed");
  emit(r, args.out);  // no wall time: reports must be byte-stable
  return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------- main

int dispatch(int argc, char** argv) {
  CLI::App app{"rule-based variable elimination toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string engine = "rules", strategy = "both";
  double threshold = 0.0;
  bool extreme_guard = false, corrupt_bounds = false;
  int trials = 100;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_query) {
    cmd->add_option("--model", args.model, "model file")->required();
    cmd->add_option("--format", args.format, "table|record")
        ->check(CLI::IsMember({"table", "record"}));
    cmd->add_option("--out", args.out, "write output to this file");
    if (needs_query) {
      cmd->add_option("--query", args.query, "query variable")->required();
      cmd->add_option("--evidence", args.evidence, "var=value (repeatable)");
      cmd->add_option("--order", args.order_spec, "auto or comma separated variables");
    }
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check model well-formedness");
  add_common(validate_cmd, false);

  CLI::App* convert_cmd = app.add_subcommand("convert", "rewrite a tabular model as exact rules");
  add_common(convert_cmd, false);

  CLI::App* compress_cmd = app.add_subcommand("compress", "report / extract rule structure");
  add_common(compress_cmd, false);
  compress_cmd->add_option("--threshold", threshold, "max merged interval width");
  compress_cmd->add_flag("--extreme-guard", extreme_guard, "refuse to blur near 0/1");

  CLI::App* infer_cmd = app.add_subcommand("infer", "exact posterior for one query");
  add_common(infer_cmd, true);
  infer_cmd->add_option("--engine", engine, "ve|rules|enum")
      ->check(CLI::IsMember({"ve", "rules", "enum"}));

  CLI::App* bounds_cmd = app.add_subcommand("bounds", "posterior bounds after simplification");
  add_common(bounds_cmd, true);
  bounds_cmd->add_option("--threshold", threshold, "max widened interval width");
  bounds_cmd->add_option("--strategy", strategy, "drop|resolve|both")
      ->check(CLI::IsMember({"drop", "resolve", "both"}));
  bounds_cmd->add_flag("--extreme-guard", extreme_guard, "refuse to blur near 0/1");

  CLI::App* compare_cmd = app.add_subcommand("compare", "randomized cross-engine check");
  add_common(compare_cmd, false);
  compare_cmd->add_option("--trials", trials, "number of random queries");
  compare_cmd->add_option("--seed", seed, "rng seed");
  compare_cmd->add_flag("--corrupt-bounds", corrupt_bounds,
                        "test hook: break the bounds before checking them");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (validate_cmd->parsed()) return cmd_validate(args);
  if (convert_cmd->parsed()) return cmd_convert(args);
  if (compress_cmd->parsed()) return cmd_compress(args, threshold, extreme_guard);
  if (infer_cmd->parsed()) return cmd_infer(args, engine);
  if (bounds_cmd->parsed()) return cmd_bounds(args, threshold, strategy, extreme_guard);
  if (compare_cmd->parsed()) return cmd_compare(args, trials, seed, corrupt_bounds);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ParseError& e) {
    std::fprintf(stderr, "%s:%d:%d: parse error: %s\n", g_model_path.c_str(), e.line, e.col,
                 e.what());
    return 2;
  } catch (const SemanticError& e) {
    std::fprintf(stderr, "%s:%d:%d: error: %s\n", g_model_path.c_str(), e.line, e.col, e.what());
    return 2;
  } catch (const ImpossibleEvidence& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const MalformedRuleBase& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ResourceLimit& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    // remaining library errors are bad inputs: unknown names, bad orderings,
    // budget overruns, operator misuse
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
