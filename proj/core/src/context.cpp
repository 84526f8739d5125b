#include "ruleve/context.hpp"

#include <algorithm>

namespace ruleve {

std::optional<ValueIx> Variable::value_index(std::string_view v) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == v) return static_cast<ValueIx>(i);
  return std::nullopt;
}

VarId VariableTable::add(std::string name, std::vector<std::string> values) {
  if (index_.count(name))
    throw InvalidArgument("variable '" + name + "' declared twice");
  if (values.size() < 2)
    throw InvalidArgument("variable '" + name + "' needs at least two values");
  for (std::size_t i = 0; i < values.size(); ++i)
    for (std::size_t j = i + 1; j < values.size(); ++j)
      if (values[i] == values[j])
        throw InvalidArgument("variable '" + name + "' repeats value '" + values[i] + "'");
  VarId id = static_cast<VarId>(vars_.size());
  index_.emplace(name, id);
  vars_.push_back(Variable{std::move(name), std::move(values), id});
  return id;
}

std::optional<VarId> VariableTable::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint64_t> VariableTable::joint_size(std::uint64_t cap) const {
  std::uint64_t n = 1;
  for (const auto& v : vars_) {
    n *= static_cast<std::uint64_t>(v.domain_size());
    if (n > cap) return std::nullopt;
  }
  return n;
}

bool VariableTable::same_shape(const VariableTable& other) const {
  if (size() != other.size()) return false;
  for (int i = 0; i < size(); ++i) {
    const Variable& a = vars_[static_cast<std::size_t>(i)];
    const Variable& b = other.vars_[static_cast<std::size_t>(i)];
    if (a.name != b.name || a.values != b.values) return false;
  }
  return true;
}

Context::Context(std::vector<Assignment> items) : items_(std::move(items)) {
  std::sort(items_.begin(), items_.end());
  for (std::size_t i = 1; i < items_.size(); ++i)
    if (items_[i - 1].var == items_[i].var)
      throw InvalidArgument("context assigns one variable twice");
}

Context Context::single(VarId var, ValueIx value) {
  Context c;
  c.items_.push_back({var, value});
  return c;
}

std::optional<ValueIx> Context::value_of(VarId var) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), Assignment{var, -1},
                             [](const Assignment& a, const Assignment& b) { return a.var < b.var; });
  if (it == items_.end() || it->var != var) return std::nullopt;
  return it->value;
}

bool Context::contains(const Context& sub) const {
  auto it = items_.begin();
  for (const Assignment& a : sub.items_) {
    while (it != items_.end() && it->var < a.var) ++it;
    if (it == items_.end() || it->var != a.var || it->value != a.value) return false;
  }
  return true;
}

bool Context::mentions_any(const Context& other) const {
  auto a = items_.begin();
  auto b = other.items_.begin();
  while (a != items_.end() && b != other.items_.end()) {
    if (a->var < b->var) ++a;
    else if (b->var < a->var) ++b;
    else return true;
  }
  return false;
}

Context Context::with(VarId var, ValueIx value) const {
  if (auto v = value_of(var)) {
    if (*v != value) throw InvalidArgument("context re-assigns a variable");
    return *this;
  }
  Context c(*this);
  c.items_.insert(std::upper_bound(c.items_.begin(), c.items_.end(), Assignment{var, value}),
                  Assignment{var, value});
  return c;
}

Context Context::without(VarId var) const {
  Context c;
  c.items_.reserve(items_.size());
  for (const Assignment& a : items_)
    if (a.var != var) c.items_.push_back(a);
  return c;
}

Context Context::minus_vars(const Context& other) const {
  Context c;
  c.items_.reserve(items_.size());
  for (const Assignment& a : items_)
    if (!other.assigns(a.var)) c.items_.push_back(a);
  return c;
}

bool compatible(const Context& a, const Context& b) {
  return !conflict_var(a, b).has_value();
}

std::optional<VarId> conflict_var(const Context& a, const Context& b) {
  auto i = a.items_.begin();
  auto j = b.items_.begin();
  while (i != a.items_.end() && j != b.items_.end()) {
    if (i->var < j->var) ++i;
    else if (j->var < i->var) ++j;
    else {
      if (i->value != j->value) return i->var;
      ++i;
      ++j;
    }
  }
  return std::nullopt;
}

Context unite(const Context& a, const Context& b) {
  Context c;
  c.items_.reserve(a.items_.size() + b.items_.size());
  auto i = a.items_.begin();
  auto j = b.items_.begin();
  while (i != a.items_.end() || j != b.items_.end()) {
    if (j == b.items_.end() || (i != a.items_.end() && i->var < j->var)) {
      c.items_.push_back(*i++);
    } else if (i == a.items_.end() || j->var < i->var) {
      c.items_.push_back(*j++);
    } else {
      if (i->value != j->value) throw InvalidArgument("uniting incompatible contexts");
      c.items_.push_back(*i);
      ++i;
      ++j;
    }
  }
  return c;
}

std::string format_context(const VariableTable& vt, const Context& ctx) {
  if (ctx.empty()) return "true";
  std::string out;
  bool first = true;
  for (const Assignment& a : ctx.items()) {
    if (!first) out += " & ";
    first = false;
    const Variable& v = vt[a.var];
    out += v.name;
    out += '=';
    out += v.values[static_cast<std::size_t>(a.value)];
  }
  return out;
}

}  // namespace ruleve
