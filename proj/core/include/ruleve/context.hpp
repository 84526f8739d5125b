#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ruleve/errors.hpp"

namespace ruleve {

using VarId = std::int32_t;
using ValueIx = std::int32_t;

// A discrete variable: a name, an ordered domain of value names, and its
// position in the global total ordering (== its id).
struct Variable {
  std::string name;
  std::vector<std::string> values;
  VarId id = -1;

  std::optional<ValueIx> value_index(std::string_view v) const;
  int domain_size() const { return static_cast<int>(values.size()); }
};

// Owns all variables of a model.  Ids are dense, 0-based, in declaration
// order; the declaration order is the total ordering used everywhere else.
// Immutable once built, so it can be shared across rule bases.
class VariableTable {
public:
  VarId add(std::string name, std::vector<std::string> values);

  int size() const { return static_cast<int>(vars_.size()); }
  const Variable& operator[](VarId id) const { return vars_.at(static_cast<std::size_t>(id)); }
  std::optional<VarId> find(std::string_view name) const;
  const std::vector<Variable>& all() const { return vars_; }

  // Product of the domain sizes, or nullopt if it exceeds cap.
  std::optional<std::uint64_t> joint_size(std::uint64_t cap) const;

  bool same_shape(const VariableTable& other) const;

private:
  std::vector<Variable> vars_;
  std::map<std::string, VarId, std::less<>> index_;
};

using VariableTablePtr = std::shared_ptr<const VariableTable>;

struct Assignment {
  VarId var = -1;
  ValueIx value = -1;

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

// A partial assignment of values to variables: at most one value per
// variable, stored sorted by variable id.  Value semantics throughout.
class Context {
public:
  Context() = default;
  explicit Context(std::vector<Assignment> items);  // sorts; throws on duplicate var
  static Context single(VarId var, ValueIx value);

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  std::span<const Assignment> items() const { return items_; }

  std::optional<ValueIx> value_of(VarId var) const;
  bool assigns(VarId var) const { return value_of(var).has_value(); }

  // True iff every assignment of sub also appears here.
  bool contains(const Context& sub) const;
  bool mentions_any(const Context& other) const;

  Context with(VarId var, ValueIx value) const;   // throws on conflicting re-assignment
  Context without(VarId var) const;
  Context minus_vars(const Context& other) const; // drop vars assigned in other

  friend bool compatible(const Context& a, const Context& b);
  // First variable both assign with different values, if any.
  friend std::optional<VarId> conflict_var(const Context& a, const Context& b);
  // Union of two compatible contexts.  Precondition: compatible(a, b).
  friend Context unite(const Context& a, const Context& b);

  friend bool operator==(const Context&, const Context&) = default;
  friend auto operator<=>(const Context&, const Context&) = default;

private:
  std::vector<Assignment> items_;
};

// "a=t & c=f"; empty context renders as "true".
std::string format_context(const VariableTable& vt, const Context& ctx);

// Iterate every complete assignment over `vars` (odometer order: last
// variable fastest).  `values[i]` is the value of vars[i].
template <class F>
void for_each_assignment(const VariableTable& vt, std::span<const VarId> vars, F&& fn) {
  std::vector<ValueIx> values(vars.size(), 0);
  if (vars.empty()) {
    fn(std::span<const ValueIx>(values));
    return;
  }
  for (;;) {
    fn(std::span<const ValueIx>(values));
    int i = static_cast<int>(vars.size()) - 1;
    while (i >= 0) {
      if (++values[static_cast<std::size_t>(i)] < vt[vars[static_cast<std::size_t>(i)]].domain_size()) break;
      values[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) return;
  }
}

// Convenience: iterate complete contexts over all variables of vt, exposing
// a flat value-per-id vector.
template <class F>
void for_each_complete(const VariableTable& vt, F&& fn) {
  std::vector<VarId> ids(static_cast<std::size_t>(vt.size()));
  for (int i = 0; i < vt.size(); ++i) ids[static_cast<std::size_t>(i)] = i;
  for_each_assignment(vt, ids, [&](std::span<const ValueIx> values) { fn(values); });
}

}  // namespace ruleve
