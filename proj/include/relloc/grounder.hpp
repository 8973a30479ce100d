#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "relloc/circuit.hpp"
#include "relloc/model.hpp"

namespace relloc {

using Clause = std::vector<int>;

/// Atom pools at a scope. ONE sigs have a single atom whose membership is a
/// constant; every field's pool is owner-pool x target-pool.
struct Bounds {
  std::vector<Atom> universe;
  std::vector<std::string> sig_names;
  std::vector<std::string> field_names;
  std::map<std::string, std::vector<AtomId>> sig_pools;
  std::set<std::string> fixed_sigs;

  int width() const { return static_cast<int>(universe.size()); }
};

Bounds build_bounds(const Model& m, int scope);

/// Bijection between (relation, tuple) pairs and variable ids 1..size().
class VarMap {
 public:
  struct Entry {
    std::string relation;
    Tuple tuple;
  };

  int add(const std::string& relation, const Tuple& t);
  std::optional<int> find(const std::string& relation, const Tuple& t) const;
  const Entry& entry(int var) const { return entries_.at(static_cast<std::size_t>(var - 1)); }
  int size() const { return static_cast<int>(entries_.size()); }

 private:
  std::vector<Entry> entries_;
  std::map<std::pair<std::string, Tuple>, int> ids_;
};

/// A relation as circuit cells indexed by tuple key; absent cells are false.
struct BooleanMatrix {
  int arity = 1;
  int width = 0;
  std::map<std::uint64_t, Circuit::Bit> cells;

  Circuit::Bit at(std::uint64_t key) const {
    auto it = cells.find(key);
    return it == cells.end() ? Circuit::kFalse : it->second;
  }
};

enum class GroupKind { Declaration, Fact, Property, Predicate };
const char* to_string(GroupKind k);

struct ClauseGroup {
  int id = 0;
  GroupKind kind = GroupKind::Fact;
  SourceSpan span;
  std::string label;  // fact/pred owner, declaration name, or assertion text
  int conjunct_index = -1;  // position in Model::facts or in the extra list
};

struct GroundProblem {
  Bounds bounds;
  VarMap var_map;
  int num_vars = 0;  // relation variables followed by Tseitin auxiliaries
  std::vector<Clause> clauses;
  std::vector<int> clause_group;  // parallel to clauses
  std::vector<ClauseGroup> groups;
  Circuit circuit;
};

/// Relation and formula translation against fixed bounds.
class Translator {
 public:
  using Env = std::map<std::string, AtomId>;

  Translator(const Model& m, const Bounds& bounds, const VarMap& vars, Circuit& circuit);

  BooleanMatrix translate_rel(const RelExpr& e, const Env& env);
  Circuit::Bit translate_formula(const Formula& f, const Env& env);
  /// Matrix holding the variables (or constants) of a sig or field.
  BooleanMatrix relation_matrix(const std::string& name);

 private:
  BooleanMatrix join(const BooleanMatrix& l, const BooleanMatrix& r);
  BooleanMatrix closure(const BooleanMatrix& r);
  BooleanMatrix unite(const BooleanMatrix& l, const BooleanMatrix& r);
  Circuit::Bit subset(const BooleanMatrix& l, const BooleanMatrix& r);
  Circuit::Bit at_most_one(const std::vector<Circuit::Bit>& bits);

  const Model& m_;
  const Bounds& bounds_;
  const VarMap& vars_;
  Circuit& c_;
};

/// Relation variables for `bounds`: sig memberships (non-ONE sigs) first,
/// then field tuples, each in declaration and lexicographic order.
VarMap build_var_map(const Model& m, const Bounds& bounds);

/// Compiles declarations, facts, `extra` conjuncts and the property (negated
/// when asked) into grouped CNF. Each group is clausified on its own so any
/// subset of groups is a faithful encoding of the matching constraints.
GroundProblem ground(const Model& m, const Formula* property, bool negate_property, int scope,
                     std::span<const Conjunct> extra = {});

/// Instance whose relations hold exactly the true relation variables plus
/// the fixed ONE-sig atoms. `assignment` is indexed by variable id.
Instance decode(const std::vector<bool>& assignment, const VarMap& vars, const Bounds& bounds);

/// DIMACS CNF with `c group <id> <kind> <span>` comments before each group.
void write_dimacs(std::ostream& os, const GroundProblem& p);

}  // namespace relloc
