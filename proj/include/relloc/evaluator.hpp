#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "relloc/model.hpp"

namespace relloc {

/// Quantifier variable name -> atom.
using Binding = std::map<std::string, AtomId>;

TupleSet eval_rel(const RelExpr& e, const Instance& inst, const Binding& b);
bool eval_formula(const Formula& f, const Instance& inst, const Binding& b);

/// Atoms bound to the node's free variables plus every atom occurring in the
/// evaluation of its relational leaves. Leaves under a quantifier nested in
/// the node are evaluated for every atom of that quantifier's bound.
std::set<AtomId> involved_atoms(const Formula& f, const Instance& inst, const Binding& b);
std::set<AtomId> involved_atoms(const RelExpr& e, const Instance& inst, const Binding& b);

/// The maximal chain of outer quantifiers of a formula.
std::vector<const Formula*> outer_quantifiers(const Formula& f);

struct Guard {
  std::string var;
  RelPtr bound;
};

struct Instantiation {
  Binding binding;
  FormPtr body;
  std::vector<Guard> guards;
  std::vector<Quantifier> quantifiers;  // kinds of the stripped chain, outermost first
};

/// Strips the outer quantifier chain of `c` and binds its variables to
/// `atoms` positionally. Returns nullopt when the arity does not match or
/// an atom's sig is not in the variable's static type.
std::optional<Instantiation> guarded_instantiate(const Conjunct& c,
                                                 std::span<const AtomId> atoms,
                                                 const std::vector<Atom>& universe);

/// Guards evaluated in order under the instantiation's binding.
bool guards_hold(const Instantiation& inst, const Instance& instance);

/// Declaration constraints: ONE/LONE/SOME sig multiplicities, field column
/// typing and per-owner field multiplicities.
bool satisfies_declarations(const Model& m, const Instance& inst);
/// Declarations and every fact conjunct.
bool satisfies_model(const Model& m, const Instance& inst);

class EnumerationBudgetExceeded : public std::runtime_error {
 public:
  explicit EnumerationBudgetExceeded(std::size_t count);
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

/// Number of ground relation variables at `scope` (ONE-sig memberships are
/// constants and are not counted).
std::size_t relation_variable_count(const Model& m, int scope);

/// Brute-force enumeration of every instance at `scope` that satisfies the
/// declarations, the facts, and `filter` when given. Enumeration order is
/// lexicographic over relation variables (sigs, then fields, each tuple
/// false before true). Throws EnumerationBudgetExceeded above `budget`
/// relation variables.
std::vector<Instance> enumerate_instances(const Model& m, int scope, const Formula* filter,
                                          std::size_t budget = 24);

}  // namespace relloc
