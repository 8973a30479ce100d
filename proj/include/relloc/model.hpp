#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "relloc/tuple_set.hpp"

namespace relloc {

/// Source location of a node. Lines and columns are 1-based; the end
/// position is the last character covered (inclusive).
struct SourceSpan {
  std::string file;
  int start_line = 1;
  int start_col = 1;
  int end_line = 1;
  int end_col = 1;

  bool contains(const SourceSpan& inner) const;
  bool before(const SourceSpan& o) const;
  std::string str() const;
  static SourceSpan merge(const SourceSpan& a, const SourceSpan& b);
};

enum class Multiplicity { One, Lone, Some, Set };
const char* to_string(Multiplicity m);

// ---------------------------------------------------------------------------
// Relational expressions

enum class RelKind {
  Name,  // sig or field reference
  Var,   // quantifier variable
  None,
  Univ,
  Iden,
  Union,
  Difference,
  Intersect,
  Join,
  Product,
  Transpose,
  Closure,           // ^e
  ReflexiveClosure,  // *e
};

enum class NameKind { Unresolved, Sig, Field };

struct RelExpr;
using RelPtr = std::shared_ptr<const RelExpr>;

struct RelExpr {
  RelKind kind = RelKind::None;
  std::string name;  // Name / Var
  NameKind ref = NameKind::Unresolved;
  RelPtr lhs;  // unary operand, or left operand
  RelPtr rhs;
  int arity = 0;  // 0 until resolved
  SourceSpan span;

  bool is_binary() const;
  bool is_unary_op() const;
};

// ---------------------------------------------------------------------------
// Formulas

enum class FormulaKind {
  Subset,
  NotSubset,
  Equal,
  NotEqual,
  Mult,
  Quant,
  Not,
  And,
  Or,
  Implies,
  Iff,
};

enum class MultTest { No, Some, Lone, One };
enum class Quantifier { All, Some, No };

struct Formula;
using FormPtr = std::shared_ptr<const Formula>;

struct QuantVar {
  std::string name;
  RelPtr bound;
  /// Signatures whose atoms the variable can range over (filled by resolve).
  std::set<std::string> sigs;
};

/// Multi-variable quantifiers are stored as nested single-variable ones.
/// `continues` marks an inner quantifier that came from the same
/// declaration list as its parent, so printing regroups them.
struct Formula {
  FormulaKind kind = FormulaKind::And;
  RelPtr left;  // comparisons and Mult
  RelPtr right;
  MultTest mult = MultTest::Some;
  Quantifier quant = Quantifier::All;
  QuantVar var;
  bool continues = false;
  FormPtr sub;  // Not operand, Quant body, binary left
  FormPtr sub2;
  SourceSpan span;

  bool is_comparison() const;
  bool is_connective() const;  // And / Or / Implies / Iff
};

/// One top-level formula of a fact or predicate block.
struct Conjunct {
  std::string owner;
  int index = 0;
  FormPtr formula;
  SourceSpan span;
};

struct FieldDecl {
  std::string name;
  std::string owner;
  std::string target;
  Multiplicity mult = Multiplicity::Set;
  SourceSpan span;
};

struct SigDecl {
  std::string name;
  Multiplicity mult = Multiplicity::Set;
  std::vector<FieldDecl> fields;
  SourceSpan span;
};

enum class CommandKind { Check, Run };

struct Command {
  CommandKind kind = CommandKind::Check;
  std::string target;
  int scope = 3;
  bool explicit_scope = false;
  SourceSpan span;
};

struct Assertion {
  std::string name;
  FormPtr body;
  SourceSpan span;
};

struct Model {
  std::string file;
  std::vector<SigDecl> sigs;
  std::vector<Conjunct> facts;
  std::map<std::string, std::vector<Conjunct>> preds;
  std::map<std::string, Assertion> asserts;
  std::vector<Command> commands;

  const SigDecl* find_sig(const std::string& name) const;
  const FieldDecl* find_field(const std::string& name) const;
  std::vector<const FieldDecl*> fields() const;
};

// ---------------------------------------------------------------------------
// Instances

struct Atom {
  std::string name;
  std::string sig;
  bool operator==(const Atom&) const = default;
};

/// The atom pool for a scope: non-ONE sigs get `scope` atoms, ONE sigs get 1.
/// Atoms appear in sig declaration order, named SigName0, SigName1, ...
std::vector<Atom> universe_for_scope(const Model& m, int scope);

struct Instance {
  std::vector<Atom> universe;
  std::map<std::string, TupleSet> sigs;    // unary
  std::map<std::string, TupleSet> fields;  // binary

  int width() const { return static_cast<int>(universe.size()); }
  std::optional<AtomId> find_atom(const std::string& name) const;
  /// Contents of a sig or field; throws std::out_of_range for unknown names.
  const TupleSet& relation(const std::string& name) const;
  bool operator==(const Instance& o) const {
    return universe == o.universe && sigs == o.sigs && fields == o.fields;
  }
  bool operator<(const Instance& o) const;
};

/// An empty instance (all relations empty) over the given universe.
Instance empty_instance(const Model& m, std::vector<Atom> universe);

// ---------------------------------------------------------------------------
// Static helpers

class ResolutionError : public std::runtime_error {
 public:
  ResolutionError(const std::string& msg, SourceSpan span)
      : std::runtime_error(msg), span_(std::move(span)) {}
  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

/// Arity of a name-resolved expression; throws ResolutionError when the
/// composition is ill-typed.
int arity_of(const RelExpr& e);

std::set<std::string> free_vars(const RelExpr& e);
std::set<std::string> free_vars(const Formula& f);

/// Relational operands of comparisons, multiplicity tests and quantifier
/// bounds, collected left to right through the boolean structure.
std::vector<const RelExpr*> leaf_rel_subexprs(const Formula& f);
std::vector<const RelExpr*> leaf_rel_subexprs(const RelExpr& e);

/// Names of every sig and field mentioned anywhere in the formula.
std::set<std::string> relation_refs(const Formula& f);

/// Per-column signature sets of a resolved expression. `var_sigs` gives the
/// sigs of enclosing quantifier variables.
std::vector<std::set<std::string>> column_sigs(
    const RelExpr& e, const Model& m,
    const std::map<std::string, std::set<std::string>>& var_sigs);

std::string to_string(const RelExpr& e);
std::string to_string(const Formula& f);
const char* connective_text(FormulaKind k);

/// Structural equality ignoring spans (and resolution annotations).
bool same_structure(const RelExpr& a, const RelExpr& b);
bool same_structure(const Formula& a, const Formula& b);

/// Direct boolean children of a formula node (quantifier body, operands).
std::vector<const Formula*> formula_children(const Formula& f);

}  // namespace relloc
