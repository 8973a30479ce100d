#include "relloc/model.hpp"

#include <sstream>
#include <tuple>

namespace relloc {

// ---------------------------------------------------------------------------
// SourceSpan

bool SourceSpan::contains(const SourceSpan& in) const {
  auto le = [](int l1, int c1, int l2, int c2) { return l1 < l2 || (l1 == l2 && c1 <= c2); };
  return le(start_line, start_col, in.start_line, in.start_col) &&
         le(in.end_line, in.end_col, end_line, end_col);
}

bool SourceSpan::before(const SourceSpan& o) const {
  // Earlier start first; on equal starts the enclosing (longer) span first.
  return std::tie(start_line, start_col, o.end_line, o.end_col) <
         std::tie(o.start_line, o.start_col, end_line, end_col);
}

std::string SourceSpan::str() const {
  std::ostringstream os;
  if (!file.empty()) os << file << ':';
  os << start_line << ':' << start_col << '-' << end_line << ':' << end_col;
  return os.str();
}

SourceSpan SourceSpan::merge(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  s.end_line = b.end_line;
  s.end_col = b.end_col;
  return s;
}

const char* to_string(Multiplicity m) {
  switch (m) {
    case Multiplicity::One: return "one";
    case Multiplicity::Lone: return "lone";
    case Multiplicity::Some: return "some";
    case Multiplicity::Set: return "set";
  }
  return "set";
}

bool RelExpr::is_binary() const {
  switch (kind) {
    case RelKind::Union:
    case RelKind::Difference:
    case RelKind::Intersect:
    case RelKind::Join:
    case RelKind::Product: return true;
    default: return false;
  }
}

bool RelExpr::is_unary_op() const {
  return kind == RelKind::Transpose || kind == RelKind::Closure ||
         kind == RelKind::ReflexiveClosure;
}

bool Formula::is_comparison() const {
  return kind == FormulaKind::Subset || kind == FormulaKind::NotSubset ||
         kind == FormulaKind::Equal || kind == FormulaKind::NotEqual;
}

bool Formula::is_connective() const {
  return kind == FormulaKind::And || kind == FormulaKind::Or ||
         kind == FormulaKind::Implies || kind == FormulaKind::Iff;
}

// ---------------------------------------------------------------------------
// Model / Instance

const SigDecl* Model::find_sig(const std::string& name) const {
  for (const auto& s : sigs)
    if (s.name == name) return &s;
  return nullptr;
}

const FieldDecl* Model::find_field(const std::string& name) const {
  for (const auto& s : sigs)
    for (const auto& f : s.fields)
      if (f.name == name) return &f;
  return nullptr;
}

std::vector<const FieldDecl*> Model::fields() const {
  std::vector<const FieldDecl*> out;
  for (const auto& s : sigs)
    for (const auto& f : s.fields) out.push_back(&f);
  return out;
}

std::vector<Atom> universe_for_scope(const Model& m, int scope) {
  std::vector<Atom> out;
  for (const auto& s : m.sigs) {
    const int n = s.mult == Multiplicity::One ? 1 : scope;
    for (int i = 0; i < n; ++i) out.push_back({s.name + std::to_string(i), s.name});
  }
  return out;
}

std::optional<AtomId> Instance::find_atom(const std::string& name) const {
  for (std::size_t i = 0; i < universe.size(); ++i)
    if (universe[i].name == name) return static_cast<AtomId>(i);
  return std::nullopt;
}

const TupleSet& Instance::relation(const std::string& name) const {
  if (auto it = sigs.find(name); it != sigs.end()) return it->second;
  if (auto it = fields.find(name); it != fields.end()) return it->second;
  throw std::out_of_range("unknown relation '" + name + "'");
}

bool Instance::operator<(const Instance& o) const {
  if (sigs != o.sigs) return sigs < o.sigs;
  return fields < o.fields;
}

Instance empty_instance(const Model& m, std::vector<Atom> universe) {
  Instance inst;
  inst.universe = std::move(universe);
  const int w = inst.width();
  for (const auto& s : m.sigs) {
    inst.sigs.emplace(s.name, TupleSet(1, w));
    for (const auto& f : s.fields) inst.fields.emplace(f.name, TupleSet(2, w));
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Static helpers

int arity_of(const RelExpr& e) {
  switch (e.kind) {
    case RelKind::Name:
      if (e.ref == NameKind::Unresolved)
        throw ResolutionError("unresolved name '" + e.name + "'", e.span);
      return e.ref == NameKind::Sig ? 1 : 2;
    case RelKind::Var:
    case RelKind::None:
    case RelKind::Univ: return 1;
    case RelKind::Iden: return 2;
    case RelKind::Union:
    case RelKind::Difference:
    case RelKind::Intersect: {
      const int l = arity_of(*e.lhs);
      const int r = arity_of(*e.rhs);
      if (l != r)
        throw ResolutionError("arity mismatch: " + std::to_string(l) + " vs " +
                                  std::to_string(r),
                              e.span);
      return l;
    }
    case RelKind::Join: {
      const int l = arity_of(*e.lhs);
      const int r = arity_of(*e.rhs);
      if (l + r < 3) throw ResolutionError("join of two unary expressions", e.span);
      return l + r - 2;
    }
    case RelKind::Product: return arity_of(*e.lhs) + arity_of(*e.rhs);
    case RelKind::Transpose:
    case RelKind::Closure:
    case RelKind::ReflexiveClosure:
      if (arity_of(*e.lhs) != 2)
        throw ResolutionError("operator requires a binary relation", e.span);
      return 2;
  }
  return 1;
}

namespace {

void collect_free(const RelExpr& e, std::set<std::string>& out) {
  if (e.kind == RelKind::Var) out.insert(e.name);
  if (e.lhs) collect_free(*e.lhs, out);
  if (e.rhs) collect_free(*e.rhs, out);
}

void collect_free(const Formula& f, std::set<std::string>& out) {
  if (f.left) collect_free(*f.left, out);
  if (f.right) collect_free(*f.right, out);
  if (f.kind == FormulaKind::Quant) {
    collect_free(*f.var.bound, out);
    std::set<std::string> body;
    collect_free(*f.sub, body);
    body.erase(f.var.name);
    out.insert(body.begin(), body.end());
    return;
  }
  if (f.sub) collect_free(*f.sub, out);
  if (f.sub2) collect_free(*f.sub2, out);
}

void collect_leaves(const Formula& f, std::vector<const RelExpr*>& out) {
  if (f.left) out.push_back(f.left.get());
  if (f.right) out.push_back(f.right.get());
  if (f.kind == FormulaKind::Quant) out.push_back(f.var.bound.get());
  if (f.sub) collect_leaves(*f.sub, out);
  if (f.sub2) collect_leaves(*f.sub2, out);
}

void collect_refs(const RelExpr& e, std::set<std::string>& out) {
  if (e.kind == RelKind::Name) out.insert(e.name);
  if (e.lhs) collect_refs(*e.lhs, out);
  if (e.rhs) collect_refs(*e.rhs, out);
}

}  // namespace

std::set<std::string> free_vars(const RelExpr& e) {
  std::set<std::string> out;
  collect_free(e, out);
  return out;
}

std::set<std::string> free_vars(const Formula& f) {
  std::set<std::string> out;
  collect_free(f, out);
  return out;
}

std::vector<const RelExpr*> leaf_rel_subexprs(const Formula& f) {
  std::vector<const RelExpr*> out;
  collect_leaves(f, out);
  return out;
}

std::vector<const RelExpr*> leaf_rel_subexprs(const RelExpr& e) { return {&e}; }

std::set<std::string> relation_refs(const Formula& f) {
  std::set<std::string> out;
  for (const RelExpr* leaf : leaf_rel_subexprs(f)) collect_refs(*leaf, out);
  return out;
}

std::vector<std::set<std::string>> column_sigs(
    const RelExpr& e, const Model& m,
    const std::map<std::string, std::set<std::string>>& var_sigs) {
  auto all = [&] {
    std::set<std::string> s;
    for (const auto& sig : m.sigs) s.insert(sig.name);
    return s;
  };
  auto rec = [&](const RelExpr& x) { return column_sigs(x, m, var_sigs); };
  switch (e.kind) {
    case RelKind::Name:
      if (e.ref == NameKind::Sig) return {{e.name}};
      if (const FieldDecl* f = m.find_field(e.name)) return {{f->owner}, {f->target}};
      return {{}, {}};
    case RelKind::Var: {
      auto it = var_sigs.find(e.name);
      return {it == var_sigs.end() ? std::set<std::string>{} : it->second};
    }
    case RelKind::None: return {{}};
    case RelKind::Univ: return {all()};
    case RelKind::Iden: return {all(), all()};
    case RelKind::Union: {
      auto l = rec(*e.lhs);
      auto r = rec(*e.rhs);
      for (std::size_t i = 0; i < l.size() && i < r.size(); ++i) l[i].insert(r[i].begin(), r[i].end());
      return l;
    }
    case RelKind::Intersect: {
      auto l = rec(*e.lhs);
      auto r = rec(*e.rhs);
      for (std::size_t i = 0; i < l.size() && i < r.size(); ++i) {
        std::set<std::string> keep;
        for (const auto& s : l[i])
          if (r[i].count(s)) keep.insert(s);
        l[i] = std::move(keep);
      }
      return l;
    }
    case RelKind::Difference: return rec(*e.lhs);
    case RelKind::Join: {
      auto l = rec(*e.lhs);
      auto r = rec(*e.rhs);
      l.pop_back();
      l.insert(l.end(), r.begin() + 1, r.end());
      return l;
    }
    case RelKind::Product: {
      auto l = rec(*e.lhs);
      auto r = rec(*e.rhs);
      l.insert(l.end(), r.begin(), r.end());
      return l;
    }
    case RelKind::Transpose: {
      auto l = rec(*e.lhs);
      std::swap(l[0], l[1]);
      return l;
    }
    case RelKind::Closure: return rec(*e.lhs);
    case RelKind::ReflexiveClosure: return {all(), all()};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int rel_level(const RelExpr& e) {
  switch (e.kind) {
    case RelKind::Transpose:
    case RelKind::Closure:
    case RelKind::ReflexiveClosure: return 1;
    case RelKind::Join: return 2;
    case RelKind::Product: return 3;
    case RelKind::Intersect: return 4;
    case RelKind::Union:
    case RelKind::Difference: return 5;
    default: return 0;
  }
}

void print_rel(const RelExpr& e, std::ostream& os);

void print_rel_at(const RelExpr& e, int max_level, std::ostream& os) {
  if (rel_level(e) > max_level) {
    os << '(';
    print_rel(e, os);
    os << ')';
  } else {
    print_rel(e, os);
  }
}

void print_rel(const RelExpr& e, std::ostream& os) {
  switch (e.kind) {
    case RelKind::Name:
    case RelKind::Var: os << e.name; return;
    case RelKind::None: os << "none"; return;
    case RelKind::Univ: os << "univ"; return;
    case RelKind::Iden: os << "iden"; return;
    case RelKind::Transpose:
    case RelKind::Closure:
    case RelKind::ReflexiveClosure:
      os << (e.kind == RelKind::Transpose ? "~" : e.kind == RelKind::Closure ? "^" : "*");
      print_rel_at(*e.lhs, 1, os);
      return;
    default: break;
  }
  const int lvl = rel_level(e);
  const char* op = "";
  switch (e.kind) {
    case RelKind::Join: op = "."; break;
    case RelKind::Product: op = " -> "; break;
    case RelKind::Intersect: op = " & "; break;
    case RelKind::Union: op = " + "; break;
    case RelKind::Difference: op = " - "; break;
    default: break;
  }
  print_rel_at(*e.lhs, lvl, os);
  os << op;
  print_rel_at(*e.rhs, lvl - 1, os);
}

int formula_level(const Formula& f) {
  switch (f.kind) {
    case FormulaKind::Not: return 1;
    case FormulaKind::And: return 2;
    case FormulaKind::Or: return 3;
    case FormulaKind::Implies: return 4;
    case FormulaKind::Iff: return 5;
    case FormulaKind::Quant: return 6;
    default: return 0;
  }
}

void print_formula(const Formula& f, std::ostream& os);

void print_formula_at(const Formula& f, int max_level, std::ostream& os) {
  // Quantifiers extend to the right, so they are always grouped as operands.
  if (formula_level(f) > max_level || f.kind == FormulaKind::Quant) {
    os << '(';
    print_formula(f, os);
    os << ')';
  } else {
    print_formula(f, os);
  }
}

const char* quant_text(Quantifier q) {
  switch (q) {
    case Quantifier::All: return "all";
    case Quantifier::Some: return "some";
    case Quantifier::No: return "no";
  }
  return "all";
}

const char* mult_text(MultTest m) {
  switch (m) {
    case MultTest::No: return "no";
    case MultTest::Some: return "some";
    case MultTest::Lone: return "lone";
    case MultTest::One: return "one";
  }
  return "some";
}

void print_formula(const Formula& f, std::ostream& os) {
  switch (f.kind) {
    case FormulaKind::Subset:
    case FormulaKind::NotSubset:
    case FormulaKind::Equal:
    case FormulaKind::NotEqual: {
      const char* op = f.kind == FormulaKind::Subset      ? " in "
                       : f.kind == FormulaKind::NotSubset ? " !in "
                       : f.kind == FormulaKind::Equal     ? " = "
                                                          : " != ";
      print_rel(*f.left, os);
      os << op;
      print_rel(*f.right, os);
      return;
    }
    case FormulaKind::Mult:
      os << mult_text(f.mult) << ' ';
      print_rel(*f.left, os);
      return;
    case FormulaKind::Quant: {
      os << quant_text(f.quant) << ' ' << f.var.name;
      const Formula* body = f.sub.get();
      while (body->kind == FormulaKind::Quant && body->continues) {
        os << ", " << body->var.name;
        body = body->sub.get();
      }
      os << ": ";
      print_rel(*f.var.bound, os);
      os << " | ";
      print_formula(*body, os);
      return;
    }
    case FormulaKind::Not:
      os << '!';
      print_formula_at(*f.sub, 1, os);
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Iff: {
      const int lvl = formula_level(f);
      print_formula_at(*f.sub, lvl, os);
      os << ' ' << connective_text(f.kind) << ' ';
      print_formula_at(*f.sub2, lvl - 1, os);
      return;
    }
    case FormulaKind::Implies:
      print_formula_at(*f.sub, 3, os);
      os << " => ";
      print_formula_at(*f.sub2, 4, os);
      return;
  }
}

}  // namespace

const char* connective_text(FormulaKind k) {
  switch (k) {
    case FormulaKind::And: return "&&";
    case FormulaKind::Or: return "||";
    case FormulaKind::Implies: return "=>";
    case FormulaKind::Iff: return "<=>";
    case FormulaKind::Not: return "!";
    default: return "";
  }
}

std::string to_string(const RelExpr& e) {
  std::ostringstream os;
  print_rel(e, os);
  return os.str();
}

std::string to_string(const Formula& f) {
  std::ostringstream os;
  print_formula(f, os);
  return os.str();
}

bool same_structure(const RelExpr& a, const RelExpr& b) {
  if (a.kind != b.kind) return false;
  if ((a.kind == RelKind::Name || a.kind == RelKind::Var) && a.name != b.name) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !same_structure(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !same_structure(*a.rhs, *b.rhs)) return false;
  return true;
}

bool same_structure(const Formula& a, const Formula& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case FormulaKind::Mult:
      return a.mult == b.mult && same_structure(*a.left, *b.left);
    case FormulaKind::Quant:
      return a.quant == b.quant && a.continues == b.continues && a.var.name == b.var.name &&
             same_structure(*a.var.bound, *b.var.bound) && same_structure(*a.sub, *b.sub);
    case FormulaKind::Not: return same_structure(*a.sub, *b.sub);
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
    case FormulaKind::Iff:
      return same_structure(*a.sub, *b.sub) && same_structure(*a.sub2, *b.sub2);
    default:
      return same_structure(*a.left, *b.left) && same_structure(*a.right, *b.right);
  }
}

std::vector<const Formula*> formula_children(const Formula& f) {
  std::vector<const Formula*> out;
  if (f.sub) out.push_back(f.sub.get());
  if (f.sub2) out.push_back(f.sub2.get());
  return out;
}

}  // namespace relloc
