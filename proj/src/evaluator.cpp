#include "relloc/evaluator.hpp"

#include <cassert>

namespace relloc {

TupleSet eval_rel(const RelExpr& e, const Instance& inst, const Binding& b) {
  const int w = inst.width();
  switch (e.kind) {
    case RelKind::Name: return inst.relation(e.name);
    case RelKind::Var: {
      auto it = b.find(e.name);
      if (it == b.end()) throw std::logic_error("unbound variable '" + e.name + "'");
      TupleSet s(1, w);
      s.insert({it->second});
      return s;
    }
    case RelKind::None: return TupleSet(1, w);
    case RelKind::Univ: {
      TupleSet s(1, w);
      for (AtomId a = 0; a < w; ++a) s.insert_key(static_cast<TupleSet::Key>(a));
      return s;
    }
    case RelKind::Iden: {
      TupleSet s(2, w);
      for (AtomId a = 0; a < w; ++a) s.insert({a, a});
      return s;
    }
    case RelKind::Union: return eval_rel(*e.lhs, inst, b).united(eval_rel(*e.rhs, inst, b));
    case RelKind::Difference: return eval_rel(*e.lhs, inst, b).minus(eval_rel(*e.rhs, inst, b));
    case RelKind::Intersect:
      return eval_rel(*e.lhs, inst, b).intersected(eval_rel(*e.rhs, inst, b));
    case RelKind::Join: return eval_rel(*e.lhs, inst, b).joined(eval_rel(*e.rhs, inst, b));
    case RelKind::Product: return eval_rel(*e.lhs, inst, b).product(eval_rel(*e.rhs, inst, b));
    case RelKind::Transpose: return eval_rel(*e.lhs, inst, b).transposed();
    case RelKind::Closure: return eval_rel(*e.lhs, inst, b).closure();
    case RelKind::ReflexiveClosure: {
      TupleSet s = eval_rel(*e.lhs, inst, b).closure();
      for (AtomId a = 0; a < w; ++a) s.insert({a, a});
      return s;
    }
  }
  return TupleSet(1, w);
}

bool eval_formula(const Formula& f, const Instance& inst, const Binding& b) {
  switch (f.kind) {
    case FormulaKind::Subset:
      return eval_rel(*f.left, inst, b).subset_of(eval_rel(*f.right, inst, b));
    case FormulaKind::NotSubset:
      return !eval_rel(*f.left, inst, b).subset_of(eval_rel(*f.right, inst, b));
    case FormulaKind::Equal: return eval_rel(*f.left, inst, b) == eval_rel(*f.right, inst, b);
    case FormulaKind::NotEqual: return !(eval_rel(*f.left, inst, b) == eval_rel(*f.right, inst, b));
    case FormulaKind::Mult: {
      const std::size_t n = eval_rel(*f.left, inst, b).size();
      switch (f.mult) {
        case MultTest::No: return n == 0;
        case MultTest::Some: return n > 0;
        case MultTest::Lone: return n <= 1;
        case MultTest::One: return n == 1;
      }
      return false;
    }
    case FormulaKind::Quant: {
      const TupleSet bound = eval_rel(*f.var.bound, inst, b);
      Binding ext = b;
      bool any = false;
      for (auto k : bound.keys()) {
        ext[f.var.name] = static_cast<AtomId>(k);
        const bool v = eval_formula(*f.sub, inst, ext);
        if (f.quant == Quantifier::All && !v) return false;
        if (v) any = true;
        if (any && f.quant != Quantifier::All) break;
      }
      if (f.quant == Quantifier::All) return true;
      return f.quant == Quantifier::Some ? any : !any;
    }
    case FormulaKind::Not: return !eval_formula(*f.sub, inst, b);
    case FormulaKind::And: return eval_formula(*f.sub, inst, b) && eval_formula(*f.sub2, inst, b);
    case FormulaKind::Or: return eval_formula(*f.sub, inst, b) || eval_formula(*f.sub2, inst, b);
    case FormulaKind::Implies:
      return !eval_formula(*f.sub, inst, b) || eval_formula(*f.sub2, inst, b);
    case FormulaKind::Iff: return eval_formula(*f.sub, inst, b) == eval_formula(*f.sub2, inst, b);
  }
  return false;
}

namespace {

void add_atoms(const TupleSet& s, std::set<AtomId>& out) {
  const auto atoms = s.atoms();
  out.insert(atoms.begin(), atoms.end());
}

void collect_involved(const Formula& f, const Instance& inst, const Binding& b,
                      std::set<AtomId>& out) {
  if (f.left) add_atoms(eval_rel(*f.left, inst, b), out);
  if (f.right) add_atoms(eval_rel(*f.right, inst, b), out);
  if (f.kind == FormulaKind::Quant) {
    const TupleSet bound = eval_rel(*f.var.bound, inst, b);
    add_atoms(bound, out);
    Binding ext = b;
    for (auto k : bound.keys()) {
      ext[f.var.name] = static_cast<AtomId>(k);
      collect_involved(*f.sub, inst, ext, out);
    }
    return;
  }
  if (f.sub) collect_involved(*f.sub, inst, b, out);
  if (f.sub2) collect_involved(*f.sub2, inst, b, out);
}

template <typename Node>
void add_free_var_atoms(const Node& n, const Binding& b, std::set<AtomId>& out) {
  for (const auto& v : free_vars(n)) {
    auto it = b.find(v);
    if (it == b.end()) throw std::logic_error("unbound variable '" + v + "'");
    out.insert(it->second);
  }
}

}  // namespace

std::set<AtomId> involved_atoms(const Formula& f, const Instance& inst, const Binding& b) {
  std::set<AtomId> out;
  add_free_var_atoms(f, b, out);
  collect_involved(f, inst, b, out);
  return out;
}

std::set<AtomId> involved_atoms(const RelExpr& e, const Instance& inst, const Binding& b) {
  std::set<AtomId> out;
  add_free_var_atoms(e, b, out);
  add_atoms(eval_rel(e, inst, b), out);
  return out;
}

std::vector<const Formula*> outer_quantifiers(const Formula& f) {
  std::vector<const Formula*> out;
  const Formula* cur = &f;
  while (cur->kind == FormulaKind::Quant) {
    out.push_back(cur);
    cur = cur->sub.get();
  }
  return out;
}

std::optional<Instantiation> guarded_instantiate(const Conjunct& c,
                                                 std::span<const AtomId> atoms,
                                                 const std::vector<Atom>& universe) {
  const auto chain = outer_quantifiers(*c.formula);
  if (chain.size() != atoms.size()) return std::nullopt;
  Instantiation out;
  out.body = c.formula;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Formula& q = *chain[i];
    const AtomId a = atoms[i];
    if (a < 0 || a >= static_cast<AtomId>(universe.size())) return std::nullopt;
    if (!q.var.sigs.count(universe[a].sig)) return std::nullopt;
    out.binding[q.var.name] = a;
    out.guards.push_back({q.var.name, q.var.bound});
    out.quantifiers.push_back(q.quant);
    out.body = q.sub;
  }
  return out;
}

bool guards_hold(const Instantiation& in, const Instance& instance) {
  Binding partial;
  for (const auto& g : in.guards) {
    const AtomId a = in.binding.at(g.var);
    if (!eval_rel(*g.bound, instance, partial).contains({a})) return false;
    partial[g.var] = a;
  }
  return true;
}

bool satisfies_declarations(const Model& m, const Instance& inst) {
  for (const auto& s : m.sigs) {
    auto it = inst.sigs.find(s.name);
    if (it == inst.sigs.end()) return false;
    const TupleSet& members = it->second;
    for (auto k : members.keys())
      if (inst.universe[static_cast<std::size_t>(k)].sig != s.name) return false;
    const std::size_t n = members.size();
    if (s.mult == Multiplicity::One && n != 1) return false;
    if (s.mult == Multiplicity::Lone && n > 1) return false;
    if (s.mult == Multiplicity::Some && n < 1) return false;
  }
  for (const FieldDecl* f : m.fields()) {
    auto it = inst.fields.find(f->name);
    if (it == inst.fields.end()) return false;
    const TupleSet& owners = inst.sigs.at(f->owner);
    const TupleSet& targets = inst.sigs.at(f->target);
    std::map<AtomId, int> per_owner;
    for (const Tuple& t : it->second.tuples()) {
      if (!owners.contains({t[0]}) || !targets.contains({t[1]})) return false;
      ++per_owner[t[0]];
    }
    for (auto k : owners.keys()) {
      const int n = per_owner[static_cast<AtomId>(k)];
      if (f->mult == Multiplicity::One && n != 1) return false;
      if (f->mult == Multiplicity::Lone && n > 1) return false;
      if (f->mult == Multiplicity::Some && n < 1) return false;
    }
  }
  return true;
}

bool satisfies_model(const Model& m, const Instance& inst) {
  if (!satisfies_declarations(m, inst)) return false;
  for (const auto& c : m.facts)
    if (!eval_formula(*c.formula, inst, {})) return false;
  return true;
}

EnumerationBudgetExceeded::EnumerationBudgetExceeded(std::size_t count)
    : std::runtime_error("enumeration refused: " + std::to_string(count) +
                         " relation variables exceed the budget"),
      count_(count) {}

std::size_t relation_variable_count(const Model& m, int scope) {
  std::size_t n = 0;
  auto pool = [&](const std::string& sig) {
    return m.find_sig(sig)->mult == Multiplicity::One ? 1u : static_cast<std::size_t>(scope);
  };
  for (const auto& s : m.sigs)
    if (s.mult != Multiplicity::One) n += static_cast<std::size_t>(scope);
  for (const FieldDecl* f : m.fields()) n += pool(f->owner) * pool(f->target);
  return n;
}

std::vector<Instance> enumerate_instances(const Model& m, int scope, const Formula* filter,
                                          std::size_t budget) {
  const std::size_t total = relation_variable_count(m, scope);
  if (total > budget) throw EnumerationBudgetExceeded(total);

  const Instance blank = empty_instance(m, universe_for_scope(m, scope));
  const int w = blank.width();
  std::map<std::string, std::vector<AtomId>> pools;
  for (AtomId a = 0; a < w; ++a) pools[blank.universe[a].sig].push_back(a);

  // Membership variables in order; ONE sigs are fixed.
  struct SigVar {
    std::string sig;
    AtomId atom;
  };
  std::vector<SigVar> sig_vars;
  Instance base = blank;
  for (const auto& s : m.sigs) {
    for (AtomId a : pools[s.name]) {
      if (s.mult == Multiplicity::One)
        base.sigs[s.name].insert({a});
      else
        sig_vars.push_back({s.name, a});
    }
  }

  std::vector<Instance> out;
  auto check = [&](const Instance& inst) {
    if (!satisfies_model(m, inst)) return;
    if (filter && !eval_formula(*filter, inst, {})) return;
    out.push_back(inst);
  };

  // The first variable is the most significant, false before true.
  const std::size_t nsig = sig_vars.size();
  for (std::uint64_t sbits = 0; sbits < (std::uint64_t{1} << nsig); ++sbits) {
    Instance inst = base;
    for (std::size_t i = 0; i < nsig; ++i)
      if (sbits >> (nsig - 1 - i) & 1) inst.sigs[sig_vars[i].sig].insert({sig_vars[i].atom});

    // Field tuples whose columns are absent are forced false.
    struct FieldVar {
      std::string field;
      Tuple t;
    };
    std::vector<FieldVar> fvars;
    for (const FieldDecl* f : m.fields()) {
      for (AtomId a : pools[f->owner]) {
        for (AtomId b : pools[f->target]) {
          if (inst.sigs[f->owner].contains({a}) && inst.sigs[f->target].contains({b}))
            fvars.push_back({f->name, {a, b}});
        }
      }
    }
    const std::size_t nf = fvars.size();
    for (std::uint64_t fbits = 0; fbits < (std::uint64_t{1} << nf); ++fbits) {
      Instance full = inst;
      for (std::size_t i = 0; i < nf; ++i)
        if (fbits >> (nf - 1 - i) & 1) full.fields[fvars[i].field].insert(fvars[i].t);
      check(full);
    }
  }
  return out;
}

}  // namespace relloc
