#include "relloc/grounder.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <ostream>

namespace relloc {

using Bit = Circuit::Bit;
using Key = std::uint64_t;

const char* to_string(GroupKind k) {
  switch (k) {
    case GroupKind::Declaration: return "declaration";
    case GroupKind::Fact: return "fact";
    case GroupKind::Property: return "property";
    case GroupKind::Predicate: return "predicate";
  }
  return "fact";
}

Bounds build_bounds(const Model& m, int scope) {
  Bounds b;
  b.universe = universe_for_scope(m, scope);
  for (const auto& s : m.sigs) {
    b.sig_names.push_back(s.name);
    b.sig_pools[s.name];
    if (s.mult == Multiplicity::One) b.fixed_sigs.insert(s.name);
  }
  for (const FieldDecl* f : m.fields()) b.field_names.push_back(f->name);
  for (AtomId a = 0; a < b.width(); ++a) b.sig_pools[b.universe[a].sig].push_back(a);
  return b;
}

int VarMap::add(const std::string& relation, const Tuple& t) {
  auto [it, fresh] = ids_.try_emplace({relation, t}, 0);
  if (fresh) {
    entries_.push_back({relation, t});
    it->second = static_cast<int>(entries_.size());
  }
  return it->second;
}

std::optional<int> VarMap::find(const std::string& relation, const Tuple& t) const {
  auto it = ids_.find({relation, t});
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

VarMap build_var_map(const Model& m, const Bounds& b) {
  VarMap vars;
  for (const auto& s : m.sigs) {
    if (b.fixed_sigs.count(s.name)) continue;
    for (AtomId a : b.sig_pools.at(s.name)) vars.add(s.name, {a});
  }
  for (const FieldDecl* f : m.fields())
    for (AtomId a : b.sig_pools.at(f->owner))
      for (AtomId t : b.sig_pools.at(f->target)) vars.add(f->name, {a, t});
  return vars;
}

// ---------------------------------------------------------------------------
// Translator

Translator::Translator(const Model& m, const Bounds& bounds, const VarMap& vars, Circuit& circuit)
    : m_(m), bounds_(bounds), vars_(vars), c_(circuit) {}

BooleanMatrix Translator::relation_matrix(const std::string& name) {
  const int w = bounds_.width();
  if (m_.find_sig(name)) {
    BooleanMatrix out{1, w, {}};
    const bool fixed = bounds_.fixed_sigs.count(name) > 0;
    for (AtomId a : bounds_.sig_pools.at(name))
      out.cells[static_cast<Key>(a)] = fixed ? Circuit::kTrue : c_.input(*vars_.find(name, {a}));
    return out;
  }
  const FieldDecl* f = m_.find_field(name);
  assert(f);
  BooleanMatrix out{2, w, {}};
  for (AtomId a : bounds_.sig_pools.at(f->owner))
    for (AtomId t : bounds_.sig_pools.at(f->target))
      out.cells[static_cast<Key>(a) * w + static_cast<Key>(t)] = c_.input(*vars_.find(name, {a, t}));
  return out;
}

BooleanMatrix Translator::unite(const BooleanMatrix& l, const BooleanMatrix& r) {
  BooleanMatrix out = l;
  for (const auto& [k, bit] : r.cells) {
    auto it = out.cells.find(k);
    if (it == out.cells.end())
      out.cells[k] = bit;
    else
      it->second = c_.disj(it->second, bit);
  }
  return out;
}

BooleanMatrix Translator::join(const BooleanMatrix& l, const BooleanMatrix& r) {
  const Key w = static_cast<Key>(l.width);
  Key right_rest = 1;
  for (int i = 1; i < r.arity; ++i) right_rest *= w;
  std::map<Key, std::vector<std::pair<Key, Bit>>> by_head;
  for (const auto& [k, bit] : r.cells) by_head[k / right_rest].emplace_back(k % right_rest, bit);

  std::map<Key, std::vector<Bit>> terms;
  for (const auto& [k, bit] : l.cells) {
    auto it = by_head.find(k % w);
    if (it == by_head.end()) continue;
    for (const auto& [rest, rbit] : it->second)
      terms[(k / w) * right_rest + rest].push_back(c_.conj(bit, rbit));
  }
  BooleanMatrix out{l.arity + r.arity - 2, l.width, {}};
  for (auto& [k, bits] : terms) {
    Bit b = c_.disj(std::move(bits));
    if (b != Circuit::kFalse) out.cells[k] = b;
  }
  return out;
}

BooleanMatrix Translator::closure(const BooleanMatrix& r) {
  // After i rounds of R := R + R.R, paths of length up to 2^i are covered.
  int rounds = 0;
  while ((1 << rounds) < r.width) ++rounds;
  BooleanMatrix acc = r;
  for (int i = 0; i < rounds; ++i) acc = unite(acc, join(acc, acc));
  return acc;
}

Bit Translator::subset(const BooleanMatrix& l, const BooleanMatrix& r) {
  std::vector<Bit> parts;
  for (const auto& [k, bit] : l.cells) parts.push_back(c_.implies(bit, r.at(k)));
  return c_.conj(std::move(parts));
}

Bit Translator::at_most_one(const std::vector<Bit>& bits) {
  std::vector<Bit> parts;
  for (std::size_t i = 0; i < bits.size(); ++i)
    for (std::size_t j = i + 1; j < bits.size(); ++j) parts.push_back(c_.disj(-bits[i], -bits[j]));
  return c_.conj(std::move(parts));
}

BooleanMatrix Translator::translate_rel(const RelExpr& e, const Env& env) {
  const int w = bounds_.width();
  switch (e.kind) {
    case RelKind::Name: return relation_matrix(e.name);
    case RelKind::Var: return BooleanMatrix{1, w, {{static_cast<Key>(env.at(e.name)), Circuit::kTrue}}};
    case RelKind::None: return BooleanMatrix{1, w, {}};
    case RelKind::Univ: {
      BooleanMatrix out{1, w, {}};
      for (AtomId a = 0; a < w; ++a) out.cells[static_cast<Key>(a)] = Circuit::kTrue;
      return out;
    }
    case RelKind::Iden: {
      BooleanMatrix out{2, w, {}};
      for (AtomId a = 0; a < w; ++a) out.cells[static_cast<Key>(a) * w + a] = Circuit::kTrue;
      return out;
    }
    case RelKind::Union: return unite(translate_rel(*e.lhs, env), translate_rel(*e.rhs, env));
    case RelKind::Intersect: {
      const BooleanMatrix l = translate_rel(*e.lhs, env);
      const BooleanMatrix r = translate_rel(*e.rhs, env);
      BooleanMatrix out{l.arity, w, {}};
      for (const auto& [k, bit] : l.cells) {
        const Bit b = c_.conj(bit, r.at(k));
        if (b != Circuit::kFalse) out.cells[k] = b;
      }
      return out;
    }
    case RelKind::Difference: {
      const BooleanMatrix l = translate_rel(*e.lhs, env);
      const BooleanMatrix r = translate_rel(*e.rhs, env);
      BooleanMatrix out{l.arity, w, {}};
      for (const auto& [k, bit] : l.cells) {
        const Bit b = c_.conj(bit, -r.at(k));
        if (b != Circuit::kFalse) out.cells[k] = b;
      }
      return out;
    }
    case RelKind::Join: return join(translate_rel(*e.lhs, env), translate_rel(*e.rhs, env));
    case RelKind::Product: {
      const BooleanMatrix l = translate_rel(*e.lhs, env);
      const BooleanMatrix r = translate_rel(*e.rhs, env);
      Key radix = 1;
      for (int i = 0; i < r.arity; ++i) radix *= static_cast<Key>(w);
      BooleanMatrix out{l.arity + r.arity, w, {}};
      for (const auto& [lk, lb] : l.cells)
        for (const auto& [rk, rb] : r.cells) {
          const Bit b = c_.conj(lb, rb);
          if (b != Circuit::kFalse) out.cells[lk * radix + rk] = b;
        }
      return out;
    }
    case RelKind::Transpose: {
      const BooleanMatrix l = translate_rel(*e.lhs, env);
      BooleanMatrix out{2, w, {}};
      for (const auto& [k, bit] : l.cells) out.cells[(k % w) * w + k / w] = bit;
      return out;
    }
    case RelKind::Closure: return closure(translate_rel(*e.lhs, env));
    case RelKind::ReflexiveClosure: {
      BooleanMatrix out = closure(translate_rel(*e.lhs, env));
      for (AtomId a = 0; a < w; ++a) out.cells[static_cast<Key>(a) * w + a] = Circuit::kTrue;
      return out;
    }
  }
  return BooleanMatrix{1, w, {}};
}

Bit Translator::translate_formula(const Formula& f, const Env& env) {
  switch (f.kind) {
    case FormulaKind::Subset:
    case FormulaKind::NotSubset: {
      const Bit b = subset(translate_rel(*f.left, env), translate_rel(*f.right, env));
      return f.kind == FormulaKind::Subset ? b : -b;
    }
    case FormulaKind::Equal:
    case FormulaKind::NotEqual: {
      const BooleanMatrix l = translate_rel(*f.left, env);
      const BooleanMatrix r = translate_rel(*f.right, env);
      const Bit b = c_.conj(subset(l, r), subset(r, l));
      return f.kind == FormulaKind::Equal ? b : -b;
    }
    case FormulaKind::Mult: {
      const BooleanMatrix e = translate_rel(*f.left, env);
      std::vector<Bit> bits;
      for (const auto& [k, bit] : e.cells) bits.push_back(bit);
      const Bit some = c_.disj(bits);
      switch (f.mult) {
        case MultTest::No: return -some;
        case MultTest::Some: return some;
        case MultTest::Lone: return at_most_one(bits);
        case MultTest::One: return c_.conj(some, at_most_one(bits));
      }
      return some;
    }
    case FormulaKind::Quant: {
      const BooleanMatrix bound = translate_rel(*f.var.bound, env);
      Env ext = env;
      std::vector<Bit> parts;
      for (const auto& [k, guard] : bound.cells) {
        ext[f.var.name] = static_cast<AtomId>(k);
        const Bit body = translate_formula(*f.sub, ext);
        parts.push_back(f.quant == Quantifier::All ? c_.implies(guard, body)
                                                   : c_.conj(guard, body));
      }
      if (f.quant == Quantifier::All) return c_.conj(std::move(parts));
      const Bit some = c_.disj(std::move(parts));
      return f.quant == Quantifier::Some ? some : -some;
    }
    case FormulaKind::Not: return -translate_formula(*f.sub, env);
    case FormulaKind::And:
      return c_.conj(translate_formula(*f.sub, env), translate_formula(*f.sub2, env));
    case FormulaKind::Or:
      return c_.disj(translate_formula(*f.sub, env), translate_formula(*f.sub2, env));
    case FormulaKind::Implies:
      return c_.implies(translate_formula(*f.sub, env), translate_formula(*f.sub2, env));
    case FormulaKind::Iff:
      return c_.iff(translate_formula(*f.sub, env), translate_formula(*f.sub2, env));
  }
  return Circuit::kTrue;
}

// ---------------------------------------------------------------------------
// Grounding

namespace {

Bit multiplicity(Circuit& c, Multiplicity m, const std::vector<Bit>& bits) {
  std::vector<Bit> pairs;
  for (std::size_t i = 0; i < bits.size(); ++i)
    for (std::size_t j = i + 1; j < bits.size(); ++j) pairs.push_back(c.disj(-bits[i], -bits[j]));
  const Bit lone = c.conj(pairs);
  const Bit some = c.disj(bits);
  switch (m) {
    case Multiplicity::One: return c.conj(some, lone);
    case Multiplicity::Lone: return lone;
    case Multiplicity::Some: return some;
    case Multiplicity::Set: return Circuit::kTrue;
  }
  return Circuit::kTrue;
}

/// Plain Tseitin for one group: every reachable AND gate gets a fresh
/// auxiliary variable with both definition directions.
class GroupClausifier {
 public:
  GroupClausifier(const Circuit& c, GroundProblem& p, int group) : c_(c), p_(p), group_(group) {}

  void assert_root(Bit root) {
    if (root == Circuit::kTrue) return;
    if (root == Circuit::kFalse) {
      emit({});
      return;
    }
    emit({literal(root)});
  }

 private:
  int literal(Bit b) {
    const Circuit::Node& n = c_.node(b);
    int lit = 0;
    if (n.kind == Circuit::NodeKind::Input) {
      lit = n.var;
    } else {
      const int id = std::abs(b);
      auto it = aux_.find(id);
      if (it != aux_.end()) {
        lit = it->second;
      } else {
        std::vector<int> kids;
        for (Bit child : n.children) kids.push_back(literal(child));
        lit = ++p_.num_vars;
        aux_[id] = lit;
        Clause back{lit};
        for (int k : kids) {
          emit({-lit, k});
          back.push_back(-k);
        }
        emit(std::move(back));
      }
    }
    return b < 0 ? -lit : lit;
  }

  void emit(Clause c) {
    p_.clauses.push_back(std::move(c));
    p_.clause_group.push_back(group_);
  }

  const Circuit& c_;
  GroundProblem& p_;
  int group_;
  std::map<int, int> aux_;
};

}  // namespace

GroundProblem ground(const Model& m, const Formula* property, bool negate_property, int scope,
                     std::span<const Conjunct> extra) {
  GroundProblem p;
  p.bounds = build_bounds(m, scope);
  p.var_map = build_var_map(m, p.bounds);
  p.num_vars = p.var_map.size();
  Translator tr(m, p.bounds, p.var_map, p.circuit);
  Circuit& c = p.circuit;

  auto add_group = [&](GroupKind kind, SourceSpan span, std::string label, int index, Bit root) {
    const int id = static_cast<int>(p.groups.size());
    p.groups.push_back({id, kind, std::move(span), std::move(label), index});
    GroupClausifier(c, p, id).assert_root(root);
  };

  for (const auto& s : m.sigs) {
    std::vector<Bit> members;
    for (const auto& [k, bit] : tr.relation_matrix(s.name).cells) members.push_back(bit);
    add_group(GroupKind::Declaration, s.span, s.name, -1, multiplicity(c, s.mult, members));
  }
  const int w = p.bounds.width();
  for (const FieldDecl* f : m.fields()) {
    const BooleanMatrix field = tr.relation_matrix(f->name);
    const BooleanMatrix owner = tr.relation_matrix(f->owner);
    const BooleanMatrix target = tr.relation_matrix(f->target);
    std::vector<Bit> parts;
    for (const auto& [k, bit] : field.cells)
      parts.push_back(c.implies(bit, c.conj(owner.at(k / w), target.at(k % w))));
    for (const auto& [a, member] : owner.cells) {
      std::vector<Bit> row;
      for (const auto& [k, bit] : field.cells)
        if (k / w == a) row.push_back(bit);
      parts.push_back(c.implies(member, multiplicity(c, f->mult, row)));
    }
    add_group(GroupKind::Declaration, f->span, f->name, -1, c.conj(std::move(parts)));
  }
  for (std::size_t i = 0; i < m.facts.size(); ++i)
    add_group(GroupKind::Fact, m.facts[i].span, m.facts[i].owner, static_cast<int>(i),
              tr.translate_formula(*m.facts[i].formula, {}));
  for (std::size_t i = 0; i < extra.size(); ++i)
    add_group(GroupKind::Predicate, extra[i].span, extra[i].owner, static_cast<int>(i),
              tr.translate_formula(*extra[i].formula, {}));
  if (property) {
    const Bit b = tr.translate_formula(*property, {});
    add_group(GroupKind::Property, property->span, to_string(*property), -1,
              negate_property ? -b : b);
  }
  return p;
}

Instance decode(const std::vector<bool>& assignment, const VarMap& vars, const Bounds& bounds) {
  Instance inst;
  inst.universe = bounds.universe;
  const int w = bounds.width();
  for (const auto& s : bounds.sig_names) {
    TupleSet set(1, w);
    if (bounds.fixed_sigs.count(s))
      for (AtomId a : bounds.sig_pools.at(s)) set.insert({a});
    inst.sigs.emplace(s, std::move(set));
  }
  for (const auto& f : bounds.field_names) inst.fields.emplace(f, TupleSet(2, w));
  for (int v = 1; v <= vars.size(); ++v) {
    if (static_cast<std::size_t>(v) >= assignment.size() || !assignment[v]) continue;
    const auto& e = vars.entry(v);
    if (e.tuple.size() == 1)
      inst.sigs.at(e.relation).insert(e.tuple);
    else
      inst.fields.at(e.relation).insert(e.tuple);
  }
  return inst;
}

void write_dimacs(std::ostream& os, const GroundProblem& p) {
  os << "p cnf " << p.num_vars << ' ' << p.clauses.size() << '\n';
  int current = -1;
  for (std::size_t i = 0; i < p.clauses.size(); ++i) {
    const int g = p.clause_group[i];
    if (g != current) {
      const ClauseGroup& grp = p.groups[static_cast<std::size_t>(g)];
      os << "c group " << g << ' ' << to_string(grp.kind) << ' ' << grp.span.str() << '\n';
      current = g;
    }
    for (int lit : p.clauses[i]) os << lit << ' ';
    os << "0\n";
  }
}

}  // namespace relloc
