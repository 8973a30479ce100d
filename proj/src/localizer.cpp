#include "relloc/localizer.hpp"

#include <algorithm>
#include <functional>

#include "relloc/evaluator.hpp"
#include "relloc/maxsat.hpp"

namespace relloc {

const char* to_string(Status s) {
  switch (s) {
    case Status::Localized: return "localized";
    case Status::UnsatConflicts: return "unsat-conflicts";
    case Status::NoCounterexample: return "no-counterexample";
  }
  return "localized";
}

namespace {

int hamming(const std::vector<bool>& a, const std::vector<bool>& b, int vars) {
  int n = 0;
  for (int v = 1; v <= vars; ++v)
    if (a[static_cast<std::size_t>(v)] != b[static_cast<std::size_t>(v)]) ++n;
  return n;
}

std::string describe(std::span<const ClauseGroup> groups) {
  std::string out;
  for (const auto& g : groups) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(g.kind)) + " " + g.label + " at " + g.span.str();
  }
  return out;
}

/// Every assignment of atoms from `pool` to `vars`, filtered by static type.
std::vector<Binding> bindings_over(const Binding& base, const std::vector<const QuantVar*>& vars,
                                   const std::set<AtomId>& pool, const std::vector<Atom>& universe) {
  std::vector<Binding> out{base};
  for (const QuantVar* v : vars) {
    std::vector<Binding> next;
    for (const Binding& b : out)
      for (AtomId a : pool) {
        if (!v->sigs.count(universe[static_cast<std::size_t>(a)].sig)) continue;
        Binding ext = b;
        ext[v->name] = a;
        next.push_back(std::move(ext));
      }
    out = std::move(next);
  }
  return out;
}

Rational side(const std::set<AtomId>& d, const std::set<AtomId>& involved) {
  if (!std::includes(involved.begin(), involved.end(), d.begin(), d.end())) return 0;
  return Rational(static_cast<std::int64_t>(d.size()), static_cast<std::int64_t>(involved.size()));
}

// Scoring state for one conjunct.
struct NodeInfo {
  const Formula* formula = nullptr;
  const RelExpr* rel = nullptr;
  std::vector<const QuantVar*> context;  // enclosing quantifiers inside the body
  std::vector<std::size_t> children;     // boolean children (indices)
  Rational flips;                        // own evaluation flips, summed over pairs
};

}  // namespace

PairOutcome generate_pairs(const Model& m, const Formula& property, int scope, int max_pairs,
                           SolverOptions opts) {
  PairOutcome out;
  const GroundProblem neg = ground(m, &property, true, scope);
  const GroundProblem pos = ground(m, &property, false, scope);
  GroupedSolver cexs = load_grouped(neg, opts);
  const int nvars = neg.var_map.size();

  while (static_cast<int>(out.pairs.size()) < max_pairs) {
    if (cexs.solve() == Solver::Result::Unsat) break;
    const std::vector<bool> cex_bits = cexs.solver.model();
    Instance cex = decode(cex_bits, neg.var_map, neg.bounds);
    cexs.solver.add_clause(blocking_clause(cex_bits, neg.var_map));

    const PMaxResult r = solve_pmax({&pos, soft_from_instance(cex, pos.var_map)}, opts);
    if (r.hard_unsat) {
      out.kind = PairOutcome::Kind::UnsatSignal;
      for (int g : r.core) out.core.push_back(pos.groups[static_cast<std::size_t>(g)]);
      out.cex = std::move(cex);
      out.pairs.clear();
      return out;
    }
    out.pairs.push_back({std::move(cex), decode(r.assignment, pos.var_map, pos.bounds),
                         hamming(cex_bits, r.assignment, nvars)});
  }
  out.kind = out.pairs.empty() ? PairOutcome::Kind::NoCex : PairOutcome::Kind::Pairs;
  return out;
}

Diff compare(std::span<const InstancePair> pairs) {
  Diff d;
  std::optional<std::set<std::string>> common_rel;
  std::optional<std::set<AtomId>> common_atoms;
  std::set<std::string> all_rel;
  std::set<AtomId> all_atoms;

  for (const auto& pair : pairs) {
    std::map<std::string, TupleSet> delta;
    std::set<AtomId> atoms;
    auto scan = [&](const std::map<std::string, TupleSet>& a, const std::map<std::string, TupleSet>& b) {
      for (const auto& [name, set] : a) {
        const TupleSet& other = b.at(name);
        TupleSet sym = set.minus(other).united(other.minus(set));
        if (sym.empty()) continue;
        const auto sa = sym.atoms();
        atoms.insert(sa.begin(), sa.end());
        delta.emplace(name, std::move(sym));
      }
    };
    scan(pair.cex.sigs, pair.sat.sigs);
    scan(pair.cex.fields, pair.sat.fields);

    std::set<std::string> rels;
    for (const auto& [name, sym] : delta) rels.insert(name);
    for (const auto& [name, set] : pair.cex.fields) {
      const TupleSet both = set.united(pair.sat.fields.at(name));
      for (const Tuple& t : both.tuples())
        if (std::any_of(t.begin(), t.end(), [&](AtomId a) { return atoms.count(a) > 0; }))
          rels.insert(name);
    }

    auto intersect = [](auto& acc, const auto& s) {
      if (!acc) {
        acc = s;
        return;
      }
      std::remove_reference_t<decltype(*acc)> keep;
      std::set_intersection(acc->begin(), acc->end(), s.begin(), s.end(), std::inserter(keep, keep.end()));
      acc = std::move(keep);
    };
    intersect(common_rel, rels);
    intersect(common_atoms, atoms);
    all_rel.insert(rels.begin(), rels.end());
    all_atoms.insert(atoms.begin(), atoms.end());
    d.per_pair.push_back(std::move(delta));
  }

  if (common_rel && !common_rel->empty()) {
    d.relations = *common_rel;
  } else {
    d.relations = all_rel;
    d.relations_fallback = !pairs.empty();
  }
  if (common_atoms && !common_atoms->empty()) {
    d.atoms = *common_atoms;
  } else {
    d.atoms = all_atoms;
    d.atoms_fallback = !pairs.empty();
  }
  return d;
}

std::vector<Conjunct> get_susp_exprs(const Model& m, const Diff& d) {
  std::vector<Conjunct> all;
  std::vector<Conjunct> any;
  for (const auto& c : m.facts) {
    const auto refs = relation_refs(*c.formula);
    const auto hits = std::count_if(d.relations.begin(), d.relations.end(),
                                    [&](const std::string& r) { return refs.count(r) > 0; });
    if (hits == 0) continue;
    any.push_back(c);
    if (static_cast<std::size_t>(hits) == d.relations.size()) all.push_back(c);
  }
  return all.empty() ? any : all;
}

std::vector<ScoredNode> compute_scores(std::span<const Conjunct> exprs, const Diff& d,
                                       std::span<const InstancePair> pairs) {
  std::vector<ScoredNode> out;
  if (pairs.empty()) return out;
  if (d.atoms.empty()) throw LocalizationError("scoring requires at least one diff atom");
  const std::vector<Atom>& universe = pairs.front().cex.universe;
  const auto npairs = static_cast<std::int64_t>(pairs.size());

  for (const auto& c : exprs) {
    const auto chain = outer_quantifiers(*c.formula);
    std::vector<const QuantVar*> outer;
    for (const Formula* q : chain) outer.push_back(&q->var);
    const Formula& body = chain.empty() ? *c.formula : *chain.back()->sub;
    const std::vector<Binding> base = bindings_over({}, outer, d.atoms, universe);

    std::vector<NodeInfo> nodes;
    std::function<std::size_t(const Formula&, std::vector<const QuantVar*>)> walk =
        [&](const Formula& f, std::vector<const QuantVar*> ctx) -> std::size_t {
      const std::size_t id = nodes.size();
      nodes.push_back({&f, nullptr, ctx, {}, 0});
      auto leaf = [&](const RelPtr& e) { nodes.push_back({nullptr, e.get(), ctx, {}, 0}); };
      std::vector<std::size_t> kids;
      switch (f.kind) {
        case FormulaKind::Subset:
        case FormulaKind::NotSubset:
        case FormulaKind::Equal:
        case FormulaKind::NotEqual:
          leaf(f.left);
          leaf(f.right);
          break;
        case FormulaKind::Mult: leaf(f.left); break;
        case FormulaKind::Quant: {
          leaf(f.var.bound);
          auto inner = ctx;
          inner.push_back(&f.var);
          kids.push_back(walk(*f.sub, inner));
          break;
        }
        case FormulaKind::Not: kids.push_back(walk(*f.sub, ctx)); break;
        default:
          kids.push_back(walk(*f.sub, ctx));
          kids.push_back(walk(*f.sub2, ctx));
          break;
      }
      nodes[id].children = std::move(kids);
      return id;
    };
    walk(body, {});

    std::vector<ScoredNode> scored(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      NodeInfo& n = nodes[i];
      std::vector<Binding> bs;
      for (const Binding& b : base) {
        auto ext = bindings_over(b, n.context, d.atoms, universe);
        bs.insert(bs.end(), std::make_move_iterator(ext.begin()), std::make_move_iterator(ext.end()));
      }
      Rational rel_sum;
      std::int64_t flips = 0;
      for (const auto& pair : pairs) {
        if (bs.empty()) continue;
        Rational pair_sum;
        for (const Binding& b : bs) {
          const auto inv_c = n.formula ? involved_atoms(*n.formula, pair.cex, b) : involved_atoms(*n.rel, pair.cex, b);
          const auto inv_s = n.formula ? involved_atoms(*n.formula, pair.sat, b) : involved_atoms(*n.rel, pair.sat, b);
          pair_sum += (side(d.atoms, inv_c) + side(d.atoms, inv_s)) / 2;
          if (n.formula && eval_formula(*n.formula, pair.cex, b) != eval_formula(*n.formula, pair.sat, b))
            ++flips;
        }
        rel_sum += pair_sum / static_cast<std::int64_t>(bs.size());
      }
      n.flips = flips;
      ScoredNode& s = scored[i];
      s.expr = n.formula ? to_string(*n.formula) : to_string(*n.rel);
      s.span = n.formula ? n.formula->span : n.rel->span;
      s.boolean_node = n.formula != nullptr;
      s.relational = rel_sum / npairs;
    }

    // Boolean score accumulates flips over each node's boolean subtree.
    std::function<Rational(std::size_t)> subtree = [&](std::size_t i) {
      Rational sum = nodes[i].flips;
      for (std::size_t k : nodes[i].children) sum += subtree(k);
      return sum;
    };
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].formula) scored[i].boolean = subtree(i) / npairs;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Formula* f = nodes[i].formula;
      if (!f || !f->is_connective()) continue;
      const auto& kids = nodes[i].children;
      if (scored[kids[0]].total() != scored[kids[1]].total()) scored[i].hint = connective_text(f->kind);
    }
    out.insert(out.end(), std::make_move_iterator(scored.begin()), std::make_move_iterator(scored.end()));
  }
  return out;
}

std::vector<ScoredNode> rank(std::vector<ScoredNode> nodes) {
  std::stable_sort(nodes.begin(), nodes.end(), [](const ScoredNode& a, const ScoredNode& b) {
    if (a.total() != b.total()) return a.total() > b.total();
    return a.span.before(b.span);
  });
  return nodes;
}

bool conflicts_on(const Conjunct& e, const Instance& sat, const std::set<AtomId>& atoms) {
  const auto chain = outer_quantifiers(*e.formula);
  const bool all_chain = !chain.empty() && std::all_of(chain.begin(), chain.end(), [](const Formula* q) {
    return q->quant == Quantifier::All;
  });
  if (!all_chain) return !eval_formula(*e.formula, sat, {});

  std::vector<AtomId> pool(atoms.begin(), atoms.end());
  std::vector<AtomId> pick(chain.size());
  std::function<bool(std::size_t)> go = [&](std::size_t depth) {
    if (depth == chain.size()) {
      const auto inst = guarded_instantiate(e, pick, sat.universe);
      if (!inst || !guards_hold(*inst, sat)) return false;
      return !eval_formula(*inst->body, sat, inst->binding);
    }
    for (AtomId a : pool) {
      pick[depth] = a;
      if (go(depth + 1)) return true;
    }
    return false;
  };
  return go(0);
}

namespace {

RankedReport scored_report(const Model& m, std::vector<InstancePair> pairs) {
  RankedReport rep;
  rep.status = Status::Localized;
  rep.diff = compare(pairs);
  const auto exprs = get_susp_exprs(m, rep.diff);
  rep.ranking = rank(compute_scores(exprs, rep.diff, pairs));
  rep.pairs = std::move(pairs);
  return rep;
}

void check_pair(const Model& m, const Formula& p, const InstancePair& pair) {
  if (!satisfies_model(m, pair.cex) || eval_formula(p, pair.cex, {}))
    throw LocalizationError("generated counterexample does not violate the property under the model");
  if (!satisfies_model(m, pair.sat) || !eval_formula(p, pair.sat, {}))
    throw LocalizationError("generated satisfying instance does not satisfy the model and property");
}

}  // namespace

RankedReport unsat_localize(const Model& m, const Formula& property,
                            std::span<const ClauseGroup> core, const Instance& cex, int scope,
                            SolverOptions opts) {
  std::set<int> removed;
  for (const auto& g : core)
    if (g.kind == GroupKind::Fact) removed.insert(g.conjunct_index);

  Model sliced = m;
  sliced.facts.clear();
  std::vector<Conjunct> suspects;
  for (std::size_t i = 0; i < m.facts.size(); ++i) {
    if (removed.count(static_cast<int>(i)))
      suspects.push_back(m.facts[i]);
    else
      sliced.facts.push_back(m.facts[i]);
  }

  const GroundProblem pos = ground(sliced, &property, false, scope);
  const PMaxResult r = solve_pmax({&pos, soft_from_instance(cex, pos.var_map)}, opts);
  if (r.hard_unsat) {
    std::vector<ClauseGroup> residual;
    for (int g : r.core) residual.push_back(pos.groups[static_cast<std::size_t>(g)]);
    throw LocalizationError("model remains unsatisfiable with the property after slicing: " +
                            describe(residual));
  }

  RankedReport rep;
  rep.status = Status::UnsatConflicts;
  rep.core.assign(core.begin(), core.end());
  rep.pairs.push_back({cex, decode(r.assignment, pos.var_map, pos.bounds), r.cost});
  rep.diff = compare(rep.pairs);
  const Instance& sat = rep.pairs.front().sat;
  for (const auto& e : suspects) {
    if (!conflicts_on(e, sat, rep.diff.atoms)) continue;
    ScoredNode n;
    n.expr = to_string(*e.formula);
    n.span = e.span;
    n.boolean_node = true;
    n.boolean = 1;
    rep.ranking.push_back(std::move(n));
  }
  rep.ranking = rank(std::move(rep.ranking));
  return rep;
}

RankedReport localize(const Model& m, const Formula& property, const LocalizeConfig& cfg) {
  PairOutcome out = generate_pairs(m, property, cfg.scope, cfg.max_pairs, cfg.solver);
  switch (out.kind) {
    case PairOutcome::Kind::NoCex: {
      RankedReport rep;
      rep.status = Status::NoCounterexample;
      return rep;
    }
    case PairOutcome::Kind::UnsatSignal:
      return unsat_localize(m, property, out.core, *out.cex, cfg.scope, cfg.solver);
    case PairOutcome::Kind::Pairs: break;
  }
  for (const auto& pair : out.pairs) check_pair(m, property, pair);
  return scored_report(m, std::move(out.pairs));
}

RankedReport localize_fixture(const Model& m, const Formula& property, const Instance& cex,
                              const Instance& sat) {
  if (!(cex.universe == sat.universe))
    throw FixtureError("fixture instances use different universes");
  if (!satisfies_model(m, cex)) throw FixtureError("counterexample fixture violates the model");
  if (eval_formula(property, cex, {})) throw FixtureError("counterexample fixture satisfies the property");
  if (!satisfies_model(m, sat)) throw FixtureError("satisfying fixture violates the model");
  if (!eval_formula(property, sat, {})) throw FixtureError("satisfying fixture violates the property");

  int distance = 0;
  auto count = [&](const auto& a, const auto& b) {
    for (const auto& [name, set] : a) {
      const TupleSet& other = b.at(name);
      distance += static_cast<int>(set.minus(other).size() + other.minus(set).size());
    }
  };
  count(cex.sigs, sat.sigs);
  count(cex.fields, sat.fields);
  return scored_report(m, {InstancePair{cex, sat, distance}});
}

}  // namespace relloc
