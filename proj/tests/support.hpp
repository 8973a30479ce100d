// Shared fixtures and brute-force oracles for the test binaries.
#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "relloc/evaluator.hpp"
#include "relloc/frontend.hpp"
#include "relloc/grounder.hpp"
#include "relloc/instance_json.hpp"
#include "relloc/localizer.hpp"
#include "relloc/maxsat.hpp"

namespace relloc::testsupport {

inline std::string model_path(const std::string& name) { return std::string(RELLOC_MODELS_DIR) + "/" + name; }

inline Model fsm(const std::string& name = "fsm.rml") { return load_model_file(model_path(name)); }

inline const Formula& assertion(const Model& m, const std::string& name = "NoStopTransition") {
  return *m.asserts.at(name).body;
}

inline Instance fixture(const Model& m, const std::string& name) {
  return load_instance_file(model_path(name), m);
}

inline FormPtr negate(const FormPtr& f) {
  auto n = std::make_shared<Formula>();
  n->kind = FormulaKind::Not;
  n->sub = f;
  n->span = f->span;
  return n;
}

/// Every model of the grounded problem, projected to relation variables.
inline std::set<Instance> all_solutions(const GroundProblem& p) {
  GroupedSolver gs = load_grouped(p);
  std::set<Instance> out;
  while (gs.solve() == Solver::Result::Sat) {
    const auto bits = gs.solver.model();
    out.insert(decode(bits, p.var_map, p.bounds));
    gs.solver.add_clause(blocking_clause(bits, p.var_map));
  }
  return out;
}

/// Relation-variable Hamming distance between two instances on one universe.
inline int distance(const Instance& a, const Instance& b) {
  int n = 0;
  auto count = [&](const auto& x, const auto& y) {
    for (const auto& [name, set] : x) {
      const TupleSet& other = y.at(name);
      n += static_cast<int>(set.minus(other).size() + other.minus(set).size());
    }
  };
  count(a.sigs, b.sigs);
  count(a.fields, b.fields);
  return n;
}

/// Instances reachable from `center` by flipping at most `radius` relation
/// variables of `vars`, filtered by `keep`.
template <typename Pred>
std::vector<Instance> hamming_ball(const Instance& center, const VarMap& vars, int radius, Pred keep) {
  std::vector<Instance> out;
  auto flip = [&](Instance& inst, int v) {
    const auto& e = vars.entry(v);
    TupleSet& rel = e.tuple.size() == 1 ? inst.sigs.at(e.relation) : inst.fields.at(e.relation);
    TupleSet next(rel.arity(), rel.width());
    bool had = false;
    for (const Tuple& t : rel.tuples()) {
      if (t == e.tuple)
        had = true;
      else
        next.insert(t);
    }
    if (!had) next.insert(e.tuple);
    rel = std::move(next);
  };
  std::vector<int> chosen;
  auto rec = [&](auto&& self, int from, Instance& cur) -> void {
    if (keep(cur)) out.push_back(cur);
    if (static_cast<int>(chosen.size()) == radius) return;
    for (int v = from; v <= vars.size(); ++v) {
      flip(cur, v);
      chosen.push_back(v);
      self(self, v + 1, cur);
      chosen.pop_back();
      flip(cur, v);
    }
  };
  Instance cur = center;
  rec(rec, 1, cur);
  return out;
}

inline const ScoredNode* find_node(const std::vector<ScoredNode>& nodes, const std::string& expr) {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const ScoredNode& n) { return n.expr == expr; });
  return it == nodes.end() ? nullptr : &*it;
}

}  // namespace relloc::testsupport
