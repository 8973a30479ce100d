#include "relloc/maxsat.hpp"

#include <algorithm>

namespace relloc {

namespace {

std::vector<int> groups_of(const std::vector<int>& lits, const std::vector<int>& selectors) {
  std::vector<int> out;
  for (int lit : lits) {
    auto it = std::find(selectors.begin(), selectors.end(), lit);
    if (it != selectors.end()) out.push_back(static_cast<int>(it - selectors.begin()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Solver::Result GroupedSolver::solve() { return solver.solve(selectors); }

std::vector<int> GroupedSolver::core_groups(const std::vector<int>& lits) const {
  return groups_of(lits, selectors);
}

GroupedSolver load_grouped(const GroundProblem& p, SolverOptions opts) {
  GroupedSolver gs{Solver(opts), {}};
  gs.solver.ensure_vars(p.num_vars);
  for (std::size_t g = 0; g < p.groups.size(); ++g) gs.selectors.push_back(gs.solver.new_var());
  for (std::size_t i = 0; i < p.clauses.size(); ++i) {
    Clause c = p.clauses[i];
    c.push_back(-gs.selectors[static_cast<std::size_t>(p.clause_group[i])]);
    gs.solver.add_clause(std::move(c));
  }
  return gs;
}

Clause blocking_clause(const std::vector<bool>& assignment, const VarMap& vars) {
  Clause c;
  for (int v = 1; v <= vars.size(); ++v) c.push_back(assignment[static_cast<std::size_t>(v)] ? -v : v);
  return c;
}

std::vector<int> soft_from_instance(const Instance& inst, const VarMap& vars) {
  std::vector<int> out;
  for (int v = 1; v <= vars.size(); ++v) {
    const auto& e = vars.entry(v);
    const TupleSet* rel = nullptr;
    if (auto it = inst.sigs.find(e.relation); it != inst.sigs.end()) rel = &it->second;
    if (auto it = inst.fields.find(e.relation); it != inst.fields.end()) rel = &it->second;
    const bool present = rel && rel->contains(e.tuple);
    out.push_back(present ? v : -v);
  }
  return out;
}

std::vector<Clause> encode_at_most_k(std::span<const int> lits, int k, int& next_var) {
  const auto n = static_cast<int>(lits.size());
  std::vector<Clause> out;
  if (k >= n) return out;
  if (k <= 0) {
    for (int l : lits) out.push_back({-l});
    return out;
  }
  // s[i][j]: at least j+1 of lits[0..i] are true.
  std::vector<std::vector<int>> s(static_cast<std::size_t>(n - 1), std::vector<int>(static_cast<std::size_t>(k)));
  for (auto& row : s)
    for (int& v : row) v = next_var++;
  auto S = [&](int i, int j) { return s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
  auto x = [&](int i) { return lits[static_cast<std::size_t>(i)]; };

  out.push_back({-x(0), S(0, 0)});
  for (int j = 1; j < k; ++j) out.push_back({-S(0, j)});
  for (int i = 1; i < n - 1; ++i) {
    out.push_back({-x(i), S(i, 0)});
    out.push_back({-S(i - 1, 0), S(i, 0)});
    for (int j = 1; j < k; ++j) {
      out.push_back({-x(i), -S(i - 1, j - 1), S(i, j)});
      out.push_back({-S(i - 1, j), S(i, j)});
    }
    out.push_back({-x(i), -S(i - 1, k - 1)});
  }
  out.push_back({-x(n - 1), -S(n - 2, k - 1)});
  return out;
}

PMaxResult solve_pmax(const PMaxProblem& p, SolverOptions opts) {
  PMaxResult res;
  GroupedSolver gs = load_grouped(*p.hard, opts);
  Solver& s = gs.solver;
  for (int lit : p.soft) s.set_phase(std::abs(lit), lit > 0);

  if (gs.solve() == Solver::Result::Unsat) {
    res.hard_unsat = true;
    res.core = groups_of(minimize_core(s, s.core()), gs.selectors);
    return res;
  }

  auto violations = [&](const std::vector<bool>& a) {
    int n = 0;
    for (int lit : p.soft)
      if (a[static_cast<std::size_t>(std::abs(lit))] != (lit > 0)) ++n;
    return n;
  };
  const auto relation_part = [&](std::vector<bool> a) {
    a.resize(static_cast<std::size_t>(p.hard->num_vars) + 1);
    return a;
  };
  if (violations(s.model()) == 0) {
    res.assignment = relation_part(s.model());
    return res;
  }

  std::vector<int> indicators;
  for (int lit : p.soft) indicators.push_back(-lit);
  for (int k = 0;; ++k) {
    const int act = s.new_var();
    int next = s.num_vars() + 1;
    for (Clause c : encode_at_most_k(indicators, k, next)) {
      c.push_back(-act);
      s.add_clause(std::move(c));
    }
    std::vector<int> assume = gs.selectors;
    assume.push_back(act);
    if (s.solve(assume) == Solver::Result::Sat) {
      res.assignment = relation_part(s.model());
      res.cost = violations(res.assignment);
      return res;
    }
    s.add_clause({-act});
  }
}

}  // namespace relloc
