#pragma once

#include <span>
#include <vector>

#include "relloc/grounder.hpp"
#include "relloc/sat.hpp"

namespace relloc {

/// A solver loaded with a grounded problem. Each group's clauses carry the
/// negation of that group's selector, and solving assumes every selector.
struct GroupedSolver {
  Solver solver;
  std::vector<int> selectors;  // indexed by group id

  Solver::Result solve();
  /// Group ids whose selectors appear in `lits` (e.g. a core), ascending.
  std::vector<int> core_groups(const std::vector<int>& lits) const;
};

GroupedSolver load_grouped(const GroundProblem& p, SolverOptions opts = {});

/// Blocking clause excluding the relation-variable part of `assignment`.
Clause blocking_clause(const std::vector<bool>& assignment, const VarMap& vars);

struct PMaxProblem {
  const GroundProblem* hard = nullptr;
  std::vector<int> soft;  // one unit literal per relation variable
};

/// +v for every relation variable whose tuple is in `inst`, -v otherwise.
std::vector<int> soft_from_instance(const Instance& inst, const VarMap& vars);

/// Sequential-counter encoding of "at most k of lits"; auxiliaries are
/// allocated from `next_var` upward.
std::vector<Clause> encode_at_most_k(std::span<const int> lits, int k, int& next_var);

struct PMaxResult {
  bool hard_unsat = false;
  std::vector<bool> assignment;  // indexed by variable id
  int cost = 0;                  // violated soft literals
  std::vector<int> core;         // minimized group ids when hard_unsat
};

PMaxResult solve_pmax(const PMaxProblem& p, SolverOptions opts = {});

}  // namespace relloc
