#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace relloc {

struct SolverOptions {
  /// Nonzero seeds perturb the initial variable activities.
  std::uint64_t seed = 0;
  int restart_unit = 100;
};

/// CDCL solver over DIMACS-style literals (variable ids from 1, negative
/// literals are negations). Clauses are permanent; assumptions hold for a
/// single solve call.
class Solver {
 public:
  enum class Result { Sat, Unsat };

  explicit Solver(SolverOptions opts = {});

  int new_var();
  void ensure_vars(int n);
  int num_vars() const { return num_vars_; }

  /// Adds a clause at the root. Returns false once the clause set is
  /// unsatisfiable without assumptions.
  bool add_clause(std::vector<int> lits);
  bool okay() const { return ok_; }

  Result solve(std::span<const int> assumptions = {});

  /// Total assignment from the last Sat result, indexed by variable id.
  const std::vector<bool>& model() const { return model_; }
  bool model_value(int var) const { return model_.at(static_cast<std::size_t>(var)); }
  /// Assumption literals responsible for the last Unsat result.
  const std::vector<int>& core() const { return core_; }

  /// Preferred polarity for decisions on `var`, kept across restarts.
  void set_phase(int var, bool value);

  std::uint64_t conflicts() const { return stats_conflicts_; }

 private:
  using Lit = int;  // 2 * var + sign
  static Lit to_lit(int ext) { return ext > 0 ? 2 * ext : 2 * -ext + 1; }
  static int to_ext(Lit l) { return (l & 1) ? -(l >> 1) : (l >> 1); }
  static Lit neg(Lit l) { return l ^ 1; }
  static int var_of(Lit l) { return l >> 1; }

  struct ClauseData {
    std::vector<Lit> lits;
    bool learnt = false;
    bool deleted = false;
    double activity = 0;
  };

  std::int8_t value(Lit l) const {
    const std::int8_t v = assigns_[static_cast<std::size_t>(var_of(l))];
    return (l & 1) ? static_cast<std::int8_t>(-v) : v;
  }
  int level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, int reason);
  int propagate();
  void analyze(int confl, std::vector<Lit>& learnt, int& bt_level);
  void analyze_final(Lit failed);
  void cancel_until(int lvl);
  Lit pick_branch();
  int attach(std::vector<Lit> lits, bool learnt);
  void reduce_db();
  /// nullopt when the conflict budget runs out (restart).
  std::optional<Result> search(int conflict_budget, std::span<const Lit> assumptions);

  void bump_var(int v);
  void bump_clause(ClauseData& c);
  bool heap_less(int a, int b) const;
  void heap_insert(int v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  int heap_pop();

  SolverOptions opts_;
  int num_vars_ = 0;
  bool ok_ = true;

  std::vector<ClauseData> clauses_;
  std::vector<int> learnts_;
  std::vector<std::vector<int>> watches_;  // by literal that turned false

  std::vector<std::int8_t> assigns_;  // 1 true, -1 false, 0 unassigned
  std::vector<int> levels_;
  std::vector<int> reasons_;
  std::vector<bool> saved_phase_;
  std::vector<std::int8_t> user_phase_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::vector<int> heap_;
  std::vector<int> heap_pos_;  // -1 when absent

  std::vector<char> seen_;
  double max_learnts_ = 0;

  std::vector<bool> model_;
  std::vector<int> core_;
  std::uint64_t stats_conflicts_ = 0;
};

/// Deletion-based shrinking of an Unsat assumption set until dropping any
/// single member makes the solve Sat.
std::vector<int> minimize_core(Solver& s, std::vector<int> core);

}  // namespace relloc
