#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "relloc/grounder.hpp"
#include "relloc/model.hpp"
#include "relloc/rational.hpp"
#include "relloc/sat.hpp"

namespace relloc {

/// Fixture instances that are not on the expected side of the property.
class FixtureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal contract, e.g. a sliced model that is still unsatisfiable.
class LocalizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InstancePair {
  Instance cex;
  Instance sat;
  int distance = 0;  // differing relation variables
};

struct PairOutcome {
  enum class Kind { Pairs, UnsatSignal, NoCex };
  Kind kind = Kind::NoCex;
  std::vector<InstancePair> pairs;
  std::vector<ClauseGroup> core;  // UnsatSignal: minimized groups of M and p
  std::optional<Instance> cex;    // UnsatSignal: the counterexample found
};

/// Counterexample / nearest-satisfying-instance loop. Each counterexample is
/// blocked before the next solve; the loop stops after `max_pairs` pairs or
/// when counterexamples run out.
PairOutcome generate_pairs(const Model& m, const Formula& property, int scope, int max_pairs,
                           SolverOptions opts = {});

struct Diff {
  std::vector<std::map<std::string, TupleSet>> per_pair;  // nonempty symmetric differences
  std::set<std::string> relations;
  std::set<AtomId> atoms;
  bool relations_fallback = false;  // no common relation: union used
  bool atoms_fallback = false;      // no common atom: union used
};

Diff compare(std::span<const InstancePair> pairs);

/// Fact conjuncts referencing every diff relation, or any of them when no
/// conjunct references all.
std::vector<Conjunct> get_susp_exprs(const Model& m, const Diff& d);

struct ScoredNode {
  std::string expr;
  SourceSpan span;
  bool boolean_node = false;
  Rational boolean;
  Rational relational;
  std::optional<std::string> hint;  // connective whose operands score differently

  Rational total() const { return boolean + relational; }
};

std::vector<ScoredNode> compute_scores(std::span<const Conjunct> exprs, const Diff& d,
                                       std::span<const InstancePair> pairs);

/// Descending total; equal totals keep source order (earlier, then enclosing).
std::vector<ScoredNode> rank(std::vector<ScoredNode> nodes);

enum class Status { Localized, UnsatConflicts, NoCounterexample };
const char* to_string(Status s);

struct RankedReport {
  Status status = Status::Localized;
  std::vector<InstancePair> pairs;
  Diff diff;
  std::vector<ScoredNode> ranking;
  std::vector<ClauseGroup> core;  // unsat-conflicts only
};

/// True when `e`, instantiated with diff atoms, evaluates to false on `sat`.
/// Outer ALL chains are instantiated under their guards; other conjuncts are
/// evaluated closed.
bool conflicts_on(const Conjunct& e, const Instance& sat, const std::set<AtomId>& atoms);

RankedReport unsat_localize(const Model& m, const Formula& property,
                            std::span<const ClauseGroup> core, const Instance& cex, int scope,
                            SolverOptions opts = {});

struct LocalizeConfig {
  int scope = 3;
  int max_pairs = 5;
  SolverOptions solver;
};

RankedReport localize(const Model& m, const Formula& property, const LocalizeConfig& cfg);

/// Scores a given pair without solving. Throws FixtureError unless `cex`
/// satisfies M and violates the property and `sat` satisfies both.
RankedReport localize_fixture(const Model& m, const Formula& property, const Instance& cex,
                              const Instance& sat);

}  // namespace relloc
