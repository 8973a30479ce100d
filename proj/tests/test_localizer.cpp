#include <doctest.h>

#include <tuple>

#include "generators.hpp"
#include "support.hpp"

using namespace relloc;
using namespace relloc::testsupport;

namespace {

using SpanKey = std::tuple<int, int, int, int>;
SpanKey key(const SourceSpan& s) { return {s.start_line, s.start_col, s.end_line, s.end_col}; }

const Conjunct& fact_at_line(const Model& m, int line) {
  for (const auto& c : m.facts)
    if (c.span.start_line == line) return c;
  throw std::out_of_range("no fact at line " + std::to_string(line));
}

std::set<int> lines_of(const std::vector<Conjunct>& cs) {
  std::set<int> out;
  for (const auto& c : cs) out.insert(c.span.start_line);
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force scoring oracle for conjuncts of the form `all v: T | body`
// where body has no nested quantifier.

struct OracleScore {
  Rational boolean;
  Rational relational;
};

struct ScoringOracle {
  const Diff& diff;
  std::span<const InstancePair> pairs;

  static Rational side(const std::set<AtomId>& d, const std::set<AtomId>& involved) {
    if (!std::includes(involved.begin(), involved.end(), d.begin(), d.end())) return 0;
    return Rational(static_cast<std::int64_t>(d.size()), static_cast<std::int64_t>(involved.size()));
  }

  template <typename Node>
  Rational relational(const Node& n, const std::vector<Binding>& bindings) const {
    Rational sum = 0;
    for (const auto& p : pairs) {
      Rational per = 0;
      for (const auto& b : bindings)
        per += (side(diff.atoms, involved_atoms(n, p.cex, b)) + side(diff.atoms, involved_atoms(n, p.sat, b))) / 2;
      sum += per / static_cast<std::int64_t>(bindings.size());
    }
    return sum / static_cast<std::int64_t>(pairs.size());
  }

  static void subtree(const Formula& f, std::vector<const Formula*>& out) {
    out.push_back(&f);
    if (f.kind == FormulaKind::Not) subtree(*f.sub, out);
    if (f.is_connective()) {
      subtree(*f.sub, out);
      subtree(*f.sub2, out);
    }
  }

  Rational boolean(const Formula& f, const std::vector<Binding>& bindings) const {
    std::vector<const Formula*> nodes;
    subtree(f, nodes);
    std::int64_t flips = 0;
    for (const auto& p : pairs)
      for (const Formula* m : nodes)
        for (const auto& b : bindings) flips += eval_formula(*m, p.cex, b) != eval_formula(*m, p.sat, b);
    return Rational(flips, static_cast<std::int64_t>(pairs.size()));
  }

  void visit(const Formula& f, const std::vector<Binding>& bindings, std::map<SpanKey, OracleScore>& out) const {
    out[key(f.span)] = {boolean(f, bindings), relational(f, bindings)};
    auto leaf = [&](const RelPtr& e) {
      if (e) out[key(e->span)] = {0, relational(*e, bindings)};
    };
    if (f.is_comparison() || f.kind == FormulaKind::Mult) {
      leaf(f.left);
      leaf(f.right);
    }
    if (f.kind == FormulaKind::Not) visit(*f.sub, bindings, out);
    if (f.is_connective()) {
      visit(*f.sub, bindings, out);
      visit(*f.sub2, bindings, out);
    }
  }

  std::map<SpanKey, OracleScore> score(const Conjunct& c) const {
    const Formula& q = *c.formula;
    std::vector<Binding> bindings;
    for (AtomId a : diff.atoms) {
      const auto& sig = pairs.front().cex.universe[static_cast<std::size_t>(a)].sig;
      if (q.var.sigs.count(sig)) bindings.push_back({{q.var.name, a}});
    }
    std::map<SpanKey, OracleScore> out;
    if (!bindings.empty()) visit(*q.sub, bindings, out);
    return out;
  }
};

bool single_all_without_nesting(const Conjunct& c) {
  const Formula& f = *c.formula;
  if (f.kind != FormulaKind::Quant || f.quant != Quantifier::All) return false;
  std::vector<const Formula*> nodes;
  ScoringOracle::subtree(*f.sub, nodes);
  return std::none_of(nodes.begin(), nodes.end(), [](const Formula* n) { return n->kind == FormulaKind::Quant; });
}

void check_against_oracle(const std::vector<Conjunct>& exprs, const Diff& d, std::span<const InstancePair> pairs) {
  const auto nodes = compute_scores(exprs, d, pairs);
  const ScoringOracle oracle{d, pairs};
  std::map<SpanKey, OracleScore> expected;
  for (const auto& c : exprs) {
    const auto s = oracle.score(c);
    expected.insert(s.begin(), s.end());
  }
  std::set<SpanKey> seen;
  for (const auto& n : nodes) {
    INFO(n.expr << " " << n.span.str());
    seen.insert(key(n.span));
    const auto it = expected.find(key(n.span));
    REQUIRE(it != expected.end());
    CHECK(n.boolean == it->second.boolean);
    CHECK(n.relational == it->second.relational);
  }
  std::set<SpanKey> all;
  for (const auto& [k, _] : expected) all.insert(k);
  CHECK(seen == all);
}

struct Example {
  Model m = fsm();
  Instance cex = fixture(m, "fsm_cex.json");
  Instance sat = fixture(m, "fsm_sat.json");
  AtomId atom(const std::string& name) const { return *cex.find_atom(name); }
  std::vector<InstancePair> pairs() const { return {{cex, sat, distance(cex, sat)}}; }
};

}  // namespace

TEST_CASE("worked example: exact scores of the four listed nodes") {
  const Example ex;
  const RankedReport r = localize_fixture(ex.m, assertion(ex.m), ex.cex, ex.sat);
  CHECK(r.status == Status::Localized);
  struct Row {
    const char* expr;
    Rational total, boolean, relational;
  };
  const Row rows[] = {
      {"s.transition = none => s in FSM.stop", {19, 12}, 1, {7, 12}},  // (d)
      {"s.transition = none", {5, 4}, 1, {1, 4}},                      // (b)
      {"FSM.stop in s.*transition", {1, 2}, 0, {1, 2}},                // (a)
      {"s in FSM.stop", {1, 2}, 0, {1, 2}},                            // (c)
  };
  for (const auto& row : rows) {
    INFO(row.expr);
    const ScoredNode* n = find_node(r.ranking, row.expr);
    REQUIRE(n);
    CHECK(n->total() == row.total);
    CHECK(n->boolean == row.boolean);
    CHECK(n->relational == row.relational);
    CHECK(n->total().fixed(2) == std::string(row.total == Rational(19, 12) ? "1.58" : row.total == Rational(5, 4) ? "1.25" : "0.50"));
  }
  REQUIRE(r.ranking.size() >= 4);
  CHECK(r.ranking[0].expr == "s.transition = none => s in FSM.stop");
  CHECK(r.ranking[0].hint == std::optional<std::string>("=>"));
  CHECK(r.ranking[1].expr == "s.transition = none");
  for (std::size_t i = 2; i < 4; ++i) CHECK(r.ranking[i].total() == Rational(1, 2));
  for (std::size_t i = 1; i < r.ranking.size(); ++i) CHECK_FALSE(r.ranking[i].hint);
}

TEST_CASE("worked example: every node matches the scoring oracle") {
  const Example ex;
  const auto pairs = ex.pairs();
  const Diff d = compare(pairs);
  check_against_oracle(get_susp_exprs(ex.m, d), d, pairs);
}

TEST_CASE("compare: relations and atoms of the example pair") {
  const Example ex;
  const auto pairs = ex.pairs();
  const Diff d = compare(pairs);
  CHECK(d.relations == std::set<std::string>{"stop", "transition"});
  CHECK(d.atoms == std::set<AtomId>{ex.atom("State1"), ex.atom("State3")});
  CHECK_FALSE(d.relations_fallback);
  CHECK_FALSE(d.atoms_fallback);
  REQUIRE(d.per_pair.size() == 1);
  CHECK(d.per_pair[0].size() == 1);
  CHECK(d.per_pair[0].at("transition").size() == 1);

  const std::vector<InstancePair> twice{pairs[0], pairs[0]};
  const Diff d2 = compare(twice);
  CHECK(d2.relations == d.relations);
  CHECK(d2.atoms == d.atoms);
}

TEST_CASE("compare: disjoint atom sets fall back to the union") {
  const Example ex;
  Instance cex2 = ex.sat;
  cex2.fields.at("transition").insert({ex.atom("State0"), ex.atom("State2")});
  const std::vector<InstancePair> pairs{ex.pairs()[0], {cex2, ex.sat, 1}};
  const Diff d = compare(pairs);
  CHECK(d.atoms_fallback);
  CHECK(d.atoms == std::set<AtomId>{ex.atom("State0"), ex.atom("State1"), ex.atom("State2"), ex.atom("State3")});
  CHECK_FALSE(d.relations_fallback);
  CHECK(d.relations == std::set<std::string>{"transition"});
}

TEST_CASE("suspicious expressions: all diff relations, else any") {
  const Model m = fsm();
  Diff d;
  d.relations = {"stop", "transition"};
  CHECK(lines_of(get_susp_exprs(m, d)) == std::set<int>{19, 25});
  d.relations = {"start"};
  CHECK(lines_of(get_susp_exprs(m, d)) == std::set<int>{8, 15, 17, 23});
  d.relations = {"start", "stop", "transition"};  // no conjunct names all three
  CHECK(lines_of(get_susp_exprs(m, d)) == std::set<int>{8, 10, 11, 15, 17, 19, 23, 25});
}

TEST_CASE("property: suspicious expressions match a reference walk") {
  const Model m = fsm();
  auto refs = [](const Conjunct& c) {
    std::set<std::string> out;
    auto rel = [&](auto&& self, const RelExpr& e) -> void {
      if (e.kind == RelKind::Name) out.insert(e.name);
      if (e.lhs) self(self, *e.lhs);
      if (e.rhs) self(self, *e.rhs);
    };
    auto form = [&](auto&& self, const Formula& f) -> void {
      if (f.left) rel(rel, *f.left);
      if (f.right) rel(rel, *f.right);
      if (f.var.bound) rel(rel, *f.var.bound);
      if (f.sub) self(self, *f.sub);
      if (f.sub2) self(self, *f.sub2);
    };
    form(form, *c.formula);
    return out;
  };
  const std::vector<std::string> names{"FSM", "State", "start", "stop", "transition"};
  for (unsigned mask = 1; mask < (1u << names.size()); ++mask) {
    Diff d;
    for (std::size_t i = 0; i < names.size(); ++i)
      if (mask >> i & 1) d.relations.insert(names[i]);
    std::set<int> all_lines;
    std::set<int> any_lines;
    for (const auto& c : m.facts) {
      const auto r = refs(c);
      const bool all = std::includes(r.begin(), r.end(), d.relations.begin(), d.relations.end());
      const bool any = std::any_of(d.relations.begin(), d.relations.end(), [&](const auto& n) { return r.count(n) > 0; });
      if (all) all_lines.insert(c.span.start_line);
      if (any) any_lines.insert(c.span.start_line);
    }
    INFO("mask " << mask);
    CHECK(lines_of(get_susp_exprs(m, d)) == (all_lines.empty() ? any_lines : all_lines));
  }
}

TEST_CASE("rank: descending totals, source order on ties") {
  auto node = [](const char* e, int l1, int c1, int l2, int c2, Rational b) {
    ScoredNode n;
    n.expr = e;
    n.span = {"m", l1, c1, l2, c2};
    n.boolean = b;
    return n;
  };
  const auto ranked = rank({
      node("inner", 3, 5, 3, 9, 1),
      node("late", 7, 1, 7, 4, 2),
      node("outer", 3, 1, 3, 20, 1),
      node("early", 1, 1, 1, 4, 1),
      node("low", 1, 1, 1, 2, 0),
  });
  std::vector<std::string> order;
  for (const auto& n : ranked) order.push_back(n.expr);
  CHECK(order == std::vector<std::string>{"late", "early", "outer", "inner", "low"});
}

TEST_CASE("property: scores match the oracle on generated pairs") {
  const Model m = fsm();
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    for (int scope : {3, 4}) {
      const PairOutcome out = generate_pairs(m, assertion(m), scope, 3, {seed});
      REQUIRE(out.kind == PairOutcome::Kind::Pairs);
      const Diff d = compare(out.pairs);
      std::vector<Conjunct> exprs;
      for (const auto& c : get_susp_exprs(m, d))
        if (single_all_without_nesting(c)) exprs.push_back(c);
      INFO("seed " << seed << " scope " << scope);
      check_against_oracle(exprs, d, out.pairs);
      for (const auto& n : compute_scores(get_susp_exprs(m, d), d, out.pairs)) {
        CHECK(n.relational >= Rational(0));
        CHECK(n.relational <= Rational(1));
        CHECK(n.boolean >= Rational(0));
        if (!n.boolean_node) CHECK(n.boolean == Rational(0));
        if (n.hint) CHECK(n.boolean_node);
      }
      ++checked;
    }
  }
  CHECK(checked == 12);
}

TEST_CASE("pairs are valid, distinct and nearest") {
  const Model m = fsm();
  const Formula& p = assertion(m);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    INFO("seed " << seed);
    const PairOutcome out = generate_pairs(m, p, 4, 5, {seed});
    REQUIRE(out.kind == PairOutcome::Kind::Pairs);
    CHECK(out.pairs.size() == 5);
    std::set<Instance> cexs;
    for (const auto& pr : out.pairs) {
      CHECK(satisfies_model(m, pr.cex));
      CHECK_FALSE(eval_formula(p, pr.cex, {}));
      CHECK(satisfies_model(m, pr.sat));
      CHECK(eval_formula(p, pr.sat, {}));
      CHECK(pr.distance == distance(pr.cex, pr.sat));
      cexs.insert(pr.cex);
    }
    CHECK(cexs.size() == out.pairs.size());
  }
  // Nothing closer than the reported distance satisfies the model and property.
  const PairOutcome out = generate_pairs(m, p, 4, 3);
  const GroundProblem g = ground(m, nullptr, false, 4);
  for (const auto& pr : out.pairs) {
    REQUIRE(pr.distance <= 3);
    const auto closer = hamming_ball(pr.cex, g.var_map, pr.distance - 1,
                                     [&](const Instance& i) { return satisfies_model(m, i) && eval_formula(p, i, {}); });
    CHECK(closer.empty());
  }
}

TEST_CASE("fixture mode validates the pair") {
  const Example ex;
  CHECK_THROWS_AS(localize_fixture(ex.m, assertion(ex.m), ex.sat, ex.cex), FixtureError);
  CHECK_THROWS_AS(localize_fixture(ex.m, assertion(ex.m), ex.cex, ex.cex), FixtureError);
}

TEST_CASE("end to end: the implication ranks first by default") {
  const Model m = fsm();
  const RankedReport r = localize(m, assertion(m), {5, 5, {}});
  REQUIRE(r.status == Status::Localized);
  REQUIRE_FALSE(r.ranking.empty());
  CHECK(r.ranking[0].expr == "s.transition = none => s in FSM.stop");
  CHECK(r.ranking[0].hint == std::optional<std::string>("=>"));
}

TEST_CASE("end to end: other seeds still point into the faulty conjunct") {
  const Model m = fsm();
  const SourceSpan faulty = fact_at_line(m, 19).span;
  for (std::uint64_t seed = 1; seed <= 7; ++seed) {
    INFO("seed " << seed);
    const RankedReport r = localize(m, assertion(m), {5, 5, {seed}});
    REQUIRE(r.status == Status::Localized);
    REQUIRE_FALSE(r.ranking.empty());
    CHECK(faulty.contains(r.ranking[0].span));
  }
}

TEST_CASE("unsat path: only the modified conjunct conflicts") {
  const Model m = fsm("fsm_unsat.rml");
  const RankedReport r = localize(m, assertion(m), {5, 5, {}});
  REQUIRE(r.status == Status::UnsatConflicts);
  REQUIRE_FALSE(r.ranking.empty());
  for (const auto& n : r.ranking) CHECK(n.span.start_line == 17);
  CHECK(r.ranking[0].expr == "all s: State | s.transition !in FSM.start");
  CHECK(r.ranking[0].total() == Rational(1));
  std::set<int> core_facts;
  for (const auto& g : r.core)
    if (g.kind == GroupKind::Fact) core_facts.insert(g.span.start_line);
  CHECK(core_facts.count(17) == 1);

  REQUIRE(r.pairs.size() == 1);
  const Instance& sat = r.pairs[0].sat;
  CHECK(conflicts_on(fact_at_line(m, 17), sat, r.diff.atoms));
  for (int line : {8, 11, 15}) {  // (a), (b), (c)
    INFO("line " << line);
    CHECK_FALSE(conflicts_on(fact_at_line(m, line), sat, r.diff.atoms));
  }
}

TEST_CASE("unsat path on a two-line contradiction") {
  const Model m = load_model("sig A {}\nfact {\n  some A\n}\nassert P { no A }\ncheck P for 2\n");
  const RankedReport r = localize(m, assertion(m, "P"), {2, 5, {}});
  REQUIRE(r.status == Status::UnsatConflicts);
  REQUIRE(r.ranking.size() >= 1);
  CHECK(r.ranking[0].expr == "some A");
  CHECK(r.ranking[0].span.start_line == 3);
}

TEST_CASE("no counterexample for the corrected model") {
  const Model m = fsm("fsm_fixed.rml");
  const RankedReport r = localize(m, assertion(m), {4, 5, {}});
  CHECK(r.status == Status::NoCounterexample);
  CHECK(r.ranking.empty());
  CHECK(generate_pairs(m, assertion(m), 3, 5).kind == PairOutcome::Kind::NoCex);
}
