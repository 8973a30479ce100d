#include <doctest.h>

#include "generators.hpp"
#include "support.hpp"

using namespace relloc;
using namespace relloc::testsupport;

namespace {

struct Pair {
  Model m = fsm();
  Instance cex = fixture(m, "fsm_cex.json");
  Instance sat = fixture(m, "fsm_sat.json");
  AtomId atom(const std::string& name) const { return *cex.find_atom(name); }
};

std::set<std::string> names(const Instance& inst, const TupleSet& s) {
  std::set<std::string> out;
  for (AtomId a : s.atoms()) out.insert(inst.universe[static_cast<std::size_t>(a)].name);
  return out;
}

}  // namespace

TEST_CASE("relational evaluation on the example pair") {
  const Pair p;
  const Binding s1{{"s", p.atom("State1")}};
  const Binding s3{{"s", p.atom("State3")}};
  const Formula& body = *p.m.facts[5].formula->sub;  // s.transition = none => s in FSM.stop
  const RelExpr& s_transition = *body.sub->left;

  CHECK(names(p.cex, eval_rel(s_transition, p.cex, s1)) == std::set<std::string>{"State2"});
  CHECK(names(p.sat, eval_rel(s_transition, p.sat, s1)) == std::set<std::string>{"State2"});

  const RelExpr& reach = *p.m.facts[7].formula->sub->right;  // s.*transition
  CHECK(names(p.sat, eval_rel(reach, p.sat, s3)) == std::set<std::string>{"State3"});
  CHECK(names(p.cex, eval_rel(reach, p.cex, s3)) == std::set<std::string>{"State1", "State2", "State3"});

  const Formula& empty_test = *body.sub;  // s.transition = none
  CHECK_FALSE(eval_formula(empty_test, p.cex, s3));
  CHECK(eval_formula(empty_test, p.sat, s3));
}

TEST_CASE("model and property satisfaction of the example pair") {
  const Pair p;
  CHECK(satisfies_model(p.m, p.cex));
  CHECK(satisfies_model(p.m, p.sat));
  CHECK_FALSE(eval_formula(assertion(p.m), p.cex, {}));
  CHECK(eval_formula(assertion(p.m), p.sat, {}));
}

TEST_CASE("involved atoms: binding atoms plus leaf values") {
  const Pair p;
  const Formula& body = *p.m.facts[5].formula->sub;
  const Binding s1{{"s", p.atom("State1")}};
  const Binding s3{{"s", p.atom("State3")}};
  auto ids = [&](std::initializer_list<const char*> xs) {
    std::set<AtomId> out;
    for (const char* x : xs) out.insert(p.atom(x));
    return out;
  };
  CHECK(involved_atoms(body, p.cex, s1) == ids({"State1", "State2", "State3"}));
  CHECK(involved_atoms(body, p.cex, s3) == ids({"State1", "State3"}));
  CHECK(involved_atoms(body, p.sat, s3) == ids({"State3"}));
  CHECK(involved_atoms(*body.sub->left, p.cex, s3) == ids({"State1", "State3"}));
  CHECK(involved_atoms(*body.sub->right, p.cex, s3).empty());  // none
  CHECK(involved_atoms(*body.sub2->left, p.cex, s3) == ids({"State3"}));  // s
}

TEST_CASE("guarded instantiation strips the outer chain") {
  const Pair p;
  const Conjunct& c = p.m.facts[0];  // all start1, start2: FSM.start | start1 = start2
  const std::vector<AtomId> atoms{p.atom("State0"), p.atom("State0")};
  const auto inst = guarded_instantiate(c, atoms, p.cex.universe);
  REQUIRE(inst);
  CHECK(inst->guards.size() == 2);
  CHECK(inst->body->kind == FormulaKind::Equal);
  CHECK(guards_hold(*inst, p.cex));
  CHECK(eval_formula(*inst->body, p.cex, inst->binding));

  const std::vector<AtomId> off{p.atom("State1"), p.atom("State0")};
  const auto vacuous = guarded_instantiate(c, off, p.cex.universe);
  REQUIRE(vacuous);
  CHECK_FALSE(guards_hold(*vacuous, p.cex));

  const std::vector<AtomId> wrong_sort{p.atom("FSM0"), p.atom("State0")};
  CHECK_FALSE(guarded_instantiate(c, wrong_sort, p.cex.universe));
  const std::vector<AtomId> too_short{p.atom("State0")};
  CHECK_FALSE(guarded_instantiate(c, too_short, p.cex.universe));
}

TEST_CASE("declaration checks") {
  const Pair p;
  Instance bad = p.cex;
  bad.sigs.at("FSM") = TupleSet(1, bad.width());  // one sig with no atom
  CHECK_FALSE(satisfies_declarations(p.m, bad));
  Instance ill_typed = p.cex;
  ill_typed.fields.at("transition").insert({p.atom("FSM0"), p.atom("State0")});
  CHECK_FALSE(satisfies_declarations(p.m, ill_typed));
  const Model lone = load_model("sig A { f: lone A }\n");
  Instance two = empty_instance(lone, universe_for_scope(lone, 2));
  two.sigs.at("A").insert({0});
  two.sigs.at("A").insert({1});
  two.fields.at("f").insert({0, 0});
  CHECK(satisfies_declarations(lone, two));
  two.fields.at("f").insert({0, 1});
  CHECK_FALSE(satisfies_declarations(lone, two));
}

TEST_CASE("enumeration oracle") {
  SUBCASE("relation-variable counts") {
    CHECK(relation_variable_count(fsm(), 3) == 18);
    CHECK(relation_variable_count(fsm(), 5) == 40);
  }
  SUBCASE("budget is enforced") {
    CHECK_THROWS_AS(enumerate_instances(fsm(), 4, nullptr), EnumerationBudgetExceeded);
  }
  SUBCASE("corrected model has no violating instance at scope 3") {
    const Model m = fsm("fsm_fixed.rml");
    const FormPtr neg = negate(m.asserts.at("NoStopTransition").body);
    CHECK(enumerate_instances(m, 3, neg.get()).empty());
    CHECK_FALSE(enumerate_instances(m, 3, nullptr).empty());
  }
  SUBCASE("original model has violating instances at scope 3") {
    const Model m = fsm();
    const FormPtr neg = negate(m.asserts.at("NoStopTransition").body);
    const auto cexs = enumerate_instances(m, 3, neg.get());
    CHECK_FALSE(cexs.empty());
    for (const auto& inst : cexs) {
      CHECK(satisfies_model(m, inst));
      CHECK_FALSE(eval_formula(assertion(m), inst, {}));
    }
  }
  SUBCASE("small model counted by hand") {
    // lone sig with a set self-field at scope 2: empty, or one of two atoms
    // with 2 field choices each.
    const Model m = load_model("lone sig A { f: set A }\n");
    CHECK(enumerate_instances(m, 2, nullptr).size() == 5);
  }
}

TEST_CASE("property: quantifier laws hold on random instances") {
  testgen::Rng rng(99);
  const Model m = load_model("sig A { f: set B, g: set A }\nsig B {}\n");
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    testgen::FormulaGen gen(rng);
    FormPtr body;
    try {
      body = parse_formula(m, "all x: A | " + gen.formula(1, {"x"}));
    } catch (const FrontendError&) {
      continue;
    }
    const FormPtr dual = parse_formula(m, "!(some x: A | !(" + to_string(*body->sub) + "))");
    const FormPtr none = parse_formula(m, "no x: A | !(" + to_string(*body->sub) + ")");
    Instance inst = empty_instance(m, universe_for_scope(m, 2));
    for (AtomId a = 0; a < inst.width(); ++a) {
      if (testgen::coin(rng)) inst.sigs.at(inst.universe[static_cast<std::size_t>(a)].sig).insert({a});
    }
    for (AtomId a = 0; a < 2; ++a)
      for (AtomId b = 0; b < 4; ++b) {
        if (b >= 2 && testgen::coin(rng)) inst.fields.at("f").insert({a, b});
        if (b < 2 && testgen::coin(rng)) inst.fields.at("g").insert({a, b});
      }
    CHECK(eval_formula(*body, inst, {}) == eval_formula(*dual, inst, {}));
    CHECK(eval_formula(*body, inst, {}) == eval_formula(*none, inst, {}));
    ++checked;
  }
  CHECK(checked > 100);
}
