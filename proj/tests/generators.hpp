// Random inputs for property tests: CNF formulas and small relational models.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "relloc/evaluator.hpp"
#include "relloc/frontend.hpp"
#include "relloc/grounder.hpp"
#include "relloc/model.hpp"

namespace relloc::testgen {

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline std::vector<Clause> random_cnf(Rng& rng, int vars, int clauses, int width = 3) {
  std::vector<Clause> out;
  for (int i = 0; i < clauses; ++i) {
    Clause c;
    while (static_cast<int>(c.size()) < width) {
      const int v = 1 + pick(rng, vars);
      if (std::any_of(c.begin(), c.end(), [&](int l) { return std::abs(l) == v; })) continue;
      c.push_back(coin(rng) ? v : -v);
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline bool satisfies(const std::vector<Clause>& cnf, std::uint64_t bits) {
  for (const auto& c : cnf) {
    bool ok = false;
    for (int l : c) {
      const bool v = (bits >> (std::abs(l) - 1)) & 1;
      if (v == (l > 0)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

inline bool brute_force_sat(const std::vector<Clause>& cnf, int vars) {
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << vars); ++bits)
    if (satisfies(cnf, bits)) return true;
  return false;
}

/// Text generator for formulas over a fixed vocabulary. Two sigs `A` and
/// `B`, fields `f: A -> B` and `g: A -> A`; every emitted formula is fully
/// parenthesized so it stays on one conjunct line.
class FormulaGen {
 public:
  explicit FormulaGen(Rng& rng) : rng_(rng) {}

  std::string unary(int depth, const std::vector<std::string>& vars) {
    const int choice = depth <= 0 ? pick(rng_, 3) : pick(rng_, 9);
    switch (choice) {
      case 0: return coin(rng_) ? "A" : "B";
      case 1:
        if (!vars.empty()) return vars[static_cast<std::size_t>(pick(rng_, static_cast<int>(vars.size())))];
        return "A";
      case 2: return coin(rng_, 0.2) ? "none" : (coin(rng_) ? "A" : "B");
      case 3: return "(" + unary(depth - 1, vars) + " + " + unary(depth - 1, vars) + ")";
      case 4: return "(" + unary(depth - 1, vars) + " & " + unary(depth - 1, vars) + ")";
      case 5: return "(" + unary(depth - 1, vars) + " - " + unary(depth - 1, vars) + ")";
      case 6: return "(" + unary(depth - 1, vars) + "." + binary(depth - 1) + ")";
      case 7: return "(" + binary(depth - 1) + "." + unary(depth - 1, vars) + ")";
      default: return "(" + unary(depth - 1, vars) + "." + binary(depth - 1) + ")";
    }
  }

  std::string binary(int depth) {
    const int choice = depth <= 0 ? pick(rng_, 2) : pick(rng_, 8);
    switch (choice) {
      case 0: return "f";
      case 1: return "g";
      case 2: return "~" + binary(depth - 1);
      case 3: return "^" + binary(depth - 1);
      case 4: return "(" + binary(depth - 1) + " + " + binary(depth - 1) + ")";
      case 5: return "(" + binary(depth - 1) + "." + binary(depth - 1) + ")";
      case 6: return "(" + binary(depth - 1) + " - " + binary(depth - 1) + ")";
      default: return "*g";
    }
  }

  std::string formula(int depth, std::vector<std::string> vars = {}) {
    const int choice = depth <= 0 ? pick(rng_, 3) : pick(rng_, 10);
    const int e = std::max(0, depth - 1);
    static const char* const kMult[] = {"no", "some", "lone", "one"};
    static const char* const kCmp[] = {" in ", " = ", " !in ", " != "};
    static const char* const kConn[] = {" && ", " || ", " => ", " <=> "};
    switch (choice) {
      case 0: return std::string(kMult[pick(rng_, 4)]) + " " + unary(e, vars);
      case 1: return "(" + unary(e, vars) + kCmp[pick(rng_, 4)] + unary(e, vars) + ")";
      case 2: return "(" + binary(e) + kCmp[pick(rng_, 2)] + binary(e) + ")";
      case 3:
      case 4: return "(" + formula(depth - 1, vars) + kConn[pick(rng_, 4)] + formula(depth - 1, vars) + ")";
      case 5: return "!" + formula(depth - 1, vars);
      default: {
        static const char* const kQ[] = {"all", "some", "no"};
        const std::string v = "x" + std::to_string(vars.size());
        const std::string bound = coin(rng_, 0.7) ? (coin(rng_) ? "A" : "B") : unary(0, vars);
        vars.push_back(v);
        return std::string("(") + kQ[pick(rng_, 3)] + " " + v + ": " + bound + " | " +
               formula(depth - 1, vars) + ")";
      }
    }
  }

 private:
  Rng& rng_;
};

struct RandomModel {
  std::string source;
  Model model;
  FormPtr property;
  int scope = 2;
};

/// A two-sig model with up to `facts` random facts and a random property.
/// Keeps the relation-variable count within `max_vars` at the chosen scope.
inline RandomModel random_model(Rng& rng, int max_vars = 24, int facts = 2) {
  static const char* const kSigMult[] = {"", "", "lone ", "some ", "one "};
  static const char* const kFieldMult[] = {"set", "set", "lone", "one", "some"};
  for (;;) {
    RandomModel rm;
    rm.scope = 2 + pick(rng, 2);
    const std::string a_mult = kSigMult[pick(rng, 5)];
    const std::string b_mult = kSigMult[pick(rng, 5)];
    rm.source = a_mult + "sig A { f: " + kFieldMult[pick(rng, 5)] + " B, g: " + kFieldMult[pick(rng, 5)] +
                " A }\n" + b_mult + "sig B {}\n";
    FormulaGen gen(rng);
    const int nfacts = pick(rng, facts + 1);
    if (nfacts > 0) {
      rm.source += "fact {\n";
      for (int i = 0; i < nfacts; ++i) rm.source += "  " + gen.formula(2) + "\n";
      rm.source += "}\n";
    }
    rm.source += "assert P {\n  " + gen.formula(2) + "\n}\n";
    rm.source += "check P for " + std::to_string(rm.scope) + "\n";
    rm.model = load_model(rm.source, "random.rml");
    if (static_cast<int>(relation_variable_count(rm.model, rm.scope)) > max_vars) continue;
    rm.property = rm.model.asserts.at("P").body;
    return rm;
  }
}

}  // namespace relloc::testgen
