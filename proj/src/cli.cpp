#include "relloc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>

#include "relloc/evaluator.hpp"
#include "relloc/frontend.hpp"
#include "relloc/grounder.hpp"
#include "relloc/instance_json.hpp"
#include "relloc/localizer.hpp"
#include "relloc/maxsat.hpp"
#include "relloc/report.hpp"

namespace relloc {

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::optional<std::string> command;
  int pairs = 5;
  std::optional<int> scope;
  bool json = false;
  std::optional<int> top;
  std::vector<std::string> fixture;
  std::optional<std::string> emit_cnf;
  std::optional<std::string> pred;
  int count = 1;
  std::uint64_t seed = 0;
};

const Command& pick_command(const Model& m, const RunConfig& cfg, CommandKind kind) {
  std::vector<const Command*> matches;
  for (const auto& c : m.commands)
    if (c.kind == kind && (!cfg.command || c.target == *cfg.command)) matches.push_back(&c);
  const char* what = kind == CommandKind::Check ? "check" : "run";
  if (matches.empty())
    throw InputError(cfg.command ? std::string("no ") + what + " command named '" + *cfg.command + "'"
                                 : std::string("model has no ") + what + " command");
  if (matches.size() > 1 && !cfg.command)
    throw InputError(std::string("model has several ") + what + " commands; pick one with --command");
  return *matches.front();
}

struct CheckTarget {
  const Formula* property;
  int scope;
};

CheckTarget check_target(const Model& m, const RunConfig& cfg) {
  const Command& c = pick_command(m, cfg, CommandKind::Check);
  auto it = m.asserts.find(c.target);
  if (it == m.asserts.end()) throw InputError("unknown assertion '" + c.target + "'");
  return {it->second.body.get(), cfg.scope.value_or(c.scope)};
}

void emit_cnf(const RunConfig& cfg, const GroundProblem& p) {
  if (!cfg.emit_cnf) return;
  std::ofstream f(*cfg.emit_cnf);
  if (!f) throw InputError("cannot write '" + *cfg.emit_cnf + "'");
  write_dimacs(f, p);
}

void write_core(std::ostream& os, const GroundProblem& p, const std::vector<int>& groups) {
  os << "unsat core:\n";
  for (int g : groups) {
    const ClauseGroup& grp = p.groups[static_cast<std::size_t>(g)];
    os << "  " << to_string(grp.kind) << ' ' << grp.label << " at " << grp.span.str() << '\n';
  }
}

int cmd_parse(const RunConfig& cfg, std::ostream& out) {
  const Model m = load_model_file(cfg.input);
  if (cfg.json) {
    nlohmann::json j;
    j["sigs"] = nlohmann::json::array();
    for (const auto& s : m.sigs) j["sigs"].push_back(s.name);
    j["facts"] = nlohmann::json::array();
    for (const auto& c : m.facts)
      j["facts"].push_back({{"owner", c.owner}, {"expr", to_string(*c.formula)}, {"span", span_to_json(c.span)}});
    j["commands"] = nlohmann::json::array();
    for (const auto& c : m.commands)
      j["commands"].push_back({{"kind", c.kind == CommandKind::Check ? "check" : "run"},
                               {"target", c.target},
                               {"scope", c.scope}});
    out << j.dump(2) << '\n';
    return kExitNoViolation;
  }
  out << m.sigs.size() << " sigs, " << m.fields().size() << " fields, " << m.facts.size()
      << " fact conjuncts, " << m.commands.size() << " commands\n";
  for (const auto& c : m.facts) out << "  " << c.span.str() << "  " << to_string(*c.formula) << '\n';
  return kExitNoViolation;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const Model m = load_model_file(cfg.input);
  const CheckTarget t = check_target(m, cfg);
  const GroundProblem neg = ground(m, t.property, true, t.scope);
  emit_cnf(cfg, neg);
  GroupedSolver gs = load_grouped(neg, {cfg.seed});
  if (gs.solve() == Solver::Result::Unsat) {
    out << "no counterexample (assertion holds at scope " << t.scope << ")\n";
    return kExitNoViolation;
  }
  const Instance cex = decode(gs.solver.model(), neg.var_map, neg.bounds);
  if (cfg.json) {
    out << nlohmann::json{{"status", "counterexample"}, {"instance", instance_to_json(cex)}}.dump(2) << '\n';
  } else {
    out << "counterexample found at scope " << t.scope << ":\n" << instance_to_json(cex).dump(2) << '\n';
  }
  return kExitViolation;
}

Instance load_fixture(const std::string& path, const Model& m) {
  try {
    return load_instance_file(path, m);
  } catch (const InstanceFormatError& e) {
    throw InstanceFormatError(path + ": " + e.what());
  }
}

int cmd_localize(const RunConfig& cfg, std::ostream& out) {
  const Model m = load_model_file(cfg.input);
  const CheckTarget t = check_target(m, cfg);
  if (cfg.emit_cnf) emit_cnf(cfg, ground(m, t.property, true, t.scope));

  RankedReport rep;
  if (!cfg.fixture.empty()) {
    const Instance cex = load_fixture(cfg.fixture[0], m);
    const Instance sat = load_fixture(cfg.fixture[1], m);
    rep = localize_fixture(m, *t.property, cex, sat);
  } else {
    rep = localize(m, *t.property, {t.scope, cfg.pairs, {cfg.seed}});
  }

  if (cfg.json) {
    out << report_to_json(rep).dump(2) << '\n';
  } else if (rep.status == Status::NoCounterexample) {
    out << "no counterexample (assertion holds at scope " << t.scope << ")\n";
  } else {
    write_report_text(out, rep, cfg.top);
  }
  return rep.status == Status::NoCounterexample ? kExitNoViolation : kExitViolation;
}

int cmd_instances(const RunConfig& cfg, std::ostream& out) {
  const Model m = load_model_file(cfg.input);
  std::string pred;
  int scope = cfg.scope.value_or(3);
  if (cfg.pred) {
    pred = *cfg.pred;
  } else {
    const Command& c = pick_command(m, cfg, CommandKind::Run);
    pred = c.target;
    scope = cfg.scope.value_or(c.scope);
  }
  auto it = m.preds.find(pred);
  if (it == m.preds.end()) throw InputError("unknown predicate '" + pred + "'");
  if (cfg.count <= 0) return kExitNoViolation;

  const GroundProblem p = ground(m, nullptr, false, scope, it->second);
  emit_cnf(cfg, p);
  GroupedSolver gs = load_grouped(p, {cfg.seed});
  int found = 0;
  while (found < cfg.count) {
    if (gs.solve() == Solver::Result::Unsat) {
      if (found > 0) break;
      out << "no instance of '" << pred << "' at scope " << scope << '\n';
      write_core(out, p, gs.core_groups(minimize_core(gs.solver, gs.solver.core())));
      return kExitViolation;
    }
    const std::vector<bool> bits = gs.solver.model();
    out << instance_to_json(decode(bits, p.var_map, p.bounds)).dump() << '\n';
    gs.solver.add_clause(blocking_clause(bits, p.var_map));
    ++found;
  }
  return kExitNoViolation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bounded relational model checker and fault localizer", "relloc"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("file", cfg.input, "Model file")->required();
    sub->add_option("--command", cfg.command, "Command (assertion or predicate name) to use");
    sub->add_option("--scope", cfg.scope, "Scope override")->check(CLI::PositiveNumber);
    sub->add_flag("--json", cfg.json, "JSON output");
    sub->add_option("--emit-cnf", cfg.emit_cnf, "Write the grounded CNF in DIMACS format");
    sub->add_option("--seed", cfg.seed, "Solver seed (0 keeps the default order)");
  };
  CLI::App* parse_cmd = app.add_subcommand("parse", "Parse and resolve a model");
  parse_cmd->add_option("file", cfg.input, "Model file")->required();
  parse_cmd->add_flag("--json", cfg.json, "JSON output");
  CLI::App* check_cmd = app.add_subcommand("check", "Search for a counterexample");
  add_common(check_cmd);
  CLI::App* loc_cmd = app.add_subcommand("localize", "Rank suspicious expressions");
  add_common(loc_cmd);
  loc_cmd->add_option("--pairs", cfg.pairs, "Counterexample/instance pairs")->check(CLI::PositiveNumber);
  loc_cmd->add_option("--top", cfg.top, "Show only the first N rows")->check(CLI::NonNegativeNumber);
  loc_cmd->add_option("--fixture", cfg.fixture, "Counterexample and satisfying instance JSON files")
      ->expected(2);
  CLI::App* inst_cmd = app.add_subcommand("instances", "Enumerate instances of a predicate");
  add_common(inst_cmd);
  inst_cmd->add_option("-n", cfg.count, "Number of instances")->check(CLI::NonNegativeNumber);
  inst_cmd->add_option("--pred", cfg.pred, "Predicate to satisfy");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitNoViolation : kExitInputError;
  }

  try {
    if (parse_cmd->parsed()) return cmd_parse(cfg, out);
    if (check_cmd->parsed()) return cmd_check(cfg, out);
    if (loc_cmd->parsed()) return cmd_localize(cfg, out);
    return cmd_instances(cfg, out);
  } catch (const FrontendError& e) {
    for (const auto& d : e.diagnostics()) err << d.str() << '\n';
    return kExitInputError;
  } catch (const ResolutionError& e) {
    err << e.span().str() << ": error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const InstanceFormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const FixtureError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  }
}

}  // namespace relloc
