#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "relloc/cli.hpp"
#include "support.hpp"

using namespace relloc;
using namespace relloc::testsupport;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

/// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("relloc_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string write(const std::string& name, const std::string& text) const {
    const fs::path p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

Rational rational(const nlohmann::json& j) { return {j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>()}; }

const std::string kModel = model_path("fsm.rml");
const std::string kCex = model_path("fsm_cex.json");
const std::string kSat = model_path("fsm_sat.json");

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run({"check", kModel}).code == kExitViolation);
  CHECK(run({"check", model_path("fsm_fixed.rml"), "--scope", "4"}).code == kExitNoViolation);
  CHECK(run({"localize", model_path("fsm_fixed.rml"), "--scope", "3"}).code == kExitNoViolation);
  CHECK(run({"localize", kModel}).code == kExitViolation);
  CHECK(run({"parse", kModel}).code == kExitNoViolation);
  CHECK(run({"parse", "/nonexistent.rml"}).code == kExitInputError);
  CHECK(run({"frobnicate"}).code == kExitInputError);
  CHECK(run({"check", kModel, "--scope", "0"}).code == kExitInputError);
  CHECK(run({"check", kModel, "--command", "Nope"}).code == kExitInputError);
}

TEST_CASE("the installed binary reports the same exit codes") {
  auto status = [](const std::string& args) {
    const int raw = std::system((std::string(RELLOC_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("check " + kModel) == kExitViolation);
  CHECK(status("check " + model_path("fsm_fixed.rml") + " --scope 3") == kExitNoViolation);
  CHECK(status("parse /nonexistent.rml") == kExitInputError);
}

TEST_CASE("malformed model: diagnostics with a location") {
  const TempDir tmp;
  const std::string bad = tmp.write("bad.rml", "sig A {\n  f: set B\n}\n");
  const Run r = run({"check", bad});
  CHECK(r.code == kExitInputError);
  CHECK(r.err.find("bad.rml:2") != std::string::npos);
  const std::string syntax = tmp.write("syntax.rml", "sig A {}\nfact { some A \n");
  CHECK(run({"parse", syntax}).code == kExitInputError);
}

TEST_CASE("fixture localization: text table") {
  const Run r = run({"localize", kModel, "--fixture", kCex, kSat});
  REQUIRE(r.code == kExitViolation);
  const auto ls = lines(r.out);
  CHECK(ls[0] == "status: localized");
  std::vector<std::string> scores;
  bool header = false;
  for (const auto& l : ls) {
    if (l.rfind("rank", 0) == 0) {
      header = true;
      continue;
    }
    if (!header || l.empty()) continue;
    std::istringstream is(l);
    std::string rank;
    std::string score;
    is >> rank >> score;
    scores.push_back(score);
  }
  REQUIRE(scores.size() >= 4);
  CHECK(std::vector<std::string>(scores.begin(), scores.begin() + 4) ==
        std::vector<std::string>{"1.58", "1.25", "0.50", "0.50"});
  CHECK(r.out.find("(=>)  s.transition = none => s in FSM.stop") != std::string::npos);

  const Run top = run({"localize", kModel, "--fixture", kCex, kSat, "--top", "2"});
  const auto tl = lines(top.out);
  CHECK(tl.back().rfind("2 ", 0) == 0);
}

TEST_CASE("fixture localization: JSON schema and agreement with text") {
  const Run r = run({"localize", kModel, "--fixture", kCex, kSat, "--json"});
  REQUIRE(r.code == kExitViolation);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("status") == "localized");
  CHECK(j.at("pairs_used") == 1);
  CHECK(j.at("diff").at("relations") == nlohmann::json::array({"stop", "transition"}));
  CHECK(j.at("diff").at("atoms") == nlohmann::json::array({"State1", "State3"}));
  const auto& ranking = j.at("ranking");
  REQUIRE(ranking.size() >= 4);
  const auto& first = ranking[0];
  CHECK(first.at("expr") == "s.transition = none => s in FSM.stop");
  CHECK(rational(first.at("score")) == Rational(19, 12));
  CHECK(rational(first.at("boolean")) == Rational(1));
  CHECK(rational(first.at("relational")) == Rational(7, 12));
  CHECK(first.at("hint") == "=>");
  CHECK(first.at("span").at("start_line") == 19);
  CHECK(ranking[1].at("hint").is_null());

  const auto text = lines(run({"localize", kModel, "--fixture", kCex, kSat}).out);
  std::size_t row = 0;
  for (const auto& l : text) {
    if (l.empty() || !std::isdigit(static_cast<unsigned char>(l[0]))) continue;
    REQUIRE(row < ranking.size());
    std::istringstream is(l);
    std::string rank;
    std::string score;
    is >> rank >> score;
    CHECK(score == rational(ranking[row].at("score")).fixed(2));
    CHECK(l.find(ranking[row].at("expr").get<std::string>()) != std::string::npos);
    ++row;
  }
  CHECK(row == ranking.size());
}

TEST_CASE("invalid fixtures are input errors") {
  const TempDir tmp;
  CHECK(run({"localize", kModel, "--fixture", kSat, kCex}).code == kExitInputError);  // swapped
  const std::string junk = tmp.write("junk.json", "{ not json");
  CHECK(run({"localize", kModel, "--fixture", junk, kSat}).code == kExitInputError);
  const std::string unknown = tmp.write("unknown.json", R"({"universe": ["Nope0"], "sigs": {}, "fields": {}})");
  CHECK(run({"localize", kModel, "--fixture", unknown, kSat}).code == kExitInputError);
  CHECK(run({"localize", kModel, "--fixture", kCex}).code == kExitInputError);
}

TEST_CASE("unsat-conflicts report") {
  const Run r = run({"localize", model_path("fsm_unsat.rml"), "--json"});
  REQUIRE(r.code == kExitViolation);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("status") == "unsat-conflicts");
  CHECK(j.at("ranking").at(0).at("span").at("start_line") == 17);
  bool has_core_fact = false;
  for (const auto& g : j.at("core"))
    if (g.at("kind") == "fact" && g.at("span").at("start_line") == 17) has_core_fact = true;
  CHECK(has_core_fact);
}

TEST_CASE("emitted CNF header matches the grounding") {
  const TempDir tmp;
  const std::string out = tmp.file("p.cnf");
  REQUIRE(run({"check", kModel, "--scope", "3", "--emit-cnf", out}).code == kExitViolation);
  const Model m = fsm();
  const GroundProblem g = ground(m, &assertion(m), true, 3);
  const auto ls = lines(slurp(out));
  REQUIRE_FALSE(ls.empty());
  CHECK(ls[0] == "p cnf " + std::to_string(g.num_vars) + " " + std::to_string(g.clauses.size()));
}

TEST_CASE("instances: enumeration, zero count and unsatisfiable predicates") {
  const TempDir tmp;
  const std::string model = tmp.write(
      "fsm_run.rml", slurp(kModel) + "\npred Small {\n  some State\n}\nrun Small for 4\n");
  const Run r = run({"instances", model, "-n", "3"});
  REQUIRE(r.code == kExitNoViolation);
  const Model m = load_model_file(model);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 3);
  std::set<Instance> seen;
  for (const auto& l : ls) {
    const Instance inst = instance_from_json(nlohmann::json::parse(l), m);
    CHECK(satisfies_model(m, inst));
    CHECK_FALSE(inst.sigs.at("State").empty());
    seen.insert(inst);
  }
  CHECK(seen.size() == 3);

  const Run none = run({"instances", model, "-n", "0"});
  CHECK(none.code == kExitNoViolation);
  CHECK(none.out.empty());

  const std::string conflicting = tmp.write("conflict.rml", "sig A {}\nfact {\n  some A\n}\npred Empty {\n  no A\n}\nrun Empty for 2\n");
  const Run c = run({"instances", conflicting, "-n", "1"});
  CHECK(c.code == kExitViolation);
  CHECK(c.out.find("no instance of 'Empty' at scope 2") != std::string::npos);
  CHECK(c.out.find(":3:") != std::string::npos);
  CHECK(c.out.find(":6:") != std::string::npos);
  CHECK(run({"instances", conflicting, "--pred", "Missing"}).code == kExitInputError);
}
