#include "relloc/report.hpp"

#include <iomanip>
#include <ostream>

#include "relloc/instance_json.hpp"

namespace relloc {

namespace {

nlohmann::json rational_json(const Rational& q) { return {{"num", q.num()}, {"den", q.den()}}; }

std::vector<std::string> atom_names(const RankedReport& r) {
  std::vector<std::string> out;
  if (r.pairs.empty()) return out;
  const auto& universe = r.pairs.front().cex.universe;
  for (AtomId a : r.diff.atoms) out.push_back(universe[static_cast<std::size_t>(a)].name);
  return out;
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + x;
  return out;
}

}  // namespace

nlohmann::json span_to_json(const SourceSpan& s) {
  return {{"file", s.file},
          {"start_line", s.start_line},
          {"start_col", s.start_col},
          {"end_line", s.end_line},
          {"end_col", s.end_col}};
}

nlohmann::json report_to_json(const RankedReport& r) {
  nlohmann::json j;
  j["status"] = to_string(r.status);
  j["pairs_used"] = r.pairs.size();
  j["diff"] = {{"relations", r.diff.relations},
               {"atoms", atom_names(r)},
               {"relations_fallback", r.diff.relations_fallback},
               {"atoms_fallback", r.diff.atoms_fallback}};
  j["ranking"] = nlohmann::json::array();
  for (const auto& n : r.ranking) {
    j["ranking"].push_back({{"expr", n.expr},
                            {"span", span_to_json(n.span)},
                            {"score", rational_json(n.total())},
                            {"boolean", rational_json(n.boolean)},
                            {"relational", rational_json(n.relational)},
                            {"hint", n.hint ? nlohmann::json(*n.hint) : nlohmann::json(nullptr)}});
  }
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : r.pairs)
    j["pairs"].push_back({{"cex", instance_to_json(p.cex)},
                          {"sat", instance_to_json(p.sat)},
                          {"distance", p.distance}});
  if (!r.core.empty()) {
    j["core"] = nlohmann::json::array();
    for (const auto& g : r.core)
      j["core"].push_back({{"group", g.id},
                           {"kind", to_string(g.kind)},
                           {"label", g.label},
                           {"span", span_to_json(g.span)}});
  }
  return j;
}

void write_report_text(std::ostream& os, const RankedReport& r, std::optional<int> top) {
  os << "status: " << to_string(r.status) << '\n';
  if (r.status == Status::NoCounterexample) return;
  os << "pairs used: " << r.pairs.size() << '\n';
  os << "diff relations: " << join({r.diff.relations.begin(), r.diff.relations.end()})
     << (r.diff.relations_fallback ? " (union)" : "") << '\n';
  os << "diff atoms: " << join(atom_names(r)) << (r.diff.atoms_fallback ? " (union)" : "") << '\n';
  if (!r.core.empty()) {
    os << "unsat core:\n";
    for (const auto& g : r.core)
      os << "  " << to_string(g.kind) << ' ' << g.label << " at " << g.span.str() << '\n';
  }
  os << '\n' << std::left << std::setw(6) << "rank" << std::setw(8) << "score" << std::setw(6)
     << "hint" << "expression\n";
  const std::size_t limit = top ? static_cast<std::size_t>(std::max(0, *top)) : r.ranking.size();
  for (std::size_t i = 0; i < r.ranking.size() && i < limit; ++i) {
    const ScoredNode& n = r.ranking[i];
    os << std::left << std::setw(6) << (i + 1) << std::setw(8) << n.total().fixed(2) << std::setw(6)
       << (n.hint ? "(" + *n.hint + ")" : "") << n.expr << "  [" << n.span.str() << "]\n";
  }
}

}  // namespace relloc
