#include "relloc/circuit.hpp"

#include <algorithm>
#include <cstdlib>

namespace relloc {

Circuit::Circuit() {
  nodes_.push_back({NodeKind::Const, 0, {}});
  nodes_.push_back({NodeKind::Const, 0, {}});  // id 1: true
}

Circuit::Bit Circuit::input(int var) {
  auto [it, fresh] = inputs_.try_emplace(var, 0);
  if (fresh) {
    nodes_.push_back({NodeKind::Input, var, {}});
    it->second = static_cast<Bit>(nodes_.size() - 1);
  }
  return it->second;
}

Circuit::Bit Circuit::conj(std::vector<Bit> xs) {
  std::vector<Bit> kids;
  kids.reserve(xs.size());
  for (Bit x : xs) {
    if (x == kFalse) return kFalse;
    if (x == kTrue) continue;
    kids.push_back(x);
  }
  std::sort(kids.begin(), kids.end(), [](Bit a, Bit b) {
    return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
  });
  kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
  for (std::size_t i = 1; i < kids.size(); ++i)
    if (kids[i] == -kids[i - 1]) return kFalse;
  if (kids.empty()) return kTrue;
  if (kids.size() == 1) return kids[0];
  auto [it, fresh] = ands_.try_emplace(kids, 0);
  if (fresh) {
    nodes_.push_back({NodeKind::And, 0, kids});
    it->second = static_cast<Bit>(nodes_.size() - 1);
  }
  return it->second;
}

Circuit::Bit Circuit::disj(std::vector<Bit> xs) {
  for (Bit& x : xs) x = -x;
  return -conj(std::move(xs));
}

Circuit::Bit Circuit::iff(Bit a, Bit b) {
  if (a == b) return kTrue;
  if (a == -b) return kFalse;
  if (a == kTrue) return b;
  if (a == kFalse) return -b;
  if (b == kTrue) return a;
  if (b == kFalse) return -a;
  return conj(disj(-a, b), disj(a, -b));
}

bool Circuit::evaluate(Bit b, const std::vector<bool>& inputs) const {
  const Node& n = node(b);
  bool v = true;
  switch (n.kind) {
    case NodeKind::Const: v = true; break;
    case NodeKind::Input: v = inputs.at(static_cast<std::size_t>(n.var)); break;
    case NodeKind::And:
      for (Bit c : n.children) {
        if (!evaluate(c, inputs)) {
          v = false;
          break;
        }
      }
      break;
  }
  return b < 0 ? !v : v;
}

}  // namespace relloc
