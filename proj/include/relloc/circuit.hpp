#pragma once

#include <map>
#include <vector>

namespace relloc {

/// Hash-consed AND/NOT circuit with constant folding. A `Bit` is a signed
/// node id: negative ids are negations, 1 is the constant true.
class Circuit {
 public:
  using Bit = int;
  static constexpr Bit kTrue = 1;
  static constexpr Bit kFalse = -1;

  enum class NodeKind { Const, Input, And };
  struct Node {
    NodeKind kind;
    int var = 0;                // Input
    std::vector<Bit> children;  // And
  };

  Circuit();

  Bit input(int var);
  Bit conj(std::vector<Bit> xs);
  Bit disj(std::vector<Bit> xs);
  Bit conj(Bit a, Bit b) { return conj(std::vector<Bit>{a, b}); }
  Bit disj(Bit a, Bit b) { return disj(std::vector<Bit>{a, b}); }
  Bit implies(Bit a, Bit b) { return disj(-a, b); }
  Bit iff(Bit a, Bit b);

  static bool is_const(Bit b) { return b == kTrue || b == kFalse; }
  const Node& node(Bit b) const { return nodes_[static_cast<std::size_t>(b < 0 ? -b : b)]; }
  std::size_t size() const { return nodes_.size() - 1; }

  /// Value of `b` given input values indexed by variable id.
  bool evaluate(Bit b, const std::vector<bool>& inputs) const;

 private:
  std::vector<Node> nodes_;  // index 0 unused
  std::map<int, Bit> inputs_;
  std::map<std::vector<Bit>, Bit> ands_;
};

}  // namespace relloc
