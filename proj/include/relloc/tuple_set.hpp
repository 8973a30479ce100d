#pragma once

#include <cstdint>
#include <set>
#include <vector>

namespace relloc {

/// Index of an atom inside an instance universe.
using AtomId = int;
using Tuple = std::vector<AtomId>;

/// A set of same-arity tuples over a universe of `width` atoms.
///
/// Tuples are stored as sorted mixed-radix keys (first column most
/// significant), so iteration order equals lexicographic tuple order.
class TupleSet {
 public:
  using Key = std::uint64_t;

  TupleSet() = default;
  TupleSet(int arity, int width) : arity_(arity), width_(width) {}

  static TupleSet from_tuples(int arity, int width, const std::vector<Tuple>& tuples);
  static TupleSet from_atoms(int width, const std::set<AtomId>& atoms);

  int arity() const { return arity_; }
  int width() const { return width_; }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }

  Key key_of(const Tuple& t) const;
  Tuple tuple_of(Key k) const;

  void insert(const Tuple& t);
  void insert_key(Key k);
  bool contains(const Tuple& t) const;
  bool contains_key(Key k) const;

  const std::vector<Key>& keys() const { return keys_; }
  std::vector<Tuple> tuples() const;
  /// Every atom occurring in any column of any tuple.
  std::set<AtomId> atoms() const;

  TupleSet united(const TupleSet& o) const;
  TupleSet minus(const TupleSet& o) const;
  TupleSet intersected(const TupleSet& o) const;
  TupleSet joined(const TupleSet& o) const;
  TupleSet product(const TupleSet& o) const;
  TupleSet transposed() const;
  TupleSet closure() const;

  bool subset_of(const TupleSet& o) const;
  bool operator==(const TupleSet& o) const {
    return arity_ == o.arity_ && keys_ == o.keys_;
  }
  bool operator<(const TupleSet& o) const {
    return arity_ != o.arity_ ? arity_ < o.arity_ : keys_ < o.keys_;
  }

 private:
  static TupleSet from_sorted(int arity, int width, std::vector<Key> keys);

  int arity_ = 1;
  int width_ = 0;
  std::vector<Key> keys_;
};

}  // namespace relloc
