#include "relloc/tuple_set.hpp"

#include <algorithm>
#include <cassert>
#include <iterator>
#include <map>

namespace relloc {

TupleSet TupleSet::from_sorted(int arity, int width, std::vector<Key> keys) {
  TupleSet s(arity, width);
  s.keys_ = std::move(keys);
  return s;
}

TupleSet TupleSet::from_tuples(int arity, int width, const std::vector<Tuple>& tuples) {
  TupleSet s(arity, width);
  for (const auto& t : tuples) s.insert(t);
  return s;
}

TupleSet TupleSet::from_atoms(int width, const std::set<AtomId>& atoms) {
  std::vector<Key> keys(atoms.begin(), atoms.end());
  return from_sorted(1, width, std::move(keys));
}

TupleSet::Key TupleSet::key_of(const Tuple& t) const {
  assert(static_cast<int>(t.size()) == arity_);
  Key k = 0;
  for (AtomId a : t) {
    assert(a >= 0 && a < width_);
    k = k * static_cast<Key>(width_) + static_cast<Key>(a);
  }
  return k;
}

Tuple TupleSet::tuple_of(Key k) const {
  Tuple t(arity_);
  for (int i = arity_ - 1; i >= 0; --i) {
    t[i] = static_cast<AtomId>(k % static_cast<Key>(width_));
    k /= static_cast<Key>(width_);
  }
  return t;
}

void TupleSet::insert(const Tuple& t) { insert_key(key_of(t)); }

void TupleSet::insert_key(Key k) {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), k);
  if (it == keys_.end() || *it != k) keys_.insert(it, k);
}

bool TupleSet::contains(const Tuple& t) const { return contains_key(key_of(t)); }

bool TupleSet::contains_key(Key k) const {
  return std::binary_search(keys_.begin(), keys_.end(), k);
}

std::vector<Tuple> TupleSet::tuples() const {
  std::vector<Tuple> out;
  out.reserve(keys_.size());
  for (Key k : keys_) out.push_back(tuple_of(k));
  return out;
}

std::set<AtomId> TupleSet::atoms() const {
  std::set<AtomId> out;
  for (Key k : keys_) {
    for (int i = 0; i < arity_; ++i) {
      out.insert(static_cast<AtomId>(k % static_cast<Key>(width_)));
      k /= static_cast<Key>(width_);
    }
  }
  return out;
}

TupleSet TupleSet::united(const TupleSet& o) const {
  assert(arity_ == o.arity_);
  std::vector<Key> out;
  std::set_union(keys_.begin(), keys_.end(), o.keys_.begin(), o.keys_.end(),
                 std::back_inserter(out));
  return from_sorted(arity_, width_, std::move(out));
}

TupleSet TupleSet::minus(const TupleSet& o) const {
  assert(arity_ == o.arity_);
  std::vector<Key> out;
  std::set_difference(keys_.begin(), keys_.end(), o.keys_.begin(), o.keys_.end(),
                      std::back_inserter(out));
  return from_sorted(arity_, width_, std::move(out));
}

TupleSet TupleSet::intersected(const TupleSet& o) const {
  assert(arity_ == o.arity_);
  std::vector<Key> out;
  std::set_intersection(keys_.begin(), keys_.end(), o.keys_.begin(), o.keys_.end(),
                        std::back_inserter(out));
  return from_sorted(arity_, width_, std::move(out));
}

TupleSet TupleSet::joined(const TupleSet& o) const {
  const int arity = arity_ + o.arity_ - 2;
  assert(arity >= 1);
  const Key w = static_cast<Key>(width_);
  Key right_rest = 1;  // radix of the right tuple without its first column
  for (int i = 1; i < o.arity_; ++i) right_rest *= w;

  // Right tuples grouped by their first column.
  std::map<Key, std::vector<Key>> by_head;
  for (Key k : o.keys_) by_head[k / right_rest].push_back(k % right_rest);

  std::vector<Key> out;
  for (Key k : keys_) {
    auto it = by_head.find(k % w);
    if (it == by_head.end()) continue;
    Key prefix = k / w;
    for (Key rest : it->second) out.push_back(prefix * right_rest + rest);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return from_sorted(arity, width_, std::move(out));
}

TupleSet TupleSet::product(const TupleSet& o) const {
  Key right_radix = 1;
  for (int i = 0; i < o.arity_; ++i) right_radix *= static_cast<Key>(width_);
  std::vector<Key> out;
  out.reserve(keys_.size() * o.keys_.size());
  for (Key a : keys_)
    for (Key b : o.keys_) out.push_back(a * right_radix + b);
  return from_sorted(arity_ + o.arity_, width_, std::move(out));
}

TupleSet TupleSet::transposed() const {
  assert(arity_ == 2);
  const Key w = static_cast<Key>(width_);
  std::vector<Key> out;
  out.reserve(keys_.size());
  for (Key k : keys_) out.push_back((k % w) * w + k / w);
  std::sort(out.begin(), out.end());
  return from_sorted(2, width_, std::move(out));
}

TupleSet TupleSet::closure() const {
  assert(arity_ == 2);
  TupleSet result = *this;
  while (true) {
    TupleSet next = result.united(result.joined(result));
    if (next.size() == result.size()) return result;
    result = std::move(next);
  }
}

bool TupleSet::subset_of(const TupleSet& o) const {
  return std::includes(o.keys_.begin(), o.keys_.end(), keys_.begin(), keys_.end());
}

}  // namespace relloc
