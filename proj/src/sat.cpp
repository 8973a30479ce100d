#include "relloc/sat.hpp"

#include <algorithm>
#include <optional>
#include <random>

namespace relloc {

namespace {

// Luby sequence value for restart index x (0-based).
double luby(int x) {
  int size = 1;
  int seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x %= size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= 2;
  return r;
}

}  // namespace

Solver::Solver(SolverOptions opts) : opts_(opts) {
  // Slot 0 keeps literal indices aligned with variable ids.
  assigns_.push_back(0);
  levels_.push_back(0);
  reasons_.push_back(-1);
  saved_phase_.push_back(false);
  user_phase_.push_back(0);
  activity_.push_back(0);
  heap_pos_.push_back(-1);
  seen_.push_back(0);
  watches_.resize(2);
}

int Solver::new_var() {
  const int v = ++num_vars_;
  assigns_.push_back(0);
  levels_.push_back(0);
  reasons_.push_back(-1);
  saved_phase_.push_back(false);
  user_phase_.push_back(0);
  double act = 0;
  if (opts_.seed != 0) {
    std::mt19937_64 rng(opts_.seed ^ (static_cast<std::uint64_t>(v) * 0x9E3779B97F4A7C15ULL));
    act = std::uniform_real_distribution<double>(0.0, 1e-5)(rng);
  }
  activity_.push_back(act);
  heap_pos_.push_back(-1);
  seen_.push_back(0);
  watches_.resize(watches_.size() + 2);
  heap_insert(v);
  return v;
}

void Solver::ensure_vars(int n) {
  while (num_vars_ < n) new_var();
}

void Solver::set_phase(int var, bool value) {
  ensure_vars(var);
  user_phase_[static_cast<std::size_t>(var)] = value ? 1 : -1;
}

bool Solver::add_clause(std::vector<int> ext) {
  if (!ok_) return false;
  cancel_until(0);
  std::vector<Lit> lits;
  lits.reserve(ext.size());
  for (int e : ext) {
    ensure_vars(std::abs(e));
    lits.push_back(to_lit(e));
  }
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == neg(lits[i])) return true;  // tautology
    const std::int8_t v = value(lits[i]);
    if (v == 1) return true;
    if (v == 0) kept.push_back(lits[i]);
  }
  if (kept.empty()) return ok_ = false;
  if (kept.size() == 1) {
    enqueue(kept[0], -1);
    if (propagate() >= 0) ok_ = false;
    return ok_;
  }
  attach(std::move(kept), false);
  return true;
}

int Solver::attach(std::vector<Lit> lits, bool learnt) {
  const int id = static_cast<int>(clauses_.size());
  watches_[static_cast<std::size_t>(lits[0])].push_back(id);
  watches_[static_cast<std::size_t>(lits[1])].push_back(id);
  clauses_.push_back({std::move(lits), learnt, false, 0});
  if (learnt) learnts_.push_back(id);
  return id;
}

void Solver::enqueue(Lit l, int reason) {
  const int v = var_of(l);
  assigns_[static_cast<std::size_t>(v)] = (l & 1) ? -1 : 1;
  levels_[static_cast<std::size_t>(v)] = level();
  reasons_[static_cast<std::size_t>(v)] = reason;
  trail_.push_back(l);
}

int Solver::propagate() {
  int confl = -1;
  while (qhead_ < trail_.size()) {
    const Lit false_lit = neg(trail_[qhead_++]);
    auto& ws = watches_[static_cast<std::size_t>(false_lit)];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      const int ci = ws[i++];
      ClauseData& c = clauses_[static_cast<std::size_t>(ci)];
      if (c.deleted) continue;
      auto& lits = c.lits;
      if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
      if (value(lits[0]) == 1) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != -1) {
          std::swap(lits[1], lits[k]);
          watches_[static_cast<std::size_t>(lits[1])].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (value(lits[0]) == -1) {
        confl = ci;
        while (i < ws.size()) ws[j++] = ws[i++];
        qhead_ = trail_.size();
      } else {
        enqueue(lits[0], ci);
      }
    }
    ws.resize(j);
  }
  return confl;
}

void Solver::analyze(int confl, std::vector<Lit>& learnt, int& bt_level) {
  learnt.assign(1, 0);
  int path = 0;
  Lit p = -1;
  std::size_t idx = trail_.size();
  do {
    ClauseData& c = clauses_[static_cast<std::size_t>(confl)];
    if (c.learnt) bump_clause(c);
    for (std::size_t k = (p == -1 ? 0 : 1); k < c.lits.size(); ++k) {
      const Lit q = c.lits[k];
      const auto v = static_cast<std::size_t>(var_of(q));
      if (seen_[v] || levels_[v] == 0) continue;
      seen_[v] = 1;
      bump_var(static_cast<int>(v));
      if (levels_[v] >= level())
        ++path;
      else
        learnt.push_back(q);
    }
    while (!seen_[static_cast<std::size_t>(var_of(trail_[--idx]))]) {
    }
    p = trail_[idx];
    confl = reasons_[static_cast<std::size_t>(var_of(p))];
    seen_[static_cast<std::size_t>(var_of(p))] = 0;
    --path;
  } while (path > 0);
  learnt[0] = neg(p);

  // Drop literals implied by the rest of the clause through their reason.
  std::vector<Lit> kept{learnt[0]};
  for (std::size_t k = 1; k < learnt.size(); ++k) {
    const int r = reasons_[static_cast<std::size_t>(var_of(learnt[k]))];
    bool redundant = r >= 0;
    if (redundant) {
      const auto& rl = clauses_[static_cast<std::size_t>(r)].lits;
      for (std::size_t t = 1; t < rl.size(); ++t) {
        const auto v = static_cast<std::size_t>(var_of(rl[t]));
        if (!seen_[v] && levels_[v] > 0) {
          redundant = false;
          break;
        }
      }
    }
    if (!redundant) kept.push_back(learnt[k]);
  }
  for (std::size_t k = 1; k < learnt.size(); ++k) seen_[static_cast<std::size_t>(var_of(learnt[k]))] = 0;
  learnt = std::move(kept);

  bt_level = 0;
  if (learnt.size() > 1) {
    std::size_t best = 1;
    for (std::size_t k = 2; k < learnt.size(); ++k)
      if (levels_[static_cast<std::size_t>(var_of(learnt[k]))] >
          levels_[static_cast<std::size_t>(var_of(learnt[best]))])
        best = k;
    std::swap(learnt[1], learnt[best]);
    bt_level = levels_[static_cast<std::size_t>(var_of(learnt[1]))];
  }
}

void Solver::analyze_final(Lit failed) {
  // `failed` is an assumption literal currently false.
  core_.clear();
  core_.push_back(to_ext(failed));
  const auto fv = static_cast<std::size_t>(var_of(failed));
  if (levels_[fv] == 0) return;
  seen_[fv] = 1;
  for (std::size_t i = trail_.size(); i-- > static_cast<std::size_t>(trail_lim_[0]);) {
    const auto v = static_cast<std::size_t>(var_of(trail_[i]));
    if (!seen_[v]) continue;
    const int r = reasons_[v];
    if (r < 0) {
      core_.push_back(to_ext(trail_[i]));  // decisions above the root are assumptions
    } else {
      const auto& lits = clauses_[static_cast<std::size_t>(r)].lits;
      for (std::size_t k = 1; k < lits.size(); ++k) {
        const auto u = static_cast<std::size_t>(var_of(lits[k]));
        if (levels_[u] > 0) seen_[u] = 1;
      }
    }
    seen_[v] = 0;
  }
  seen_[fv] = 0;
}

void Solver::cancel_until(int lvl) {
  if (level() <= lvl) return;
  const auto stop = static_cast<std::size_t>(trail_lim_[static_cast<std::size_t>(lvl)]);
  for (std::size_t i = trail_.size(); i-- > stop;) {
    const int v = var_of(trail_[i]);
    saved_phase_[static_cast<std::size_t>(v)] = !(trail_[i] & 1);
    assigns_[static_cast<std::size_t>(v)] = 0;
    reasons_[static_cast<std::size_t>(v)] = -1;
    heap_insert(v);
  }
  trail_.resize(stop);
  trail_lim_.resize(static_cast<std::size_t>(lvl));
  qhead_ = trail_.size();
}

Solver::Lit Solver::pick_branch() {
  while (!heap_.empty()) {
    const int v = heap_pop();
    if (assigns_[static_cast<std::size_t>(v)] != 0) continue;
    const std::int8_t up = user_phase_[static_cast<std::size_t>(v)];
    const bool positive = up != 0 ? up > 0 : saved_phase_[static_cast<std::size_t>(v)];
    return positive ? 2 * v : 2 * v + 1;
  }
  return -1;
}

void Solver::reduce_db() {
  std::vector<int> cand;
  for (int id : learnts_) {
    const ClauseData& c = clauses_[static_cast<std::size_t>(id)];
    if (c.deleted) continue;
    cand.push_back(id);
  }
  std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
    return clauses_[static_cast<std::size_t>(a)].activity < clauses_[static_cast<std::size_t>(b)].activity;
  });
  const std::size_t limit = cand.size() / 2;
  std::vector<int> keep;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    ClauseData& c = clauses_[static_cast<std::size_t>(cand[i])];
    const auto v0 = static_cast<std::size_t>(var_of(c.lits[0]));
    const bool locked = reasons_[v0] == cand[i] && value(c.lits[0]) == 1;
    if (i < limit && !locked && c.lits.size() > 2) {
      c.deleted = true;
      c.lits.shrink_to_fit();
    } else {
      keep.push_back(cand[i]);
    }
  }
  learnts_ = std::move(keep);
  for (auto& ws : watches_)
    ws.erase(std::remove_if(ws.begin(), ws.end(),
                            [&](int id) { return clauses_[static_cast<std::size_t>(id)].deleted; }),
             ws.end());
}

std::optional<Solver::Result> Solver::search(int conflict_budget, std::span<const Lit> assumptions) {
  int conflicts = 0;
  std::vector<Lit> learnt;
  for (;;) {
    const int confl = propagate();
    if (confl >= 0) {
      ++conflicts;
      ++stats_conflicts_;
      if (level() == 0) {
        ok_ = false;
        core_.clear();
        return Result::Unsat;
      }
      int bt = 0;
      analyze(confl, learnt, bt);
      cancel_until(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        const int id = attach(learnt, true);
        bump_clause(clauses_[static_cast<std::size_t>(id)]);
        enqueue(learnt[0], id);
      }
      var_inc_ /= 0.95;
      clause_inc_ /= 0.999;
      continue;
    }
    if (conflicts >= conflict_budget) return std::nullopt;
    if (static_cast<double>(learnts_.size()) - static_cast<double>(trail_.size()) >= max_learnts_)
      reduce_db();

    Lit next = -1;
    while (static_cast<std::size_t>(level()) < assumptions.size()) {
      const Lit a = assumptions[static_cast<std::size_t>(level())];
      const std::int8_t v = value(a);
      if (v == 1) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));
      } else if (v == -1) {
        analyze_final(a);
        return Result::Unsat;
      } else {
        next = a;
        break;
      }
    }
    if (next == -1) {
      next = pick_branch();
      if (next == -1) {
        model_.assign(static_cast<std::size_t>(num_vars_) + 1, false);
        for (int v = 1; v <= num_vars_; ++v) model_[static_cast<std::size_t>(v)] = assigns_[static_cast<std::size_t>(v)] > 0;
        return Result::Sat;
      }
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, -1);
  }
}

Solver::Result Solver::solve(std::span<const int> assumptions) {
  core_.clear();
  model_.clear();
  if (!ok_) return Result::Unsat;
  cancel_until(0);
  std::vector<Lit> assume;
  for (int a : assumptions) {
    ensure_vars(std::abs(a));
    assume.push_back(to_lit(a));
  }
  max_learnts_ = std::max(1000.0, static_cast<double>(clauses_.size()) / 3.0);
  for (int restart = 0;; ++restart) {
    const int budget = static_cast<int>(luby(restart) * opts_.restart_unit);
    const std::optional<Result> r = search(budget, assume);
    cancel_until(0);
    if (r) return *r;
    max_learnts_ *= 1.1;
  }
}

void Solver::bump_var(int v) {
  auto& a = activity_[static_cast<std::size_t>(v)];
  a += var_inc_;
  if (a > 1e100) {
    for (auto& x : activity_) x *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[static_cast<std::size_t>(v)] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[static_cast<std::size_t>(v)]));
}

void Solver::bump_clause(ClauseData& c) {
  c.activity += clause_inc_;
  if (c.activity > 1e20) {
    for (int id : learnts_) clauses_[static_cast<std::size_t>(id)].activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

bool Solver::heap_less(int a, int b) const {
  const double x = activity_[static_cast<std::size_t>(a)];
  const double y = activity_[static_cast<std::size_t>(b)];
  return x != y ? x > y : a < b;
}

void Solver::heap_insert(int v) {
  if (heap_pos_[static_cast<std::size_t>(v)] >= 0) return;
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void Solver::heap_up(std::size_t i) {
  const int v = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_pos_[static_cast<std::size_t>(heap_[i])] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(i);
}

void Solver::heap_down(std::size_t i) {
  const int v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_pos_[static_cast<std::size_t>(heap_[i])] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[static_cast<std::size_t>(v)] = static_cast<int>(i);
}

int Solver::heap_pop() {
  const int top = heap_.front();
  heap_pos_[static_cast<std::size_t>(top)] = -1;
  const int last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[static_cast<std::size_t>(last)] = 0;
    heap_down(0);
  }
  return top;
}

std::vector<int> minimize_core(Solver& s, std::vector<int> core) {
  // Members before `i` are necessary for every subset of the current core,
  // so a shrunken core keeps them in place.
  std::size_t i = 0;
  while (i < core.size()) {
    std::vector<int> trial = core;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (s.solve(trial) == Solver::Result::Unsat) {
      const std::vector<int>& found = s.core();
      std::vector<int> next;
      for (int lit : trial)
        if (std::find(found.begin(), found.end(), lit) != found.end()) next.push_back(lit);
      core = std::move(next);
    } else {
      ++i;
    }
  }
  return core;
}

}  // namespace relloc
