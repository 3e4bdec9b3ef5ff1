#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "clausekit/cnf.hpp"
#include "clausekit/solver/state.hpp"

namespace clausekit::solver {

struct VsidsConfig {
  double decay = 0.95;
  double initial_bump = 1.0;
  double rescale_threshold = 1e100;
};

/// Activity table of the VSIDS heuristic plus saved phases.
struct VsidsScores {
  explicit VsidsScores(std::size_t num_vars, VsidsConfig cfg = {})
      : activity(num_vars, 0.0), phase(num_vars, false), bump(cfg.initial_bump), config(cfg) {}

  std::vector<double> activity;  // index var-1
  std::vector<bool> phase;       // saved polarity, initially false
  double bump;
  VsidsConfig config;
};

/// Bumps every variable of the learned clause, then grows the bump amount by
/// 1/decay (equivalent to decaying all activities). Rescales everything by
/// 1/threshold once an activity passes the threshold. Returns true on rescale.
inline bool vsids_on_conflict(VsidsScores& s, std::span<const Literal> learned) {
  bool rescale = false;
  for (Literal l : learned) {
    double& a = s.activity[l.var - 1];
    a += s.bump;
    if (a > s.config.rescale_threshold) rescale = true;
  }
  s.bump /= s.config.decay;
  if (s.bump > s.config.rescale_threshold) rescale = true;
  if (rescale) {
    const double f = 1.0 / s.config.rescale_threshold;
    for (double& a : s.activity) a *= f;
    s.bump *= f;
  }
  return rescale;
}

/// Unassigned variable of maximal activity (lowest index on ties) with its
/// saved phase. Linear scan; `Vsids` below is the heap-backed equivalent.
inline HeuristicDecision vsids_pick(const VsidsScores& s, const Assignment& a) {
  Var best = 0;
  for (Var v = 1; v <= a.size(); ++v) {
    if (a[v] != Tribool::Undef) continue;
    if (best == 0 || s.activity[v - 1] > s.activity[best - 1]) best = v;
  }
  if (best == 0) throw std::logic_error("vsids_pick: no unassigned variable");
  return {best, s.phase[best - 1]};
}

/// VSIDS with phase saving, backed by an indexed binary max-heap.
class Vsids {
 public:
  explicit Vsids(std::size_t num_vars, VsidsConfig cfg = {}) : scores_(num_vars, cfg), pos_(num_vars, kAbsent) {
    for (Var v = 1; v <= num_vars; ++v) insert(v);
  }

  [[nodiscard]] const VsidsScores& scores() const { return scores_; }
  [[nodiscard]] double activity(Var v) const { return scores_.activity[v - 1]; }

  HeuristicDecision pick(const SolverState& s) {
    while (!heap_.empty()) {
      Var v = heap_.front();
      if (!s.is_assigned(v)) return {v, scores_.phase[v - 1]};
      pop();
    }
    throw std::logic_error("vsids: no unassigned variable");
  }

  void on_conflict(const SolverState&, std::span<const Literal> learned) {
    if (vsids_on_conflict(scores_, learned)) {
      rebuild();
      return;
    }
    for (Literal l : learned)
      if (pos_[l.var - 1] != kAbsent) sift_up(pos_[l.var - 1]);
  }

  void on_unassign(Var v, bool previous) {
    scores_.phase[v - 1] = previous;
    insert(v);
  }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

  [[nodiscard]] bool better(Var a, Var b) const {
    double x = scores_.activity[a - 1], y = scores_.activity[b - 1];
    return x > y || (x == y && a < b);
  }

  void insert(Var v) {
    if (pos_[v - 1] != kAbsent) return;
    pos_[v - 1] = heap_.size();
    heap_.push_back(v);
    sift_up(heap_.size() - 1);
  }

  void pop() {
    Var top = heap_.front();
    pos_[top - 1] = kAbsent;
    Var last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      pos_[last - 1] = 0;
      sift_down(0);
    }
  }

  void sift_up(std::size_t i) {
    Var v = heap_[i];
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (!better(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      pos_[heap_[i] - 1] = i;
      i = parent;
    }
    heap_[i] = v;
    pos_[v - 1] = i;
  }

  void sift_down(std::size_t i) {
    Var v = heap_[i];
    while (true) {
      std::size_t child = 2 * i + 1;
      if (child >= heap_.size()) break;
      if (child + 1 < heap_.size() && better(heap_[child + 1], heap_[child])) ++child;
      if (!better(heap_[child], v)) break;
      heap_[i] = heap_[child];
      pos_[heap_[i] - 1] = i;
      i = child;
    }
    heap_[i] = v;
    pos_[v - 1] = i;
  }

  void rebuild() {
    for (std::size_t i = heap_.size() / 2; i-- > 0;) sift_down(i);
  }

  VsidsScores scores_;
  std::vector<Var> heap_;
  std::vector<std::size_t> pos_;
};

}  // namespace clausekit::solver
