#pragma once

#include <algorithm>
#include <chrono>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clausekit/cnf.hpp"
#include "clausekit/solver/state.hpp"

namespace clausekit::solver {

enum class Verdict { Sat, Unsat, Unknown };
enum class LimitReason { None, Decisions, Timeout };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "Sat";
    case Verdict::Unsat: return "Unsat";
    case Verdict::Unknown: break;
  }
  return "Unknown";
}

inline const char* to_string(LimitReason r) {
  switch (r) {
    case LimitReason::Decisions: return "max_decisions";
    case LimitReason::Timeout: return "timeout";
    case LimitReason::None: break;
  }
  return "none";
}

struct Limits {
  std::uint64_t max_decisions = 0;              // 0 = unlimited
  std::chrono::milliseconds timeout{0};         // 0 = unlimited
};

struct SolverOptions {
  bool restarts = false;          // Luby restarts
  std::uint64_t restart_unit = 100;
  bool delete_learned = false;    // activity-based learned clause deletion
  double learned_fraction = 1.0 / 3.0;
  double learned_growth = 1.1;
  double clause_decay = 0.999;
};

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t learned_clauses = 0;
  std::uint64_t restarts = 0;
  std::uint64_t deleted_clauses = 0;
  double wall_time_s = 0.0;
};

struct SolveResult {
  Verdict verdict = Verdict::Unknown;
  LimitReason limit = LimitReason::None;
  Assignment model;  // total when verdict == Sat
  SolverStats stats;
};

struct ConflictAnalysis {
  std::vector<Literal> learned;  // learned[0] is the negated UIP literal
  std::uint32_t backjump_level = 0;
};

/// A pick-branching-variable strategy. Only `pick` is required; the solver
/// also calls any of these hooks the type provides:
///   on_start(const SolverState&)
///   on_propagated(const SolverState&, bool conflict)   after each decision's propagation
///   on_conflict(const SolverState&, std::span<const Literal> learned)   before backjumping
///   on_unassign(Var, bool previous_value)
///   on_finish(const SolverState&, Verdict)
template <class H>
concept BranchingHeuristic = requires(H h, const SolverState& s) {
  { h.pick(s) } -> std::same_as<HeuristicDecision>;
};

inline std::uint64_t luby(std::uint64_t i) {
  // i-th element (0-based) of 1,1,2,1,1,2,4,...
  std::uint64_t size = 1, seq = 0;
  while (size < i + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != i) {
    size = (size - 1) >> 1;
    --seq;
    i %= size;
  }
  return std::uint64_t{1} << seq;
}

/// CDCL search: two-watched-literal propagation, 1-UIP learning and
/// non-chronological backjumping. The loop follows
/// observe -> decide -> assign -> propagate -> {SAT | conflict -> learn, backjump}.
template <class H>
class Solver {
  static_assert(BranchingHeuristic<H>, "heuristic must provide HeuristicDecision pick(const SolverState&)");

 public:
  Solver(const CnfFormula& f, H& heuristic, SolverOptions opts = {})
      : s_(f), h_(heuristic), opts_(opts), seen_(f.num_vars(), 0) {
    for (const Clause& c : f.clauses()) add_original(c);
  }

  [[nodiscard]] const SolverState& state() const { return s_; }
  [[nodiscard]] const SolverStats& stats() const { return stats_; }
  /// True once a level-0 contradiction has been found.
  [[nodiscard]] bool inconsistent() const { return inconsistent_; }

  /// Unit propagation to fixpoint. Returns the falsified clause on conflict.
  std::optional<ClauseRef> propagate() {
    while (s_.qhead_ < s_.trail_.size()) {
      LitCode false_lit = negate(code_of(s_.trail_[s_.qhead_++].lit));
      std::vector<ClauseRef>& ws = s_.watches_[false_lit];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        ClauseRef cr = ws[i++];
        std::vector<LitCode>& c = s_.clauses_[cr].lits;
        if (c[0] == false_lit) std::swap(c[0], c[1]);
        if (s_.lit_value(c[0]) == Tribool::True) {
          ws[j++] = cr;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (s_.lit_value(c[k]) != Tribool::False) {
            std::swap(c[1], c[k]);
            s_.watches_[c[1]].push_back(cr);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = cr;
        if (s_.lit_value(c[0]) == Tribool::False) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          s_.qhead_ = s_.trail_.size();
          return cr;
        }
        enqueue(c[0], cr);
        ++stats_.propagations;
      }
      ws.resize(j);
    }
    return std::nullopt;
  }

  /// First-UIP learning. Requires a conflict above level 0.
  ConflictAnalysis analyze(ClauseRef conflict) {
    if (s_.decision_level() == 0) throw std::logic_error("analyze called on a level-0 conflict");
    const std::uint32_t current = s_.decision_level();
    std::vector<LitCode> learned{0};
    std::size_t path = 0;
    std::optional<LitCode> uip;
    std::size_t idx = s_.trail_.size();
    ClauseRef cr = conflict;

    do {
      StoredClause& c = s_.clauses_[cr];
      if (c.learned) bump_clause(c);
      for (std::size_t k = uip ? 1 : 0; k < c.lits.size(); ++k) {
        LitCode q = c.lits[k];
        Var v = var_of(q);
        if (seen_[v - 1] || s_.level(v) == 0) continue;
        seen_[v - 1] = 1;
        if (s_.level(v) >= current) ++path;
        else learned.push_back(q);
      }
      while (!seen_[s_.trail_[--idx].lit.var - 1]) {
      }
      LitCode p = code_of(s_.trail_[idx].lit);
      uip = p;
      cr = s_.reason(var_of(p));
      seen_[var_of(p) - 1] = 0;
      --path;
    } while (path > 0);
    learned[0] = negate(*uip);

    std::uint32_t back = 0;
    std::size_t max_i = 1;
    for (std::size_t k = 1; k < learned.size(); ++k) {
      seen_[var_of(learned[k]) - 1] = 0;
      std::uint32_t lv = s_.level(var_of(learned[k]));
      if (lv > back) {
        back = lv;
        max_i = k;
      }
    }
    if (learned.size() > 1) std::swap(learned[1], learned[max_i]);

    ConflictAnalysis out;
    out.backjump_level = back;
    for (LitCode l : learned) out.learned.push_back(literal_of(l));
    return out;
  }

  /// Undoes every assignment above `level`.
  void backjump(std::uint32_t level) {
    if (level >= s_.decision_level()) return;
    std::size_t keep = s_.trail_lim_[level];
    for (std::size_t i = s_.trail_.size(); i-- > keep;) {
      const TrailEntry& e = s_.trail_[i];
      Var v = e.lit.var;
      s_.values_[v - 1] = Tribool::Undef;
      s_.reasons_[v - 1] = kNoReason;
      s_.levels_[v - 1] = 0;
      if constexpr (requires { h_.on_unassign(v, true); }) h_.on_unassign(v, !e.lit.negated);
    }
    s_.trail_.resize(keep);
    s_.trail_lim_.resize(level);
    s_.qhead_ = s_.trail_.size();
  }

  /// Opens a new decision level and assigns `lit` there.
  void decide(Literal lit) {
    if (s_.is_assigned(lit.var)) throw std::logic_error("decision on assigned variable " + std::to_string(lit.var));
    s_.trail_lim_.push_back(s_.trail_.size());
    enqueue(code_of(lit), kNoReason);
  }

  /// Stores a learned clause and asserts its UIP literal. Call after
  /// backjumping to the analysis level.
  ClauseRef learn(const ConflictAnalysis& a) {
    StoredClause c;
    c.learned = true;
    for (Literal l : a.learned) c.lits.push_back(code_of(l));
    ClauseRef cr = static_cast<ClauseRef>(s_.clauses_.size());
    bump_clause(c);
    s_.clauses_.push_back(std::move(c));
    const auto& lits = s_.clauses_[cr].lits;
    if (lits.size() >= 2) {
      s_.watches_[lits[0]].push_back(cr);
      s_.watches_[lits[1]].push_back(cr);
    }
    ++stats_.learned_clauses;
    enqueue(lits[0], cr);
    return cr;
  }

  SolveResult solve(Limits limits = {}) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto finish = [&](Verdict v, LimitReason why = LimitReason::None) {
      SolveResult r;
      r.verdict = v;
      r.limit = why;
      if (v == Verdict::Sat) {
        r.model = s_.assignment();
        for (const Clause& c : s_.formula().clauses())
          if (evaluate_clause(c, r.model) != Tribool::True)
            throw std::logic_error("internal error: model does not satisfy the formula");
      }
      stats_.wall_time_s = std::chrono::duration<double>(clock::now() - start).count();
      r.stats = stats_;
      if constexpr (requires { h_.on_finish(s_, v); }) h_.on_finish(s_, v);
      return r;
    };

    if constexpr (requires { h_.on_start(s_); }) h_.on_start(s_);
    if (inconsistent_ || propagate()) {
      inconsistent_ = true;
      return finish(Verdict::Unsat);
    }

    std::uint64_t restart_index = 0;
    std::uint64_t conflicts_at_restart = 0;
    double max_learned = std::max(1.0, static_cast<double>(s_.formula().num_clauses()) * opts_.learned_fraction);

    while (true) {
      if (s_.all_assigned()) return finish(Verdict::Sat);
      if (limits.max_decisions != 0 && stats_.decisions >= limits.max_decisions)
        return finish(Verdict::Unknown, LimitReason::Decisions);
      if (limits.timeout.count() != 0 && clock::now() - start >= limits.timeout)
        return finish(Verdict::Unknown, LimitReason::Timeout);

      if (opts_.restarts && stats_.conflicts - conflicts_at_restart >= opts_.restart_unit * luby(restart_index)) {
        ++restart_index;
        conflicts_at_restart = stats_.conflicts;
        ++stats_.restarts;
        backjump(0);
      }
      if (opts_.delete_learned && static_cast<double>(live_learned()) >= max_learned + s_.trail_.size()) {
        reduce_learned();
        max_learned *= opts_.learned_growth;
      }

      HeuristicDecision d = h_.pick(s_);
      if (d.var == 0 || d.var > s_.num_vars() || s_.is_assigned(d.var))
        throw std::logic_error("heuristic picked an unavailable variable " + std::to_string(d.var));
      ++stats_.decisions;
      decide(Literal(d.var, !d.value));

      bool reported = false;
      while (auto confl = propagate()) {
        ++stats_.conflicts;
        if (!reported) {
          reported = true;
          if constexpr (requires { h_.on_propagated(s_, true); }) h_.on_propagated(s_, true);
        }
        if (s_.decision_level() == 0) {
          inconsistent_ = true;
          return finish(Verdict::Unsat);
        }
        ConflictAnalysis a = analyze(*confl);
        if constexpr (requires { h_.on_conflict(s_, std::span<const Literal>(a.learned)); })
          h_.on_conflict(s_, std::span<const Literal>(a.learned));
        backjump(a.backjump_level);
        learn(a);
        decay_clauses();
      }
      if (!reported) {
        if constexpr (requires { h_.on_propagated(s_, false); }) h_.on_propagated(s_, false);
      }
    }
  }

 private:
  void enqueue(LitCode l, ClauseRef reason) {
    Var v = var_of(l);
    s_.values_[v - 1] = to_tribool((l & 1) == 0);
    s_.levels_[v - 1] = s_.decision_level();
    s_.reasons_[v - 1] = reason;
    s_.trail_.push_back({literal_of(l), s_.decision_level(), reason});
  }

  void add_original(const Clause& clause) {
    StoredClause c;
    for (Literal l : clause) {
      LitCode code = code_of(l);
      if (std::find(c.lits.begin(), c.lits.end(), negate(code)) != c.lits.end()) return;  // tautology
      if (std::find(c.lits.begin(), c.lits.end(), code) == c.lits.end()) c.lits.push_back(code);
    }
    ClauseRef cr = static_cast<ClauseRef>(s_.clauses_.size());
    s_.clauses_.push_back(std::move(c));
    const auto& lits = s_.clauses_[cr].lits;
    if (lits.size() >= 2) {
      s_.watches_[lits[0]].push_back(cr);
      s_.watches_[lits[1]].push_back(cr);
      return;
    }
    Tribool t = s_.lit_value(lits[0]);
    if (t == Tribool::False) inconsistent_ = true;
    else if (t == Tribool::Undef) enqueue(lits[0], cr);
  }

  void bump_clause(StoredClause& c) {
    c.activity += clause_inc_;
    if (c.activity > 1e20) {
      for (auto& x : s_.clauses_)
        if (x.learned) x.activity *= 1e-20;
      c.activity *= 1e-20;
      clause_inc_ *= 1e-20;
    }
  }

  void decay_clauses() { clause_inc_ /= opts_.clause_decay; }

  [[nodiscard]] std::size_t live_learned() const {
    std::size_t n = 0;
    for (const auto& c : s_.clauses_) n += (c.learned && !c.deleted) ? 1 : 0;
    return n;
  }

  [[nodiscard]] bool locked(ClauseRef cr) const {
    const auto& c = s_.clauses_[cr];
    Var v = var_of(c.lits[0]);
    return s_.reason(v) == cr && s_.lit_value(c.lits[0]) == Tribool::True;
  }

  void reduce_learned() {
    std::vector<ClauseRef> cand;
    for (ClauseRef r = 0; r < s_.clauses_.size(); ++r) {
      const auto& c = s_.clauses_[r];
      if (c.learned && !c.deleted && c.lits.size() > 2 && !locked(r)) cand.push_back(r);
    }
    std::stable_sort(cand.begin(), cand.end(),
                     [&](ClauseRef a, ClauseRef b) { return s_.clauses_[a].activity < s_.clauses_[b].activity; });
    for (std::size_t i = 0; i < cand.size() / 2; ++i) {
      s_.clauses_[cand[i]].deleted = true;
      s_.clauses_[cand[i]].lits.clear();
      ++stats_.deleted_clauses;
    }
    for (auto& ws : s_.watches_)
      std::erase_if(ws, [&](ClauseRef r) { return s_.clauses_[r].deleted; });
  }

  SolverState s_;
  H& h_;
  SolverOptions opts_;
  SolverStats stats_;
  std::vector<std::uint8_t> seen_;
  double clause_inc_ = 1.0;
  bool inconsistent_ = false;
};

/// One-shot convenience wrapper.
template <BranchingHeuristic H>
SolveResult solve(const CnfFormula& f, H& heuristic, Limits limits = {}, SolverOptions opts = {}) {
  Solver<H> solver(f, heuristic, opts);
  return solver.solve(limits);
}

}  // namespace clausekit::solver
