#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "clausekit/cnf.hpp"

namespace clausekit::solver {

/// Dense literal code: 2*(var-1) + negated.
using LitCode = std::uint32_t;
using ClauseRef = std::uint32_t;

inline constexpr ClauseRef kNoReason = std::numeric_limits<ClauseRef>::max();

constexpr LitCode code_of(Literal l) { return 2 * (l.var - 1) + (l.negated ? 1 : 0); }
constexpr Literal literal_of(LitCode c) { return Literal(c / 2 + 1, (c & 1) != 0); }
constexpr LitCode negate(LitCode c) { return c ^ 1; }
constexpr Var var_of(LitCode c) { return c / 2 + 1; }

struct HeuristicDecision {
  Var var = 1;
  bool value = false;

  friend bool operator==(const HeuristicDecision&, const HeuristicDecision&) = default;
};

struct StoredClause {
  std::vector<LitCode> lits;
  bool learned = false;
  bool deleted = false;
  double activity = 0.0;
};

struct TrailEntry {
  Literal lit;
  std::uint32_t level = 0;
  ClauseRef reason = kNoReason;  // kNoReason marks a decision
};

/// Everything a CDCL search knows: the original formula, the clause database
/// (original clauses first, learned clauses appended), the trail and the
/// watch lists. Heuristics get read-only access.
class SolverState {
 public:
  explicit SolverState(const CnfFormula& f)
      : formula_(f),
        values_(f.num_vars(), Tribool::Undef),
        levels_(f.num_vars(), 0),
        reasons_(f.num_vars(), kNoReason),
        watches_(2 * f.num_vars()) {}

  [[nodiscard]] const CnfFormula& formula() const { return formula_; }
  [[nodiscard]] std::size_t num_vars() const { return formula_.num_vars(); }

  [[nodiscard]] Tribool value(Var v) const { return values_[v - 1]; }
  [[nodiscard]] Tribool lit_value(LitCode c) const {
    Tribool t = values_[c >> 1];
    return (c & 1) ? !t : t;
  }
  [[nodiscard]] Tribool value(Literal l) const { return lit_value(code_of(l)); }
  [[nodiscard]] bool is_assigned(Var v) const { return values_[v - 1] != Tribool::Undef; }

  [[nodiscard]] Assignment assignment() const {
    Assignment a(num_vars());
    for (Var v = 1; v <= num_vars(); ++v) a.set(v, values_[v - 1]);
    return a;
  }
  [[nodiscard]] std::span<const Tribool> values() const { return values_; }

  [[nodiscard]] std::uint32_t decision_level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }
  [[nodiscard]] std::uint32_t level(Var v) const { return levels_[v - 1]; }
  [[nodiscard]] ClauseRef reason(Var v) const { return reasons_[v - 1]; }
  [[nodiscard]] const std::vector<TrailEntry>& trail() const { return trail_; }
  [[nodiscard]] bool all_assigned() const { return trail_.size() == num_vars(); }

  [[nodiscard]] const std::vector<StoredClause>& clauses() const { return clauses_; }
  [[nodiscard]] const StoredClause& clause(ClauseRef r) const { return clauses_[r]; }
  [[nodiscard]] const std::vector<ClauseRef>& watches(LitCode c) const { return watches_[c]; }

  [[nodiscard]] std::vector<Clause> learned_clauses() const {
    std::vector<Clause> out;
    for (const auto& c : clauses_) {
      if (!c.learned || c.deleted) continue;
      std::vector<Literal> lits;
      for (LitCode l : c.lits) lits.push_back(literal_of(l));
      out.emplace_back(std::move(lits));
    }
    return out;
  }

  /// Returns an empty string when the trail, reasons and watch lists are
  /// well formed, otherwise a description of the first violation.
  [[nodiscard]] std::string check_invariants() const {
    std::vector<std::size_t> pos(num_vars(), SIZE_MAX);
    std::uint32_t prev_level = 0;
    for (std::size_t i = 0; i < trail_.size(); ++i) {
      const TrailEntry& e = trail_[i];
      std::string at = "trail[" + std::to_string(i) + "]";
      if (value(e.lit) != Tribool::True) return at + " literal not true in assignment";
      if (level(e.lit.var) != e.level) return at + " level disagrees with variable level";
      if (e.level < prev_level) return at + " levels not monotone";
      prev_level = e.level;
      if (pos[e.lit.var - 1] != SIZE_MAX) return at + " variable on trail twice";
      pos[e.lit.var - 1] = i;
      if (e.reason == kNoReason) {
        if (e.level == 0 || trail_lim_[e.level - 1] != i) return at + " decision does not open its level";
        continue;
      }
      const StoredClause& c = clauses_[e.reason];
      if (c.lits.empty() || c.lits[0] != code_of(e.lit)) return at + " reason does not imply the literal first";
      for (std::size_t k = 1; k < c.lits.size(); ++k) {
        Var v = var_of(c.lits[k]);
        if (lit_value(c.lits[k]) != Tribool::False || pos[v - 1] == SIZE_MAX)
          return at + " reason clause not unit under the preceding trail";
      }
    }
    for (Var v = 1; v <= num_vars(); ++v)
      if (is_assigned(v) != (pos[v - 1] != SIZE_MAX)) return "assigned variable missing from trail";

    std::vector<std::uint32_t> watch_count(clauses_.size(), 0);
    for (LitCode l = 0; l < watches_.size(); ++l)
      for (ClauseRef r : watches_[l]) {
        const StoredClause& c = clauses_[r];
        if (c.deleted) return "deleted clause still watched";
        if (c.lits.size() < 2 || (c.lits[0] != l && c.lits[1] != l)) return "watch on a non-watched literal";
        ++watch_count[r];
      }
    for (ClauseRef r = 0; r < clauses_.size(); ++r)
      if (!clauses_[r].deleted && clauses_[r].lits.size() >= 2 && watch_count[r] != 2)
        return "clause " + std::to_string(r) + " has " + std::to_string(watch_count[r]) + " watches";
    return {};
  }

 private:
  template <class H>
  friend class Solver;

  CnfFormula formula_;
  std::vector<Tribool> values_;
  std::vector<std::uint32_t> levels_;
  std::vector<ClauseRef> reasons_;
  std::vector<TrailEntry> trail_;
  std::vector<std::size_t> trail_lim_;  // trail index of each level's decision
  std::vector<StoredClause> clauses_;
  std::vector<std::vector<ClauseRef>> watches_;  // by LitCode
  std::size_t qhead_ = 0;
};

}  // namespace clausekit::solver
