#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "clausekit/cnf.hpp"
#include "clausekit/logic/expr.hpp"

namespace clausekit::logic {

/// Bijection between atom names and DIMACS variables 1..k, in first-appearance order.
class SymbolTable {
 public:
  Var intern(const std::string& name) {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    names_.push_back(name);
    Var v = static_cast<Var>(names_.size());
    index_.emplace(name, v);
    return v;
  }

  void intern_all(const LogicalExpr& e) {
    std::vector<std::string> atoms;
    collect_atoms(e, atoms);
    for (const auto& a : atoms) intern(a);
  }

  [[nodiscard]] Var at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown atom " + name);
    return it->second;
  }

  [[nodiscard]] bool contains(const std::string& name) const { return index_.count(name) != 0; }
  [[nodiscard]] const std::string& name(Var v) const { return names_.at(v - 1); }
  [[nodiscard]] std::size_t size() const { return names_.size(); }
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const SymbolTable& a, const SymbolTable& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Var> index_;
};

class BlowupExceeded : public std::runtime_error {
 public:
  explicit BlowupExceeded(std::size_t cap)
      : std::runtime_error("CNF distribution exceeds the clause cap of " + std::to_string(cap) +
                           "; an equisatisfiable (Tseytin) encoding is needed for this input"),
        cap_(cap) {}
  [[nodiscard]] std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

inline constexpr std::size_t kDefaultClauseCap = 10'000;

namespace detail {

using LitList = std::vector<Literal>;
using ClauseList = std::vector<LitList>;

class Distributor {
 public:
  Distributor(const SymbolTable& st, std::size_t cap) : st_(st), cap_(cap) {}

  // CNF of e (negated when `neg`), with negations pushed to the atoms on the way down.
  ClauseList run(const LogicalExpr& e, bool neg) {
    using Kind = LogicalExpr::Kind;
    switch (e.kind) {
      case Kind::Atom: return {{Literal(st_.at(e.name), neg)}};
      case Kind::Not: return run(e.children[0], !neg);
      case Kind::And:
      case Kind::Or: {
        bool conj = (e.kind == Kind::And) != neg;
        std::vector<ClauseList> parts;
        parts.reserve(e.children.size());
        for (const auto& c : e.children) parts.push_back(run(c, neg));
        return conj ? join(std::move(parts)) : product(std::move(parts));
      }
      case Kind::Implies: {
        // a -> b == Or(Not a, b);  Not(a -> b) == And(a, Not b)
        if (!neg) return product_of(run(e.children[0], true), run(e.children[1], false));
        return join_of(run(e.children[0], false), run(e.children[1], true));
      }
      case Kind::Iff: {
        // a <-> b == (~a | b) & (a | ~b);  ~(a <-> b) == (a | b) & (~a | ~b)
        const auto& a = e.children[0];
        const auto& b = e.children[1];
        ClauseList first = product_of(run(a, !neg), run(b, false));
        ClauseList second = product_of(run(a, neg), run(b, true));
        return join_of(std::move(first), std::move(second));
      }
    }
    return {};
  }

 private:
  void check(std::size_t n) const {
    if (n > cap_) throw BlowupExceeded(cap_);
  }

  ClauseList join(std::vector<ClauseList> parts) {
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    check(total);
    ClauseList out;
    out.reserve(total);
    for (auto& p : parts)
      for (auto& c : p) out.push_back(std::move(c));
    return out;
  }

  ClauseList join_of(ClauseList a, ClauseList b) {
    std::vector<ClauseList> parts;
    parts.push_back(std::move(a));
    parts.push_back(std::move(b));
    return join(std::move(parts));
  }

  ClauseList product(std::vector<ClauseList> parts) {
    ClauseList acc = std::move(parts.front());
    for (std::size_t i = 1; i < parts.size(); ++i) acc = product_of(std::move(acc), std::move(parts[i]));
    return acc;
  }

  // Pairwise unions; tautologies and repeated clauses from the same product are
  // dropped as they appear, so the cap applies to what survives.
  ClauseList product_of(ClauseList a, ClauseList b) {
    ClauseList out;
    std::set<LitList> seen;
    for (const auto& x : a)
      for (const auto& y : b) {
        LitList c = x;
        bool tautology = false;
        for (Literal l : y) {
          if (std::find(c.begin(), c.end(), ~l) != c.end()) {
            tautology = true;
            break;
          }
          if (std::find(c.begin(), c.end(), l) == c.end()) c.push_back(l);
        }
        if (tautology) continue;
        LitList key = c;
        std::sort(key.begin(), key.end());
        if (!seen.insert(std::move(key)).second) continue;
        out.push_back(std::move(c));
        check(out.size());
      }
    return out;
  }

  const SymbolTable& st_;
  std::size_t cap_;
};

}  // namespace detail

/// Equivalence-preserving CNF by implication/biconditional elimination,
/// negation normal form and distribution of Or over And. New atoms are added
/// to `st` in first-appearance order; the result ranges over all of `st`.
inline CnfFormula to_cnf(const LogicalExpr& e, SymbolTable& st, std::size_t clause_cap = kDefaultClauseCap) {
  st.intern_all(e);
  detail::ClauseList cl = detail::Distributor(st, clause_cap).run(e, false);
  std::vector<Clause> clauses;
  clauses.reserve(cl.size());
  for (auto& c : cl) clauses.emplace_back(std::move(c));
  return CnfFormula(st.size(), std::move(clauses));
}

/// Removes duplicate literals, tautological clauses, duplicate clauses and
/// subsumed clauses. Surviving clauses and literals keep their input order.
inline CnfFormula simplify_cnf(const CnfFormula& f) {
  struct Kept {
    std::vector<Literal> lits;    // input order, duplicates removed
    std::vector<Literal> sorted;  // for set comparisons
  };
  std::vector<Kept> kept;
  std::set<std::vector<Literal>> seen;

  for (const Clause& c : f.clauses()) {
    Kept k;
    bool tautology = false;
    for (Literal l : c) {
      if (std::find(k.lits.begin(), k.lits.end(), ~l) != k.lits.end()) {
        tautology = true;
        break;
      }
      if (std::find(k.lits.begin(), k.lits.end(), l) == k.lits.end()) k.lits.push_back(l);
    }
    if (tautology) continue;
    k.sorted = k.lits;
    std::sort(k.sorted.begin(), k.sorted.end());
    if (!seen.insert(k.sorted).second) continue;
    kept.push_back(std::move(k));
  }

  // Sets are pairwise distinct now, so subset means proper subset.
  std::vector<std::size_t> by_size(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) by_size[i] = i;
  std::stable_sort(by_size.begin(), by_size.end(),
                   [&](std::size_t a, std::size_t b) { return kept[a].sorted.size() < kept[b].sorted.size(); });
  std::vector<bool> dropped(kept.size(), false);
  for (std::size_t x = 0; x < by_size.size(); ++x) {
    std::size_t i = by_size[x];
    if (dropped[i]) continue;
    for (std::size_t y = x + 1; y < by_size.size(); ++y) {
      std::size_t j = by_size[y];
      if (dropped[j] || kept[j].sorted.size() == kept[i].sorted.size()) continue;
      if (std::includes(kept[j].sorted.begin(), kept[j].sorted.end(), kept[i].sorted.begin(), kept[i].sorted.end()))
        dropped[j] = true;
    }
  }

  std::vector<Clause> out;
  for (std::size_t i = 0; i < kept.size(); ++i)
    if (!dropped[i]) out.emplace_back(std::move(kept[i].lits));
  return CnfFormula(f.num_vars(), std::move(out));
}

}  // namespace clausekit::logic
