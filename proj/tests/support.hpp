#pragma once

// Test-only oracles and generators. Nothing here calls into the solver,
// converter or simplifier it is used to check.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clausekit/cnf.hpp"
#include "clausekit/logic/expr.hpp"

namespace clausekit::testing {

/// Uniform random k-SAT with distinct variables per clause and random signs.
inline CnfFormula random_ksat(std::mt19937_64& rng, std::size_t n, std::size_t m, std::size_t k = 3) {
  std::vector<Clause> clauses;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Literal> lits;
    while (lits.size() < k) {
      Var v = static_cast<Var>(rng() % n) + 1;
      bool dup = false;
      for (auto l : lits) dup |= l.var == v;
      if (!dup) lits.emplace_back(v, (rng() & 1) != 0);
    }
    clauses.emplace_back(std::move(lits));
  }
  return CnfFormula(n, std::move(clauses));
}

/// Evaluates a total assignment given as a bitmask (bit v-1 = value of x_v).
inline bool satisfies_mask(const CnfFormula& f, std::uint64_t mask) {
  for (const Clause& c : f.clauses()) {
    bool sat = false;
    for (Literal l : c) {
      bool val = (mask >> (l.var - 1)) & 1;
      if (val != l.negated) {
        sat = true;
        break;
      }
    }
    if (!sat) return false;
  }
  return true;
}

/// Exhaustive satisfiability check; returns a model mask when one exists.
inline std::optional<std::uint64_t> brute_force_model(const CnfFormula& f) {
  const std::uint64_t total = std::uint64_t{1} << f.num_vars();
  for (std::uint64_t mask = 0; mask < total; ++mask)
    if (satisfies_mask(f, mask)) return mask;
  return std::nullopt;
}

inline std::vector<std::uint64_t> all_models(const CnfFormula& f) {
  std::vector<std::uint64_t> out;
  const std::uint64_t total = std::uint64_t{1} << f.num_vars();
  for (std::uint64_t mask = 0; mask < total; ++mask)
    if (satisfies_mask(f, mask)) out.push_back(mask);
  return out;
}

inline bool clause_satisfied_by_mask(const Clause& c, std::uint64_t mask) {
  for (Literal l : c)
    if ((((mask >> (l.var - 1)) & 1) != 0) != l.negated) return true;
  return false;
}

/// Direct recursive evaluation of an expression tree.
inline bool eval_expr(const logic::LogicalExpr& e, const std::map<std::string, bool>& env) {
  using K = logic::LogicalExpr::Kind;
  switch (e.kind) {
    case K::Atom: return env.at(e.name);
    case K::Not: return !eval_expr(e.children[0], env);
    case K::And:
      for (const auto& c : e.children)
        if (!eval_expr(c, env)) return false;
      return true;
    case K::Or:
      for (const auto& c : e.children)
        if (eval_expr(c, env)) return true;
      return false;
    case K::Implies: return !eval_expr(e.children[0], env) || eval_expr(e.children[1], env);
    case K::Iff: return eval_expr(e.children[0], env) == eval_expr(e.children[1], env);
  }
  return false;
}

inline logic::LogicalExpr random_expr(std::mt19937_64& rng, std::size_t num_atoms, int depth) {
  using E = logic::LogicalExpr;
  auto atom = [&] { return E::atom("A" + std::to_string(rng() % num_atoms)); };
  if (depth <= 0 || rng() % 4 == 0) return atom();
  auto sub = [&] { return random_expr(rng, num_atoms, depth - 1); };
  switch (rng() % 5) {
    case 0: return E::negation(sub());
    case 1:
    case 2: {
      std::vector<E> cs;
      std::size_t n = 2 + rng() % 2;
      for (std::size_t i = 0; i < n; ++i) cs.push_back(sub());
      return rng() % 2 ? E::conjunction(std::move(cs)) : E::disjunction(std::move(cs));
    }
    case 3: return E::implies(sub(), sub());
    default: return E::iff(sub(), sub());
  }
}

}  // namespace clausekit::testing
