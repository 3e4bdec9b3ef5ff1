#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "clausekit/cnf.hpp"
#include "clausekit/dimacs.hpp"

namespace clausekit::bench {

/// Uniform random k-SAT: each clause has k distinct variables with fair
/// random signs.
inline CnfFormula random_ksat(std::size_t n, std::size_t m, std::size_t k, std::mt19937_64& rng) {
  if (k > n) throw std::invalid_argument("random_ksat: clause width exceeds variable count");
  std::uniform_int_distribution<Var> pick(1, static_cast<Var>(n));
  std::vector<Clause> clauses;
  clauses.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Literal> lits;
    while (lits.size() < k) {
      Var v = pick(rng);
      bool dup = false;
      for (Literal l : lits) dup |= l.var == v;
      if (!dup) lits.emplace_back(v, (rng() & 1) != 0);
    }
    clauses.emplace_back(std::move(lits));
  }
  return CnfFormula(n, std::move(clauses));
}

/// Exhaustive satisfiability test over all 2^n assignments (n <= 30).
inline bool exhaustively_satisfiable(const CnfFormula& f) {
  const std::size_t n = f.num_vars();
  if (n > 30) throw std::invalid_argument("exhaustive check limited to 30 variables");
  std::vector<std::uint32_t> pos, neg;
  for (const Clause& c : f.clauses()) {
    std::uint32_t p = 0, q = 0;
    for (Literal l : c) (l.negated ? q : p) |= std::uint32_t{1} << (l.var - 1);
    pos.push_back(p);
    neg.push_back(q);
  }
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const auto m32 = static_cast<std::uint32_t>(mask);
    bool ok = true;
    for (std::size_t i = 0; i < pos.size() && ok; ++i) ok = (pos[i] & m32) != 0 || (neg[i] & ~m32) != 0;
    if (ok) return true;
  }
  return false;
}

/// `count` satisfiable instances drawn as uniform random 3-SAT and filtered
/// by the exhaustive check, as a stand-in for the uf20-91 family.
inline std::vector<CnfFormula> generate_satisfiable(std::size_t count, std::uint64_t seed, std::size_t n = 20,
                                                    std::size_t m = 91) {
  std::mt19937_64 rng(seed);
  std::vector<CnfFormula> out;
  while (out.size() < count) {
    CnfFormula f = random_ksat(n, m, 3, rng);
    if (exhaustively_satisfiable(f)) out.push_back(std::move(f));
  }
  return out;
}

/// Writes `uf<n>-<i>.cnf` files (1-based, zero padded) into `dir`.
inline std::vector<std::filesystem::path> write_instances(const std::filesystem::path& dir,
                                                          const std::vector<CnfFormula>& formulas) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    std::string idx = std::to_string(i + 1);
    idx.insert(0, idx.size() < 4 ? 4 - idx.size() : 0, '0');
    auto path = dir / ("uf" + std::to_string(formulas[i].num_vars()) + "-" + idx + ".cnf");
    std::ofstream out(path);
    out << "c generated uniform random 3-SAT, satisfiable\n";
    write_dimacs(out, formulas[i]);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    paths.push_back(path);
  }
  return paths;
}

}  // namespace clausekit::bench
