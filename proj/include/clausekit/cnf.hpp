#pragma once

#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clausekit {

using Var = std::uint32_t;

/// Three-valued truth. The integer values are the observation encoding:
/// True = +1, False = -1, Undef (unassigned / unevaluated) = 0.
enum class Tribool : std::int8_t { False = -1, Undef = 0, True = 1 };

constexpr int encode(Tribool t) { return static_cast<int>(t); }

constexpr Tribool to_tribool(bool b) { return b ? Tribool::True : Tribool::False; }

constexpr Tribool operator!(Tribool t) { return static_cast<Tribool>(-static_cast<int>(t)); }

inline std::ostream& operator<<(std::ostream& os, Tribool t) {
  switch (t) {
    case Tribool::True: return os << "True";
    case Tribool::False: return os << "False";
    case Tribool::Undef: break;
  }
  return os << "Undef";
}

struct Literal {
  Var var = 1;
  bool negated = false;

  constexpr Literal() = default;
  constexpr Literal(Var v, bool neg) : var(v), negated(neg) {
    if (v == 0) throw std::invalid_argument("literal variable index must be >= 1");
  }

  /// From the DIMACS code +v / -v. Zero is rejected.
  static constexpr Literal from_dimacs(std::int64_t code) {
    if (code == 0) throw std::invalid_argument("0 is not a literal");
    return Literal(static_cast<Var>(code < 0 ? -code : code), code < 0);
  }

  [[nodiscard]] constexpr std::int64_t to_dimacs() const {
    return negated ? -static_cast<std::int64_t>(var) : static_cast<std::int64_t>(var);
  }

  constexpr Literal operator~() const { return Literal(var, !negated); }

  friend constexpr bool operator==(Literal, Literal) = default;
  friend constexpr auto operator<=>(Literal a, Literal b) {
    return a.to_dimacs() <=> b.to_dimacs();
  }
};

inline std::ostream& operator<<(std::ostream& os, Literal l) { return os << l.to_dimacs(); }

/// Per-variable ternary state, indexed by 1-based variable.
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t num_vars) : values_(num_vars, Tribool::Undef) {}

  [[nodiscard]] std::size_t size() const { return values_.size(); }

  [[nodiscard]] Tribool operator[](Var v) const { return values_.at(v - 1); }
  void set(Var v, Tribool t) { values_.at(v - 1) = t; }
  void set(Var v, bool b) { set(v, to_tribool(b)); }
  void assign(Literal l) { set(l.var, !l.negated); }
  void unassign(Var v) { set(v, Tribool::Undef); }

  [[nodiscard]] Tribool value(Literal l) const {
    Tribool t = (*this)[l.var];
    return l.negated ? !t : t;
  }

  [[nodiscard]] bool is_total() const {
    for (Tribool t : values_)
      if (t == Tribool::Undef) return false;
    return true;
  }

  [[nodiscard]] std::span<const Tribool> values() const { return values_; }

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<Tribool> values_;
};

class Clause {
 public:
  Clause() = default;

  explicit Clause(std::vector<Literal> lits) : lits_(std::move(lits)) {
    if (lits_.empty()) throw std::invalid_argument("clause must contain at least one literal");
  }

  Clause(std::initializer_list<std::int64_t> codes) {
    lits_.reserve(codes.size());
    for (auto c : codes) lits_.push_back(Literal::from_dimacs(c));
    if (lits_.empty()) throw std::invalid_argument("clause must contain at least one literal");
  }

  [[nodiscard]] std::span<const Literal> literals() const { return lits_; }
  [[nodiscard]] std::size_t size() const { return lits_.size(); }
  [[nodiscard]] bool empty() const { return lits_.empty(); }
  [[nodiscard]] auto begin() const { return lits_.begin(); }
  [[nodiscard]] auto end() const { return lits_.end(); }
  [[nodiscard]] Literal operator[](std::size_t i) const { return lits_[i]; }

  [[nodiscard]] Var max_var() const {
    Var m = 0;
    for (Literal l : lits_) m = l.var > m ? l.var : m;
    return m;
  }

  friend bool operator==(const Clause&, const Clause&) = default;

 private:
  std::vector<Literal> lits_;
};

class CnfFormula {
 public:
  CnfFormula() = default;

  CnfFormula(std::size_t num_vars, std::vector<Clause> clauses)
      : num_vars_(num_vars), clauses_(std::move(clauses)) {
    for (const Clause& c : clauses_) {
      if (c.empty()) throw std::invalid_argument("formula contains an empty clause");
      if (c.max_var() > num_vars_)
        throw std::invalid_argument("literal variable " + std::to_string(c.max_var()) +
                                    " exceeds num_vars " + std::to_string(num_vars_));
    }
  }

  [[nodiscard]] std::size_t num_vars() const { return num_vars_; }
  [[nodiscard]] std::size_t num_clauses() const { return clauses_.size(); }
  [[nodiscard]] const std::vector<Clause>& clauses() const { return clauses_; }
  [[nodiscard]] const Clause& operator[](std::size_t i) const { return clauses_[i]; }

  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;

 private:
  std::size_t num_vars_ = 0;
  std::vector<Clause> clauses_;
};

/// True if some literal is satisfied, False if every literal is falsified,
/// Undef otherwise.
inline Tribool evaluate_clause(const Clause& c, const Assignment& a) {
  bool pending = false;
  for (Literal l : c) {
    Tribool t = a.value(l);
    if (t == Tribool::True) return Tribool::True;
    if (t == Tribool::Undef) pending = true;
  }
  return pending ? Tribool::Undef : Tribool::False;
}

/// Three-valued conjunction: False dominates, then Undef, then True.
inline Tribool evaluate_formula(const CnfFormula& f, const Assignment& a) {
  Tribool result = Tribool::True;
  for (const Clause& c : f.clauses()) {
    Tribool t = evaluate_clause(c, a);
    if (t == Tribool::False) return Tribool::False;
    if (t == Tribool::Undef) result = Tribool::Undef;
  }
  return result;
}

}  // namespace clausekit
