#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "clausekit/cnf.hpp"
#include "clausekit/features.hpp"
#include "clausekit/solver/state.hpp"

namespace clausekit::rl {

struct ProblemShape {
  std::size_t num_vars = 20;
  std::size_t num_clauses = 91;

  [[nodiscard]] std::size_t observation_size() const {
    return num_vars + num_clauses + num_vars * num_clauses + kNumFeatures;
  }
  [[nodiscard]] std::size_t num_actions() const { return 2 * num_vars; }
  bool operator==(const ProblemShape&) const = default;
};

inline std::string to_string(const ProblemShape& s) {
  return "(" + std::to_string(s.num_vars) + ", " + std::to_string(s.num_clauses) + ")";
}

class ShapeMismatch : public std::runtime_error {
 public:
  ShapeMismatch(const ProblemShape& expected, const ProblemShape& got)
      : std::runtime_error("shape mismatch: expected " + to_string(expected) + ", got " + to_string(got)) {}
};

inline ProblemShape shape_of(const CnfFormula& f) { return {f.num_vars(), f.num_clauses()}; }

inline void check_shape(const ProblemShape& expected, const CnfFormula& f) {
  if (shape_of(f) != expected) throw ShapeMismatch(expected, shape_of(f));
}

/// Values are +1 (True / positive), -1 (False / negative) and 0 otherwise.
struct Observation {
  std::vector<double> var_assign;        // n
  std::vector<double> clause_eval;       // m, original clauses only
  std::vector<double> signed_adjacency;  // m x n, row-major by clause
  FeatureVector global;

  [[nodiscard]] Eigen::VectorXd flatten() const {
    Eigen::VectorXd out(var_assign.size() + clause_eval.size() + signed_adjacency.size() + kNumFeatures);
    Eigen::Index k = 0;
    for (double x : var_assign) out[k++] = x;
    for (double x : clause_eval) out[k++] = x;
    for (double x : signed_adjacency) out[k++] = x;
    for (double x : global.values) out[k++] = x;
    return out;
  }
};

/// Incidence matrix of the original clauses. A variable occurring with both
/// signs in one clause is stored as +1.
inline std::vector<double> signed_adjacency(const CnfFormula& f) {
  const std::size_t n = f.num_vars();
  std::vector<double> adj(n * f.num_clauses(), 0.0);
  for (std::size_t i = 0; i < f.num_clauses(); ++i)
    for (Literal l : f.clauses()[i]) {
      double& cell = adj[i * n + (l.var - 1)];
      if (cell != 1.0) cell = l.negated ? -1.0 : 1.0;
    }
  return adj;
}

inline std::vector<double> clause_evaluations(const CnfFormula& f, const Assignment& a) {
  std::vector<double> out;
  out.reserve(f.num_clauses());
  for (const Clause& c : f.clauses()) out.push_back(encode(evaluate_clause(c, a)));
  return out;
}

inline Observation build_observation(const Assignment& a, const CnfFormula& f, const FeatureVector& feats,
                                     const ProblemShape& shape) {
  check_shape(shape, f);
  Observation o;
  o.var_assign.reserve(shape.num_vars);
  for (Var v = 1; v <= shape.num_vars; ++v) o.var_assign.push_back(encode(a[v]));
  o.clause_eval = clause_evaluations(f, a);
  o.signed_adjacency = signed_adjacency(f);
  o.global = feats;
  return o;
}

/// Learned clauses never enter the observation: the solver state keeps the
/// original formula separately.
inline Observation build_observation(const solver::SolverState& s, const FeatureVector& feats,
                                     const ProblemShape& shape) {
  return build_observation(s.assignment(), s.formula(), feats, shape);
}

/// +1 per satisfied clause, -1 per falsified one.
inline std::int64_t compute_reward(std::span<const double> clause_eval) {
  std::int64_t r = 0;
  for (double x : clause_eval) r += x > 0 ? 1 : (x < 0 ? -1 : 0);
  return r;
}

enum class RewardMode { Absolute, Delta };

inline const char* to_string(RewardMode m) { return m == RewardMode::Delta ? "delta" : "absolute"; }

inline RewardMode reward_mode_from_string(const std::string& s) {
  if (s == "absolute") return RewardMode::Absolute;
  if (s == "delta") return RewardMode::Delta;
  throw std::invalid_argument("unknown reward mode: " + s);
}

}  // namespace clausekit::rl
