#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "clausekit/solver/state.hpp"

namespace clausekit::solver {

/// Uniform choice among unassigned variables, fair-coin polarity.
class RandomPick {
 public:
  explicit RandomPick(std::uint64_t seed) : rng_(seed) {}

  HeuristicDecision pick(const SolverState& s) {
    free_.clear();
    for (Var v = 1; v <= s.num_vars(); ++v)
      if (!s.is_assigned(v)) free_.push_back(v);
    if (free_.empty()) throw std::logic_error("random pick: no unassigned variable");
    Var v = free_[rng_() % free_.size()];
    return {v, (rng_() & 1) != 0};
  }

 private:
  std::mt19937_64 rng_;
  std::vector<Var> free_;
};

}  // namespace clausekit::solver
