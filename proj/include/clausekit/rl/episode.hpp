#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "clausekit/features.hpp"
#include "clausekit/rl/observation.hpp"
#include "clausekit/rl/policy.hpp"
#include "clausekit/rl/ppo.hpp"
#include "clausekit/solver/solver.hpp"

namespace clausekit::rl {

/// Branching heuristic driven by a policy. When given a trajectory sink it
/// records one transition per decision, rewarded after that decision's
/// propagation.
class RlHeuristic {
 public:
  RlHeuristic(const Policy& policy, DecisionMode mode, std::uint64_t seed,
              std::vector<Transition>* trajectory = nullptr)
      : policy_(policy), mode_(mode), rng_(seed), trajectory_(trajectory) {}

  /// Supplies precomputed global features so solving excludes extraction.
  void use_features(const FeatureVector& f) { preset_ = f; }

  void on_start(const solver::SolverState& s) {
    check_shape(policy_.shape(), s.formula());
    features_ = preset_ ? *preset_ : extract_features(s.formula());
  }

  solver::HeuristicDecision pick(const solver::SolverState& s) {
    Assignment a = s.assignment();
    Observation o = build_observation(a, s.formula(), features_, policy_.shape());
    Vector flat = o.flatten();
    AssignedMask mask = assigned_mask(a);
    PolicyOutput out = policy_choose(policy_.logits(flat), mask, mode_, &rng_);
    if (trajectory_) {
      Transition t;
      t.value = policy_.value(flat);
      t.observation = std::move(flat);
      t.assigned = std::move(mask);
      t.action = static_cast<std::uint32_t>(out.action);
      t.log_prob = out.log_prob;
      trajectory_->push_back(std::move(t));
      score_before_ = compute_reward(o.clause_eval);
    }
    return out.decision;
  }

  void on_propagated(const solver::SolverState& s, bool /*conflict*/) {
    if (trajectory_ && !trajectory_->empty()) trajectory_->back().reward = reward_now(s);
  }

  /// The last decision's reward is re-read from the final state: when the
  /// search ends Sat after conflict-driven assignments, that state is the
  /// completed one.
  void on_finish(const solver::SolverState& s, solver::Verdict v) {
    if (!trajectory_ || trajectory_->empty()) return;
    if (v == solver::Verdict::Sat) trajectory_->back().reward = reward_now(s);
    trajectory_->back().done = true;
  }

 private:
  std::int64_t reward_now(const solver::SolverState& s) const {
    std::int64_t score = compute_reward(clause_evaluations(s.formula(), s.assignment()));
    return policy_.config().reward_mode == RewardMode::Delta ? score - score_before_ : score;
  }

  const Policy& policy_;
  DecisionMode mode_;
  std::mt19937_64 rng_;
  std::vector<Transition>* trajectory_;
  FeatureVector features_;
  std::optional<FeatureVector> preset_;
  std::int64_t score_before_ = 0;
};

struct Episode {
  std::vector<Transition> trajectory;
  solver::SolveResult result;

  [[nodiscard]] std::int64_t total_reward() const {
    std::int64_t r = 0;
    for (const auto& t : trajectory) r += t.reward;
    return r;
  }
};

/// One sampled solver run with the policy as heuristic.
inline Episode run_episode(const CnfFormula& f, const Policy& p, solver::Limits limits, std::uint64_t seed,
                           DecisionMode mode = DecisionMode::Sample, solver::SolverOptions opts = {}) {
  check_shape(p.shape(), f);
  Episode e;
  RlHeuristic h(p, mode, seed, &e.trajectory);
  e.result = solver::solve(f, h, limits, opts);
  return e;
}

}  // namespace clausekit::rl
