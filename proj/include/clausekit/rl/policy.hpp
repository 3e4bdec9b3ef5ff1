#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "clausekit/rl/network.hpp"
#include "clausekit/rl/observation.hpp"
#include "clausekit/solver/state.hpp"

namespace clausekit::rl {

struct PpoConfig {
  double learning_rate = 0.0002;
  double clip_epsilon = 0.2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  int epochs = 4;
  std::size_t minibatch_size = 64;
  std::size_t rollout_window = 2048;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;  // per network; 0 disables clipping
  bool normalize_advantages = true;
  std::size_t hidden_size = 256;
  std::size_t hidden_layers = 2;
  std::uint64_t max_episode_decisions = 500;
  RewardMode reward_mode = RewardMode::Absolute;

  bool operator==(const PpoConfig&) const = default;
};

class AllMasked : public std::logic_error {
 public:
  AllMasked() : std::logic_error("policy: every action is masked") {}
};

/// Actor and critic for a fixed problem shape, plus the optimizer state
/// that training mutates.
class Policy {
 public:
  Policy() = default;

  Policy(ProblemShape shape, PpoConfig config, std::uint64_t seed)
      : shape_(shape), config_(config), seed_(seed), rng_(seed) {
    if (shape.num_vars == 0 || shape.num_clauses == 0) throw std::invalid_argument("policy: empty problem shape");
    std::vector<Eigen::Index> sizes{static_cast<Eigen::Index>(shape.observation_size())};
    std::vector<double> gains;
    for (std::size_t k = 0; k < config.hidden_layers; ++k) {
      sizes.push_back(static_cast<Eigen::Index>(config.hidden_size));
      gains.push_back(std::sqrt(2.0));
    }
    auto actor_sizes = sizes, critic_sizes = sizes;
    actor_sizes.push_back(static_cast<Eigen::Index>(shape.num_actions()));
    critic_sizes.push_back(1);
    auto actor_gains = gains, critic_gains = gains;
    actor_gains.push_back(0.01);
    critic_gains.push_back(1.0);
    actor_ = Mlp(actor_sizes, actor_gains, rng_);
    critic_ = Mlp(critic_sizes, critic_gains, rng_);
    actor_opt_.reset(actor_);
    critic_opt_.reset(critic_);
  }

  [[nodiscard]] const ProblemShape& shape() const { return shape_; }
  [[nodiscard]] const PpoConfig& config() const { return config_; }
  [[nodiscard]] PpoConfig& config() { return config_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] Mlp& actor() { return actor_; }
  [[nodiscard]] const Mlp& actor() const { return actor_; }
  [[nodiscard]] Mlp& critic() { return critic_; }
  [[nodiscard]] const Mlp& critic() const { return critic_; }
  [[nodiscard]] AdamState& actor_optimizer() { return actor_opt_; }
  [[nodiscard]] AdamState& critic_optimizer() { return critic_opt_; }
  [[nodiscard]] std::mt19937_64& rng() { return rng_; }

  /// Network input for a flattened observation. The 48 global features are
  /// squashed with sign(x)*log(1+|x|) so raw counts do not saturate tanh.
  [[nodiscard]] Vector prepare(const Vector& obs) const {
    if (static_cast<std::size_t>(obs.size()) != shape_.observation_size())
      throw std::invalid_argument("policy: observation length " + std::to_string(obs.size()) + ", expected " +
                                  std::to_string(shape_.observation_size()));
    Vector x = obs;
    for (Eigen::Index i = x.size() - static_cast<Eigen::Index>(kNumFeatures); i < x.size(); ++i)
      x[i] = std::copysign(std::log1p(std::fabs(x[i])), x[i]);
    return x;
  }

  [[nodiscard]] Vector logits(const Vector& obs) const { return actor_.forward(prepare(obs)); }
  [[nodiscard]] double value(const Vector& obs) const { return critic_.forward(prepare(obs))[0]; }

  bool operator==(const Policy& o) const {
    return shape_ == o.shape_ && config_ == o.config_ && seed_ == o.seed_ && actor_ == o.actor_ && critic_ == o.critic_;
  }

 private:
  ProblemShape shape_;
  PpoConfig config_;
  std::uint64_t seed_ = 0;
  std::mt19937_64 rng_;
  Mlp actor_, critic_;
  AdamState actor_opt_, critic_opt_;
};

/// Per-variable flag: 1 when the variable is assigned.
using AssignedMask = std::vector<std::uint8_t>;

inline AssignedMask assigned_mask(const Assignment& a) {
  AssignedMask m(a.size(), 0);
  for (Var v = 1; v <= a.size(); ++v) m[v - 1] = a[v] != Tribool::Undef ? 1 : 0;
  return m;
}

inline bool action_legal(const AssignedMask& mask, std::size_t action) { return mask[action / 2] == 0; }

/// Log-probabilities of the masked softmax; masked actions get -inf.
inline Vector masked_log_softmax(const Vector& logits, const AssignedMask& mask) {
  double mx = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (Eigen::Index a = 0; a < logits.size(); ++a) {
    if (!action_legal(mask, static_cast<std::size_t>(a))) continue;
    any = true;
    if (std::isnan(logits[a]) || logits[a] > mx) mx = logits[a];
    if (std::isnan(mx)) break;
  }
  if (!any) throw AllMasked();
  double sum = 0;
  for (Eigen::Index a = 0; a < logits.size(); ++a)
    if (action_legal(mask, static_cast<std::size_t>(a))) sum += std::exp(logits[a] - mx);
  const double lse = mx + std::log(sum);
  Vector out(logits.size());
  for (Eigen::Index a = 0; a < logits.size(); ++a)
    out[a] = action_legal(mask, static_cast<std::size_t>(a)) ? logits[a] - lse
                                                              : -std::numeric_limits<double>::infinity();
  return out;
}

inline Vector masked_softmax(const Vector& logits, const AssignedMask& mask) {
  Vector lp = masked_log_softmax(logits, mask);
  Vector p(lp.size());
  for (Eigen::Index a = 0; a < lp.size(); ++a) p[a] = std::isinf(lp[a]) ? 0.0 : std::exp(lp[a]);
  return p;
}

inline solver::HeuristicDecision action_to_decision(std::size_t action) {
  return {static_cast<Var>(action / 2 + 1), action % 2 == 0};
}

inline std::size_t decision_to_action(solver::HeuristicDecision d) { return 2 * (d.var - 1) + (d.value ? 0 : 1); }

enum class DecisionMode { Sample, Greedy };

struct PolicyOutput {
  std::size_t action = 0;
  double log_prob = 0.0;
  solver::HeuristicDecision decision;
};

/// Greedy picks the masked argmax (lowest index on ties); sampling inverts
/// the masked CDF with one uniform draw.
inline PolicyOutput policy_choose(const Vector& logits, const AssignedMask& mask, DecisionMode mode,
                                  std::mt19937_64* rng) {
  Vector lp = masked_log_softmax(logits, mask);
  std::size_t chosen = lp.size();
  if (mode == DecisionMode::Greedy) {
    for (Eigen::Index a = 0; a < lp.size(); ++a) {
      if (!action_legal(mask, static_cast<std::size_t>(a))) continue;
      if (chosen == static_cast<std::size_t>(lp.size()) || logits[a] > logits[static_cast<Eigen::Index>(chosen)])
        chosen = static_cast<std::size_t>(a);
    }
  } else {
    if (!rng) throw std::invalid_argument("policy: sampling needs a generator");
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(*rng);
    double acc = 0;
    for (Eigen::Index a = 0; a < lp.size(); ++a) {
      if (!action_legal(mask, static_cast<std::size_t>(a))) continue;
      chosen = static_cast<std::size_t>(a);
      acc += std::exp(lp[a]);
      if (u < acc) break;
    }
  }
  if (chosen == static_cast<std::size_t>(lp.size())) throw AllMasked();
  return {chosen, lp[static_cast<Eigen::Index>(chosen)], action_to_decision(chosen)};
}

inline PolicyOutput policy_decide_ex(const Policy& p, const Observation& o, const Assignment& a, DecisionMode mode,
                                     std::mt19937_64* rng = nullptr) {
  return policy_choose(p.logits(o.flatten()), assigned_mask(a), mode, rng);
}

inline solver::HeuristicDecision policy_decide(const Policy& p, const Observation& o, const Assignment& a,
                                               DecisionMode mode, std::mt19937_64* rng = nullptr) {
  return policy_decide_ex(p, o, a, mode, rng).decision;
}

}  // namespace clausekit::rl
