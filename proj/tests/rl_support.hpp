#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "clausekit/rl/ppo.hpp"

namespace clausekit::testing {

using rl::AssignedMask;
using rl::DecisionMode;
using rl::Policy;
using rl::PolicyOutput;
using rl::PpoConfig;
using rl::Transition;
using rl::Vector;

inline Vector random_observation(std::mt19937_64& rng, const rl::ProblemShape& s) {
  std::uniform_int_distribution<int> tri(-1, 1);
  Vector o(static_cast<Eigen::Index>(s.observation_size()));
  for (Eigen::Index i = 0; i < o.size(); ++i) o[i] = tri(rng);
  for (Eigen::Index i = o.size() - 48; i < o.size(); ++i) o[i] = std::uniform_real_distribution<double>(0, 30)(rng);
  return o;
}

inline PpoConfig tiny_config(std::size_t hidden) {
  PpoConfig c;
  c.hidden_size = hidden;
  c.rollout_window = 64;
  c.minibatch_size = 16;
  return c;
}

struct GradFixture {
  Policy p;
  std::vector<Transition> ts;
  std::vector<double> adv, ret;

  GradFixture(double logp_offset, double advantage) : p({3, 4}, tiny_config(2), 17) {
    std::mt19937_64 rng(6);
    Transition t;
    t.observation = random_observation(rng, p.shape());
    t.assigned = {1, 0, 0};
    t.action = 3;
    Vector lp = rl::masked_log_softmax(p.logits(t.observation), t.assigned);
    t.log_prob = lp[3] + logp_offset;
    t.value = p.value(t.observation);
    ts.push_back(t);
    adv = {advantage};
    ret = {1.3};
  }

  double loss() {
    std::vector<const Transition*> mb{&ts[0]};
    return rl::ppo_loss(p, mb, adv, ret, false).loss;
  }

  /// Largest relative error between analytic and central-difference gradients.
  double max_relative_error(bool actor) {
    std::vector<const Transition*> mb{&ts[0]};
    rl::LossTerms t = rl::ppo_loss(p, mb, adv, ret, true);
    const auto& grads = actor ? t.actor_grad : t.critic_grad;
    std::vector<double> analytic;
    for (const auto& l : grads) {
      for (Eigen::Index i = 0; i < l.w.size(); ++i) analytic.push_back(l.w.data()[i]);
      for (Eigen::Index i = 0; i < l.b.size(); ++i) analytic.push_back(l.b.data()[i]);
    }
    std::vector<double*> params;
    (actor ? p.actor() : p.critic()).for_each_parameter([&](double& d) { params.push_back(&d); });
    if (params.size() != analytic.size()) throw std::logic_error("gradient and parameter counts differ");
    const double h = 1e-4;
    double worst = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      double saved = *params[i];
      *params[i] = saved + h;
      double up = loss();
      *params[i] = saved - h;
      double down = loss();
      *params[i] = saved;
      double numeric = (up - down) / (2 * h);
      double denom = std::max({std::fabs(numeric), std::fabs(analytic[i]), 1e-6});
      worst = std::max(worst, std::fabs(numeric - analytic[i]) / denom);
    }
    return worst;
  }
};


/// Single dummy observation; action 0 pays +1, action 1 pays 0.
inline double bandit_run(std::uint64_t seed, int updates) {
  PpoConfig cfg;
  cfg.hidden_size = 64;
  Policy p({1, 1}, cfg, seed);
  Vector obs = Vector::Ones(static_cast<Eigen::Index>(p.shape().observation_size()));
  std::mt19937_64 rng(seed + 1);
  AssignedMask none{0};
  auto prob0 = [&] { return rl::masked_softmax(p.logits(obs), none)[0]; };
  for (int u = 0; u < updates; ++u) {
    std::vector<Transition> batch;
    for (int i = 0; i < 64; ++i) {
      PolicyOutput out = rl::policy_choose(p.logits(obs), none, DecisionMode::Sample, &rng);
      Transition t;
      t.observation = obs;
      t.assigned = none;
      t.action = static_cast<std::uint32_t>(out.action);
      t.log_prob = out.log_prob;
      t.value = p.value(obs);
      t.reward = out.action == 0 ? 1 : 0;
      t.done = true;
      batch.push_back(t);
    }
    rl::ppo_update(p, batch);
    if (prob0() > 0.9) return prob0();
  }
  return prob0();
}


}  // namespace clausekit::testing
