#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "clausekit/rl/policy.hpp"

namespace clausekit::rl {

struct Transition {
  Vector observation;  // flattened, before input preparation
  AssignedMask assigned;
  std::uint32_t action = 0;
  double log_prob = 0.0;
  std::int64_t reward = 0;
  double value = 0.0;
  bool done = false;
};

class NonFiniteLoss : public std::runtime_error {
 public:
  NonFiniteLoss() : std::runtime_error("ppo: non-finite loss or gradient; update aborted") {}
};

struct Advantages {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// Generalized advantage estimation. An episode ends at every `done`
/// transition; the value after it is taken as 0. A trailing run without
/// `done` is also treated as ended.
inline Advantages compute_gae(std::span<const Transition> batch, double gamma, double lambda) {
  Advantages out;
  out.advantages.assign(batch.size(), 0.0);
  out.returns.assign(batch.size(), 0.0);
  double next_value = 0.0, next_adv = 0.0;
  for (std::size_t i = batch.size(); i-- > 0;) {
    const Transition& t = batch[i];
    bool last = t.done || i + 1 == batch.size();
    if (last) {
      next_value = 0.0;
      next_adv = 0.0;
    }
    double delta = static_cast<double>(t.reward) + gamma * next_value - t.value;
    next_adv = delta + gamma * lambda * next_adv;
    out.advantages[i] = next_adv;
    out.returns[i] = next_adv + t.value;
    next_value = t.value;
  }
  return out;
}

/// min(r*A, clip(r, 1-eps, 1+eps)*A)
inline double clipped_surrogate(double ratio, double advantage, double eps) {
  return std::min(ratio * advantage, std::clamp(ratio, 1.0 - eps, 1.0 + eps) * advantage);
}

struct LossTerms {
  double loss = 0.0;         // minimized: -surrogate + c_v * value_loss - c_e * entropy
  double surrogate = 0.0;    // mean clipped surrogate
  double value_loss = 0.0;   // mean squared error against returns
  double entropy = 0.0;      // mean masked-policy entropy
  double clip_fraction = 0.0;
  double mean_advantage = 0.0;
  std::vector<Dense> actor_grad, critic_grad;
};

/// Loss over a minibatch and, when `with_gradients`, its exact gradient
/// with respect to both networks.
inline LossTerms ppo_loss(const Policy& p, std::span<const Transition* const> mb, std::span<const double> adv,
                          std::span<const double> ret, bool with_gradients = true) {
  const auto& cfg = p.config();
  const Eigen::Index b = static_cast<Eigen::Index>(mb.size());
  const double inv_b = 1.0 / static_cast<double>(b);
  Matrix x(static_cast<Eigen::Index>(p.shape().observation_size()), b);
  for (Eigen::Index j = 0; j < b; ++j) x.col(j) = p.prepare(mb[static_cast<std::size_t>(j)]->observation);

  Mlp::Cache actor_cache, critic_cache;
  Matrix logits = p.actor().forward(x, with_gradients ? &actor_cache : nullptr);
  Matrix values = p.critic().forward(x, with_gradients ? &critic_cache : nullptr);

  LossTerms out;
  Matrix d_logits = Matrix::Zero(logits.rows(), b);
  Matrix d_values = Matrix::Zero(1, b);
  for (Eigen::Index j = 0; j < b; ++j) {
    const Transition& t = *mb[static_cast<std::size_t>(j)];
    const std::size_t sj = static_cast<std::size_t>(j);
    Vector lp = masked_log_softmax(logits.col(j), t.assigned);
    const double logp = lp[t.action];
    const double ratio = std::exp(logp - t.log_prob);
    const double a = adv[sj];
    out.surrogate += clipped_surrogate(ratio, a, cfg.clip_epsilon) * inv_b;
    out.mean_advantage += a * inv_b;
    const bool clipped = (a >= 0 && ratio > 1.0 + cfg.clip_epsilon) || (a < 0 && ratio < 1.0 - cfg.clip_epsilon);
    if (std::fabs(ratio - 1.0) > cfg.clip_epsilon) out.clip_fraction += inv_b;

    double h = 0;
    for (Eigen::Index k = 0; k < lp.size(); ++k)
      if (!std::isinf(lp[k])) h -= std::exp(lp[k]) * lp[k];
    out.entropy += h * inv_b;

    const double err = values(0, j) - ret[sj];
    out.value_loss += err * err * inv_b;

    if (!with_gradients) continue;
    // d(-surrogate)/d(logp) and d(-entropy)/d(logits), averaged over the batch.
    const double g_logp = clipped ? 0.0 : -ratio * a * inv_b;
    for (Eigen::Index k = 0; k < lp.size(); ++k) {
      if (std::isinf(lp[k])) continue;
      const double pk = std::exp(lp[k]);
      double g = g_logp * ((k == static_cast<Eigen::Index>(t.action) ? 1.0 : 0.0) - pk);
      g += cfg.entropy_coef * inv_b * pk * (lp[k] + h);
      d_logits(k, j) = g;
    }
    d_values(0, j) = cfg.value_coef * 2.0 * err * inv_b;
  }
  out.loss = -out.surrogate + cfg.value_coef * out.value_loss - cfg.entropy_coef * out.entropy;
  if (with_gradients) {
    out.actor_grad = p.actor().backward(actor_cache, d_logits);
    out.critic_grad = p.critic().backward(critic_cache, d_values);
  }
  return out;
}

struct PpoMetrics {
  double policy_loss = 0.0;  // -surrogate, averaged over minibatches
  double value_loss = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  std::size_t minibatches = 0;
  // First minibatch of the first epoch, before any parameter change.
  double first_surrogate = 0.0;
  double first_mean_advantage = 0.0;
};

inline void clip_gradients(std::vector<Dense>& g, double max_norm) {
  if (max_norm <= 0) return;
  const double norm = std::sqrt(squared_norm(g));
  if (norm <= max_norm) return;
  const double scale = max_norm / (norm + 1e-12);
  for (auto& l : g) {
    l.w *= scale;
    l.b *= scale;
  }
}

/// Clipped-surrogate update over `batch` (whole episodes in collection
/// order). On a non-finite loss or gradient the policy, including optimizer
/// state, is restored and NonFiniteLoss is thrown.
inline PpoMetrics ppo_update(Policy& p, std::span<const Transition> batch) {
  if (batch.empty()) throw std::invalid_argument("ppo: empty batch");
  const auto& cfg = p.config();
  Advantages est = compute_gae(batch, cfg.gamma, cfg.gae_lambda);
  std::vector<double>& adv = est.advantages;
  if (cfg.normalize_advantages && adv.size() > 1) {
    double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / static_cast<double>(adv.size());
    double var = 0;
    for (double a : adv) var += (a - mean) * (a - mean);
    double sd = std::sqrt(var / static_cast<double>(adv.size()));
    for (double& a : adv) a = (a - mean) / (sd + 1e-8);
  }

  const Policy snapshot = p;
  PpoMetrics m;
  std::vector<std::size_t> order(batch.size());
  std::vector<const Transition*> mb;
  std::vector<double> mb_adv, mb_ret;
  const std::size_t mbs = std::max<std::size_t>(1, cfg.minibatch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), p.rng());
    for (std::size_t start = 0; start < order.size(); start += mbs) {
      const std::size_t end = std::min(order.size(), start + mbs);
      mb.clear();
      mb_adv.clear();
      mb_ret.clear();
      for (std::size_t i = start; i < end; ++i) {
        mb.push_back(&batch[order[i]]);
        mb_adv.push_back(adv[order[i]]);
        mb_ret.push_back(est.returns[order[i]]);
      }
      LossTerms t = ppo_loss(p, mb, mb_adv, mb_ret);
      if (!std::isfinite(t.loss) || !all_finite(t.actor_grad) || !all_finite(t.critic_grad)) {
        p = snapshot;
        throw NonFiniteLoss();
      }
      if (m.minibatches == 0) {
        m.first_surrogate = t.surrogate;
        m.first_mean_advantage = t.mean_advantage;
      }
      clip_gradients(t.actor_grad, cfg.max_grad_norm);
      clip_gradients(t.critic_grad, cfg.max_grad_norm);
      adam_step(p.actor(), p.actor_optimizer(), t.actor_grad, cfg.learning_rate);
      adam_step(p.critic(), p.critic_optimizer(), t.critic_grad, cfg.learning_rate);
      m.policy_loss += -t.surrogate;
      m.value_loss += t.value_loss;
      m.entropy += t.entropy;
      m.clip_fraction += t.clip_fraction;
      ++m.minibatches;
    }
  }
  const double n = static_cast<double>(m.minibatches);
  m.policy_loss /= n;
  m.value_loss /= n;
  m.entropy /= n;
  m.clip_fraction /= n;
  return m;
}

}  // namespace clausekit::rl
