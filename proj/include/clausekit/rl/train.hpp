#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "clausekit/rl/checkpoint.hpp"
#include "clausekit/rl/episode.hpp"
#include "clausekit/rl/ppo.hpp"

namespace clausekit::rl {

struct TrainLogRow {
  std::size_t window = 0;
  std::uint64_t steps = 0;  // cumulative transitions
  double mean_reward = 0;   // mean undiscounted episode return in the window
  double mean_decisions = 0;
  std::size_t episodes = 0;
  PpoMetrics metrics;
};

struct TrainOptions {
  std::string checkpoint_path;         // empty: no checkpoints
  std::size_t checkpoint_every = 10;   // windows
  std::function<void(const TrainLogRow&)> on_window;
};

/// Collects whole sampled episodes over the dataset (reshuffled each pass)
/// and runs one PPO update per rollout window, until `steps` transitions.
inline std::vector<TrainLogRow> train(Policy& p, const std::vector<CnfFormula>& dataset, std::uint64_t steps,
                                      const TrainOptions& opts = {}) {
  std::vector<TrainLogRow> log;
  if (steps == 0) return log;
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  for (const auto& f : dataset) check_shape(p.shape(), f);

  const auto& cfg = p.config();
  std::vector<std::size_t> order(dataset.size());
  std::size_t cursor = order.size();
  std::uint64_t done_steps = 0;
  std::vector<Transition> window;
  std::vector<std::int64_t> returns;
  std::vector<std::size_t> lengths;

  auto flush = [&] {
    TrainLogRow row;
    row.window = log.size();
    row.metrics = ppo_update(p, window);
    row.steps = done_steps;
    row.episodes = returns.size();
    for (std::size_t i = 0; i < returns.size(); ++i) {
      row.mean_reward += static_cast<double>(returns[i]) / static_cast<double>(returns.size());
      row.mean_decisions += static_cast<double>(lengths[i]) / static_cast<double>(returns.size());
    }
    log.push_back(row);
    if (opts.on_window) opts.on_window(row);
    if (!opts.checkpoint_path.empty() && opts.checkpoint_every > 0 && log.size() % opts.checkpoint_every == 0)
      save_policy_file(p, opts.checkpoint_path);
    window.clear();
    returns.clear();
    lengths.clear();
  };

  std::size_t empty_streak = 0;
  while (done_steps < steps) {
    if (cursor == order.size()) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::shuffle(order.begin(), order.end(), p.rng());
      cursor = 0;
    }
    const CnfFormula& f = dataset[order[cursor++]];
    solver::Limits limits;
    limits.max_decisions = std::min<std::uint64_t>(cfg.max_episode_decisions, steps - done_steps);
    Episode e = run_episode(f, p, limits, p.rng()());
    if (e.trajectory.empty()) {
      // Instances decided by propagation alone give no transitions.
      if (++empty_streak > dataset.size()) throw std::runtime_error("train: no instance requires a decision");
      continue;
    }
    empty_streak = 0;
    done_steps += e.trajectory.size();
    returns.push_back(e.total_reward());
    lengths.push_back(e.trajectory.size());
    for (auto& t : e.trajectory) window.push_back(std::move(t));
    if (window.size() >= cfg.rollout_window || done_steps >= steps) flush();
  }
  return log;
}

inline void write_train_log_csv(std::ostream& out, const std::vector<TrainLogRow>& log) {
  out << "window,steps,mean_reward,mean_decisions\n";
  for (const auto& r : log) out << r.window << ',' << r.steps << ',' << r.mean_reward << ',' << r.mean_decisions << '\n';
}

}  // namespace clausekit::rl
