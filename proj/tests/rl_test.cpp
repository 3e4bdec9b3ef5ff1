#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "clausekit/rl/checkpoint.hpp"
#include "clausekit/rl/episode.hpp"
#include "clausekit/rl/train.hpp"
#include "rl_support.hpp"
#include "support.hpp"

using namespace clausekit;
using namespace clausekit::rl;
using clausekit::testing::bandit_run;
using clausekit::testing::GradFixture;
using clausekit::testing::random_observation;

namespace {

PpoConfig small_config(std::size_t hidden = 16) {
  PpoConfig c;
  c.hidden_size = hidden;
  c.rollout_window = 64;
  c.minibatch_size = 16;
  return c;
}

std::string bytes_of(const Policy& p) { return save_policy(p); }

}  // namespace

// --- observation and reward --------------------------------------------------

TEST(Observation, EncodingExample) {
  CnfFormula f(2, {Clause{1, 2}});
  Assignment a(2);
  a.set(1, true);
  Observation o = build_observation(a, f, extract_features(f), {2, 1});
  EXPECT_EQ(o.var_assign, (std::vector<double>{1, 0}));
  EXPECT_EQ(o.clause_eval, (std::vector<double>{1}));
  EXPECT_EQ(o.signed_adjacency, (std::vector<double>{1, 1}));
}

TEST(Observation, EmptyAssignmentAndLength) {
  std::mt19937_64 rng(1);
  CnfFormula f = clausekit::testing::random_ksat(rng, 20, 91);
  Observation o = build_observation(Assignment(20), f, extract_features(f), {20, 91});
  for (double x : o.var_assign) EXPECT_EQ(x, 0);
  for (double x : o.clause_eval) EXPECT_EQ(x, 0);
  EXPECT_EQ(o.flatten().size(), 1979);
  EXPECT_EQ((ProblemShape{20, 91}.observation_size()), 1979u);
  EXPECT_EQ((ProblemShape{20, 91}.num_actions()), 40u);
}

TEST(Observation, SignedAdjacency) {
  CnfFormula f(3, {Clause{1, -3}, Clause{-2, 2}});
  EXPECT_EQ(signed_adjacency(f), (std::vector<double>{1, 0, -1, 0, 1, 0}));
}

TEST(Observation, ShapeMismatch) {
  CnfFormula f(2, {Clause{1, 2}});
  EXPECT_THROW(build_observation(Assignment(2), f, extract_features(f), {20, 91}), ShapeMismatch);
}

TEST(Reward, Examples) {
  EXPECT_EQ(compute_reward(std::vector<double>(91, 1.0)), 91);
  EXPECT_EQ(compute_reward(std::vector<double>(91, -1.0)), -91);
  EXPECT_EQ(compute_reward(std::vector<double>{1, 1, 1, -1, 0, 0}), 2);
}

// --- policy decisions --------------------------------------------------------

TEST(PolicyDecide, MaskedSoftmaxProperties) {
  std::mt19937_64 rng(3);
  for (int iter = 0; iter < 200; ++iter) {
    Vector z = Vector::Random(10) * 5.0;
    AssignedMask m(5);
    for (auto& b : m) b = rng() % 2;
    m[rng() % 5] = 0;
    Vector p = masked_softmax(z, m);
    double sum = 0;
    for (Eigen::Index a = 0; a < 10; ++a) {
      if (!action_legal(m, static_cast<std::size_t>(a))) ASSERT_EQ(p[a], 0.0);
      sum += p[a];
    }
    ASSERT_NEAR(sum, 1.0, 1e-12);
  }
  EXPECT_THROW(masked_softmax(Vector::Zero(4), AssignedMask{1, 1}), AllMasked);
}

TEST(PolicyDecide, OnlyOneVariableFree) {
  Vector z = Vector::Zero(10);
  z[8] = -1.0;
  z[9] = 0.5;
  AssignedMask m{1, 1, 1, 1, 0};
  auto out = policy_choose(z, m, DecisionMode::Greedy, nullptr);
  EXPECT_EQ(out.decision.var, 5u);
  EXPECT_FALSE(out.decision.value);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(policy_choose(z, m, DecisionMode::Sample, &rng).decision.var, 5u);
}

TEST(PolicyDecide, GreedyTieBreak) {
  auto out = policy_choose(Vector::Zero(8), AssignedMask{1, 0, 0, 0}, DecisionMode::Greedy, nullptr);
  EXPECT_EQ(out.action, 2u);
  EXPECT_EQ(out.decision.var, 2u);
  EXPECT_TRUE(out.decision.value);
}

TEST(PolicyDecide, SamplingMatchesSoftmax) {
  Vector z(8);
  z << 0.3, -1.0, 1.2, 0.0, 2.0, -0.5, 0.7, 0.1;
  AssignedMask m{0, 0, 1, 0};
  Vector p = masked_softmax(z, m);
  std::mt19937_64 rng(99);
  const int draws = 10000;
  std::vector<int> counts(8, 0);
  for (int i = 0; i < draws; ++i) counts[policy_choose(z, m, DecisionMode::Sample, &rng).action]++;
  for (int a = 0; a < 8; ++a) {
    double expect = draws * p[a];
    double sigma = std::sqrt(draws * p[a] * (1 - p[a]));
    if (p[a] == 0) EXPECT_EQ(counts[a], 0);
    else EXPECT_LE(std::fabs(counts[a] - expect), 3 * sigma) << "action " << a;
  }
}

TEST(PolicyDecide, DecisionOnPolicyNeverPicksAssigned) {
  Policy p({4, 3}, small_config(), 5);
  std::mt19937_64 rng(4);
  CnfFormula f(4, {Clause{1, 2}, Clause{-3, 4}, Clause{2, -4}});
  for (int i = 0; i < 100; ++i) {
    Assignment a(4);
    for (Var v = 1; v <= 3; ++v)
      if (rng() % 2) a.set(v, (rng() & 1) != 0);
    Observation o = build_observation(a, f, extract_features(f), p.shape());
    auto d = policy_decide(p, o, a, DecisionMode::Sample, &rng);
    ASSERT_EQ(a[d.var], Tribool::Undef);
  }
}

// --- episodes ----------------------------------------------------------------

TEST(Episode, Uf20ShapedEpisodes) {
  std::mt19937_64 rng(8);
  Policy p({20, 91}, small_config(32), 1);
  int sat = 0;
  for (int i = 0; i < 20; ++i) {
    CnfFormula f = clausekit::testing::random_ksat(rng, 20, 91);
    bool expect_sat = clausekit::testing::brute_force_model(f).has_value();
    Episode e = run_episode(f, p, {}, 100 + i);
    ASSERT_EQ(e.result.verdict == solver::Verdict::Sat, expect_sat);
    EXPECT_EQ(e.trajectory.size(), e.result.stats.decisions);
    for (const auto& t : e.trajectory) {
      ASSERT_GE(t.reward, -91);
      ASSERT_LE(t.reward, 91);
      ASSERT_LT(t.action, 40u);
      if (t.reward == 91) ASSERT_EQ(e.result.verdict, solver::Verdict::Sat);
    }
    if (e.trajectory.empty()) continue;
    EXPECT_TRUE(e.trajectory.back().done);
    for (std::size_t k = 0; k + 1 < e.trajectory.size(); ++k) EXPECT_FALSE(e.trajectory[k].done);
    if (e.result.verdict == solver::Verdict::Sat) {
      ++sat;
      EXPECT_EQ(e.trajectory.back().reward, 91);
    }
  }
  EXPECT_GT(sat, 0);
}

TEST(Episode, PropagationOnlyGivesEmptyTrajectory) {
  CnfFormula f(2, {Clause{1}, Clause{-1, 2}});
  Policy p({2, 2}, small_config(), 1);
  Episode e = run_episode(f, p, {}, 1);
  EXPECT_EQ(e.result.verdict, solver::Verdict::Sat);
  EXPECT_TRUE(e.trajectory.empty());
}

TEST(Episode, DecisionLimit) {
  std::mt19937_64 rng(2);
  CnfFormula f = clausekit::testing::random_ksat(rng, 20, 91);
  Policy p({20, 91}, small_config(), 1);
  solver::Limits lim;
  lim.max_decisions = 1;
  Episode e = run_episode(f, p, lim, 3);
  EXPECT_LE(e.trajectory.size(), 1u);
  EXPECT_EQ(e.result.verdict, solver::Verdict::Unknown);
}

TEST(Episode, DeltaRewardsBounded) {
  std::mt19937_64 rng(5);
  PpoConfig cfg = small_config();
  cfg.reward_mode = RewardMode::Delta;
  Policy p({20, 91}, cfg, 2);
  for (int i = 0; i < 10; ++i) {
    CnfFormula f = clausekit::testing::random_ksat(rng, 20, 91);
    Episode e = run_episode(f, p, {}, i);
    for (const auto& t : e.trajectory) {
      ASSERT_GE(t.reward, -182);
      ASSERT_LE(t.reward, 182);
    }
  }
}

TEST(Episode, RlHeuristicRejectsWrongShape) {
  CnfFormula f(3, {Clause{1, 2, 3}});
  Policy p({20, 91}, small_config(), 1);
  RlHeuristic h(p, DecisionMode::Greedy, 1);
  EXPECT_THROW(solver::solve(f, h), ShapeMismatch);
}

// --- PPO ---------------------------------------------------------------------

TEST(Ppo, ClipExample) {
  EXPECT_DOUBLE_EQ(clipped_surrogate(2.0, 1.0, 0.2), 1.2);
  EXPECT_DOUBLE_EQ(clipped_surrogate(0.5, -1.0, 0.2), -0.8);
  EXPECT_DOUBLE_EQ(clipped_surrogate(1.1, 1.0, 0.2), 1.1);
}

TEST(Ppo, GaeByHand) {
  std::vector<Transition> b(3);
  b[0].reward = 1;
  b[0].value = 0.5;
  b[1].reward = 2;
  b[1].value = 1.0;
  b[1].done = true;
  b[2].reward = 3;
  b[2].value = 0.25;
  b[2].done = true;
  const double g = 0.9, l = 0.8;
  Advantages a = compute_gae(b, g, l);
  double d1 = 2 - 1.0;
  double d0 = 1 + g * 1.0 - 0.5;
  EXPECT_DOUBLE_EQ(a.advantages[1], d1);
  EXPECT_DOUBLE_EQ(a.advantages[0], d0 + g * l * d1);
  EXPECT_DOUBLE_EQ(a.advantages[2], 3 - 0.25);
  EXPECT_DOUBLE_EQ(a.returns[0], a.advantages[0] + 0.5);
}


TEST(Ppo, GradientsMatchFiniteDifferences) {
  GradFixture inside(0.1, 0.7);  // ratio inside the clip range
  EXPECT_LT(inside.max_relative_error(true), 1e-4);
  EXPECT_LT(inside.max_relative_error(false), 1e-4);

  GradFixture clipped(-0.5, 0.7);  // ratio ~1.65, positive advantage: surrogate flat
  EXPECT_LT(clipped.max_relative_error(true), 1e-4);

  GradFixture negative(0.1, -0.4);
  EXPECT_LT(negative.max_relative_error(true), 1e-4);
}

TEST(Ppo, RatioIsOneAtCollection) {
  std::mt19937_64 rng(10);
  Policy p({20, 91}, small_config(), 4);
  std::vector<Transition> batch;
  for (int i = 0; i < 5; ++i) {
    auto e = run_episode(clausekit::testing::random_ksat(rng, 20, 91), p, {}, i);
    for (auto& t : e.trajectory) batch.push_back(std::move(t));
  }
  ASSERT_FALSE(batch.empty());
  PpoMetrics m = ppo_update(p, batch);
  EXPECT_NEAR(m.first_surrogate, m.first_mean_advantage, 1e-12);
}

TEST(Ppo, ZeroLearningRateLeavesParametersBitwiseUnchanged) {
  std::mt19937_64 rng(11);
  PpoConfig cfg = small_config();
  cfg.learning_rate = 0.0;
  Policy p({20, 91}, cfg, 4);
  std::string before = bytes_of(p);
  auto e = run_episode(clausekit::testing::random_ksat(rng, 20, 91), p, {}, 1);
  ASSERT_FALSE(e.trajectory.empty());
  ppo_update(p, e.trajectory);
  EXPECT_EQ(bytes_of(p), before);
}

TEST(Ppo, NonFiniteLossAbortsWithoutChange) {
  std::mt19937_64 rng(12);
  Policy p({20, 91}, small_config(), 4);
  auto e = run_episode(clausekit::testing::random_ksat(rng, 20, 91), p, {}, 1);
  ASSERT_GE(e.trajectory.size(), 1u);
  e.trajectory.back().observation[0] = std::numeric_limits<double>::quiet_NaN();
  std::string before = bytes_of(p);
  EXPECT_THROW(ppo_update(p, e.trajectory), NonFiniteLoss);
  EXPECT_EQ(bytes_of(p), before);
  EXPECT_THROW(ppo_update(p, std::vector<Transition>{}), std::invalid_argument);
}


TEST(Ppo, TwoArmedBandit) { EXPECT_GT(bandit_run(7, 200), 0.9); }

// --- checkpoints -------------------------------------------------------------

TEST(Checkpoint, RoundTrip) {
  Policy p({20, 91}, small_config(), 21);
  std::string bytes = save_policy(p);
  Policy q = load_policy(bytes, ProblemShape{20, 91});
  EXPECT_EQ(q, p);
  EXPECT_EQ(save_policy(q), bytes);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    Vector o = random_observation(rng, p.shape());
    AssignedMask m(20);
    for (auto& b : m) b = rng() % 3 == 0;
    m[rng() % 20] = 0;
    ASSERT_EQ(policy_choose(p.logits(o), m, DecisionMode::Greedy, nullptr).action,
              policy_choose(q.logits(o), m, DecisionMode::Greedy, nullptr).action);
  }
}

TEST(Checkpoint, Errors) {
  Policy p({20, 91}, small_config(), 21);
  std::string bytes = save_policy(p);
  EXPECT_THROW(load_policy(bytes, ProblemShape{10, 42}), ShapeMismatch);
  for (std::size_t cut : {std::size_t{3}, std::size_t{10}, std::size_t{40}, bytes.size() / 2, bytes.size() - 1}) {
    try {
      load_policy(bytes.substr(0, cut));
      ADD_FAILURE() << "truncation at " << cut << " accepted";
    } catch (const VersionMismatch&) {
    } catch (const CorruptCheckpoint&) {
    }
  }
  std::string bumped = bytes;
  bumped[8] = 7;
  EXPECT_THROW(load_policy(bumped), VersionMismatch);
}

// --- training ----------------------------------------------------------------

TEST(Train, ZeroStepsIsNoOp) {
  std::mt19937_64 rng(1);
  Policy p({20, 91}, small_config(), 3);
  std::string before = bytes_of(p);
  EXPECT_TRUE(train(p, {clausekit::testing::random_ksat(rng, 20, 91)}, 0).empty());
  EXPECT_EQ(bytes_of(p), before);
}

TEST(Train, DeterministicAndStepBounded) {
  std::mt19937_64 rng(14);
  std::vector<CnfFormula> data;
  for (int i = 0; i < 6; ++i) data.push_back(clausekit::testing::random_ksat(rng, 20, 91));
  Policy a({20, 91}, small_config(), 8), b({20, 91}, small_config(), 8);
  auto la = train(a, data, 300);
  auto lb = train(b, data, 300);
  EXPECT_EQ(bytes_of(a), bytes_of(b));
  ASSERT_EQ(la.size(), lb.size());
  ASSERT_FALSE(la.empty());
  EXPECT_EQ(la.back().steps, 300u);
  for (std::size_t i = 0; i < la.size(); ++i) {
    EXPECT_EQ(la[i].mean_reward, lb[i].mean_reward);
    EXPECT_EQ(la[i].mean_decisions, lb[i].mean_decisions);
  }
  std::ostringstream csv;
  write_train_log_csv(csv, la);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "window,steps,mean_reward,mean_decisions");
}

TEST(Train, RejectsWrongShape) {
  Policy p({20, 91}, small_config(), 3);
  EXPECT_THROW(train(p, {CnfFormula(3, {Clause{1, 2}})}, 10), ShapeMismatch);
}
