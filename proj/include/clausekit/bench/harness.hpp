#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "clausekit/features.hpp"
#include "clausekit/rl/episode.hpp"
#include "clausekit/rl/policy.hpp"
#include "clausekit/solver/solver.hpp"
#include "clausekit/solver/vsids.hpp"

namespace clausekit::bench {

inline constexpr int kCsvSchemaVersion = 1;
inline constexpr const char* kCsvHeader = "instance,heuristic,verdict,time_s,decisions,conflicts,propagations,seed";
inline constexpr const char* kVsidsName = "vsids";
inline constexpr const char* kRlName = "rl";

struct BenchRecord {
  std::string instance;
  std::string heuristic;
  solver::Verdict verdict = solver::Verdict::Unknown;
  double time_s = 0.0;
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t seed = 0;
};

struct FeatureTiming {
  std::string instance;
  double time_s = 0.0;
};

struct ComparisonOptions {
  solver::Limits limits;
  std::size_t repetitions = 3;
  std::uint64_t seed = 0;
  std::size_t parallel = 1;  // concurrent instances; 1 = sequential
  solver::SolverOptions solver_options;
};

struct Comparison {
  std::vector<BenchRecord> records;  // per instance: vsids, then rl
  std::vector<FeatureTiming> feature_times;
  std::vector<std::string> warnings;
};

class MismatchedCoverage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class Run>
BenchRecord best_of(const std::string& instance, const char* name, std::size_t reps, std::uint64_t seed, Run&& run) {
  BenchRecord best;
  best.instance = instance;
  best.heuristic = name;
  best.seed = seed;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, reps); ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    solver::SolveResult res = run();
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (r == 0) {
      best.verdict = res.verdict;
      best.decisions = res.stats.decisions;
      best.conflicts = res.stats.conflicts;
      best.propagations = res.stats.propagations;
      best.time_s = dt;
    } else {
      if (res.verdict != best.verdict || res.stats.decisions != best.decisions)
        throw std::logic_error("bench: repeated run of " + instance + " with " + name + " was not reproducible");
      best.time_s = std::min(best.time_s, dt);
    }
  }
  return best;
}

}  // namespace detail

/// Runs VSIDS and the greedy policy on each instance under the same limits
/// and seed. Time covers solving only and is the minimum over repetitions;
/// feature extraction is timed separately. Limit hits are recorded as
/// Unknown verdicts.
inline Comparison run_comparison(const std::vector<std::string>& names, const std::vector<CnfFormula>& formulas,
                                 const rl::Policy& policy, const ComparisonOptions& opts = {}) {
  if (names.size() != formulas.size()) throw std::invalid_argument("bench: names and formulas differ in length");
  if (formulas.empty()) throw std::invalid_argument("bench: empty test set");
  for (const auto& f : formulas) rl::check_shape(policy.shape(), f);

  Comparison out;
  out.records.resize(2 * formulas.size());
  out.feature_times.resize(formulas.size());
  if (opts.parallel > 1)
    out.warnings.push_back("instances ran concurrently; wall times are not comparable with sequential runs");

  auto run_one = [&](std::size_t i) {
    const CnfFormula& f = formulas[i];
    const auto t0 = std::chrono::steady_clock::now();
    FeatureVector feats = extract_features(f);
    out.feature_times[i] = {names[i],
                            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
    out.records[2 * i] = detail::best_of(names[i], kVsidsName, opts.repetitions, opts.seed, [&] {
      solver::Vsids h(f.num_vars());
      return solver::solve(f, h, opts.limits, opts.solver_options);
    });
    out.records[2 * i + 1] = detail::best_of(names[i], kRlName, opts.repetitions, opts.seed, [&] {
      rl::RlHeuristic h(policy, rl::DecisionMode::Greedy, opts.seed);
      h.use_features(feats);
      return solver::solve(f, h, opts.limits, opts.solver_options);
    });
  };

  if (opts.parallel <= 1) {
    for (std::size_t i = 0; i < formulas.size(); ++i) run_one(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(opts.parallel, formulas.size()); ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < formulas.size();) {
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return out;
}

inline void write_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kCsvHeader << '\n';
  out << std::setprecision(9);
  for (const auto& r : records)
    out << r.instance << ',' << r.heuristic << ',' << solver::to_string(r.verdict) << ',' << r.time_s << ','
        << r.decisions << ',' << r.conflicts << ',' << r.propagations << ',' << r.seed << '\n';
}

inline void write_feature_times_csv(std::ostream& out, const std::vector<FeatureTiming>& times) {
  out << "instance,feature_time_s\n" << std::setprecision(9);
  for (const auto& t : times) out << t.instance << ',' << t.time_s << '\n';
}

/// Median with the middle-pair mean for even sizes.
inline double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of an empty series");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

struct HeuristicSummary {
  double median_time_s = 0.0;
  double median_decisions = 0.0;
  double mean_decisions = 0.0;
  double mean_conflicts = 0.0;
  std::size_t sat = 0, unsat = 0, unknown = 0;

  bool operator==(const HeuristicSummary&) const = default;
};

struct Summary {
  std::size_t instances = 0;
  HeuristicSummary vsids, rl;
  double fraction_rl_faster = 0.0;  // strict wins over all instances

  bool operator==(const Summary&) const = default;
};

/// Records must hold exactly one vsids and one rl entry per instance.
inline Summary summarize(const std::vector<BenchRecord>& records) {
  std::map<std::string, const BenchRecord*> vs, rl;
  for (const auto& r : records) {
    auto& slot = r.heuristic == kVsidsName ? vs : r.heuristic == kRlName ? rl : throw MismatchedCoverage("unknown heuristic " + r.heuristic);
    if (!slot.emplace(r.instance, &r).second)
      throw MismatchedCoverage("duplicate record for " + r.instance + " / " + r.heuristic);
  }
  if (vs.size() != rl.size()) throw MismatchedCoverage("heuristics cover different instance counts");
  for (auto a = vs.begin(), b = rl.begin(); a != vs.end(); ++a, ++b)
    if (a->first != b->first) throw MismatchedCoverage("instance sets differ at " + a->first + " / " + b->first);
  if (vs.empty()) throw MismatchedCoverage("no records");

  auto side = [](const std::map<std::string, const BenchRecord*>& m) {
    HeuristicSummary h;
    std::vector<double> times, decisions;
    double dsum = 0, csum = 0;
    for (const auto& [name, r] : m) {
      times.push_back(r->time_s);
      decisions.push_back(static_cast<double>(r->decisions));
      dsum += static_cast<double>(r->decisions);
      csum += static_cast<double>(r->conflicts);
      (r->verdict == solver::Verdict::Sat ? h.sat : r->verdict == solver::Verdict::Unsat ? h.unsat : h.unknown)++;
    }
    h.median_time_s = median(times);
    h.median_decisions = median(decisions);
    h.mean_decisions = dsum / static_cast<double>(m.size());
    h.mean_conflicts = csum / static_cast<double>(m.size());
    return h;
  };

  Summary s;
  s.instances = vs.size();
  s.vsids = side(vs);
  s.rl = side(rl);
  std::size_t wins = 0;
  for (const auto& [name, r] : rl) wins += r->time_s < vs.at(name)->time_s ? 1 : 0;
  s.fraction_rl_faster = static_cast<double>(wins) / static_cast<double>(s.instances);
  return s;
}

inline void write_summary_text(std::ostream& out, const Summary& s) {
  out << std::fixed << std::setprecision(6);
  out << "instances: " << s.instances << '\n';
  out << "median time (s): vsids " << s.vsids.median_time_s << ", rl " << s.rl.median_time_s << '\n';
  out << "rl strictly faster on " << s.fraction_rl_faster * 100.0 << "% of instances\n";
  out << "median decisions: vsids " << s.vsids.median_decisions << ", rl " << s.rl.median_decisions << '\n';
  out << "mean decisions: vsids " << s.vsids.mean_decisions << ", rl " << s.rl.mean_decisions << '\n';
  out << "mean conflicts: vsids " << s.vsids.mean_conflicts << ", rl " << s.rl.mean_conflicts << '\n';
  out << "verdicts sat/unsat/unknown: vsids " << s.vsids.sat << '/' << s.vsids.unsat << '/' << s.vsids.unknown
      << ", rl " << s.rl.sat << '/' << s.rl.unsat << '/' << s.rl.unknown << '\n';
  out.unsetf(std::ios::floatfield);
}

inline void write_summary_kv(std::ostream& out, const Summary& s, double mean_feature_time_s = -1.0) {
  out << std::setprecision(12);
  out << "instances=" << s.instances << '\n';
  auto side = [&](const char* p, const HeuristicSummary& h) {
    out << p << ".median_time_s=" << h.median_time_s << '\n';
    out << p << ".median_decisions=" << h.median_decisions << '\n';
    out << p << ".mean_decisions=" << h.mean_decisions << '\n';
    out << p << ".mean_conflicts=" << h.mean_conflicts << '\n';
    out << p << ".sat=" << h.sat << '\n' << p << ".unsat=" << h.unsat << '\n' << p << ".unknown=" << h.unknown << '\n';
  };
  side(kVsidsName, s.vsids);
  side(kRlName, s.rl);
  out << "fraction_rl_faster=" << s.fraction_rl_faster << '\n';
  if (mean_feature_time_s >= 0) out << "mean_feature_time_s=" << mean_feature_time_s << '\n';
}

}  // namespace clausekit::bench
