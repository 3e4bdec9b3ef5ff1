#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clausekit/cnf.hpp"

namespace clausekit {

inline constexpr std::size_t kNumFeatures = 48;
inline constexpr int kFeatureSchemaVersion = 1;

class DegenerateFormula : public std::runtime_error {
 public:
  DegenerateFormula() : std::runtime_error("feature extraction needs at least one variable and one clause") {}
};

namespace detail {

inline std::array<std::string, kNumFeatures> make_feature_names() {
  std::array<std::string, kNumFeatures> n;
  std::size_t i = 0;
  for (const char* s : {"num_vars", "num_clauses", "clause_var_ratio", "var_clause_ratio", "ratio_dist_4_26"})
    n[i++] = s;
  for (const char* group : {"vcg_var", "vcg_clause", "pos_frac_clause", "pos_frac_var"})
    for (const char* stat : {"mean", "coeff", "min", "max", "entropy"}) n[i++] = std::string(group) + "_" + stat;
  for (const char* s : {"binary_fraction", "ternary_fraction", "horn_fraction"}) n[i++] = s;
  for (const char* stat : {"mean", "coeff", "min", "max", "entropy"}) n[i++] = std::string("horn_var_") + stat;
  for (std::size_t k = 0; i < kNumFeatures; ++k) n[i++] = "reserved_" + std::to_string(k);
  return n;
}

/// mean, variation coefficient (stddev/mean, 0 when mean is 0), min, max,
/// Shannon entropy (nats) of the empirical distribution of values.
inline std::array<double, 5> summary_stats(std::vector<double> xs) {
  if (xs.empty()) return {0, 0, 0, 0, 0};
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double sum = 0;
  for (double x : xs) sum += x;
  double mean = sum / n;
  double sq = 0;
  for (double x : xs) sq += (x - mean) * (x - mean);
  double sd = std::sqrt(sq / n);
  double coeff = mean == 0 ? 0.0 : sd / mean;

  double entropy = 0;
  for (std::size_t i = 0; i < xs.size();) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    double p = static_cast<double>(j - i) / n;
    entropy -= p * std::log(p);
    i = j;
  }
  return {mean, coeff, xs.front(), xs.back(), std::max(0.0, entropy)};
}

}  // namespace detail

/// Slot names, in order. Slots 0..32 hold the implemented SATzilla-base
/// subset; the rest are `reserved_k` and always 0.
///
/// Per-variable statistics range over variables occurring in at least one
/// clause; clause statistics treat each clause as its set of distinct literals.
inline const std::array<std::string, kNumFeatures>& feature_names() {
  static const auto names = detail::make_feature_names();
  return names;
}

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  [[nodiscard]] double operator[](std::size_t i) const { return values[i]; }
  [[nodiscard]] double at(std::string_view name) const {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < kNumFeatures; ++i)
      if (names[i] == name) return values[i];
    throw std::out_of_range("unknown feature " + std::string(name));
  }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline FeatureVector extract_features(const CnfFormula& f) {
  if (f.num_vars() == 0 || f.num_clauses() == 0) throw DegenerateFormula();

  const std::size_t n = f.num_vars();
  std::vector<double> var_deg(n, 0), var_pos(n, 0), var_horn(n, 0);
  std::vector<double> clause_deg, clause_pos_frac;
  double binary = 0, ternary = 0, horn = 0;

  std::vector<Literal> lits;
  std::vector<Var> vars;
  for (const Clause& c : f.clauses()) {
    lits.assign(c.begin(), c.end());
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    vars.clear();
    for (Literal l : lits) vars.push_back(l.var);
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());

    std::size_t pos = 0;
    for (Literal l : lits) pos += l.negated ? 0 : 1;
    bool is_horn = pos <= 1;
    clause_deg.push_back(static_cast<double>(vars.size()));
    clause_pos_frac.push_back(static_cast<double>(pos) / static_cast<double>(lits.size()));
    binary += lits.size() == 2 ? 1 : 0;
    ternary += lits.size() == 3 ? 1 : 0;
    horn += is_horn ? 1 : 0;

    for (Var v : vars) {
      var_deg[v - 1] += 1;
      if (is_horn) var_horn[v - 1] += 1;
    }
    for (Literal l : lits)
      if (!l.negated) var_pos[l.var - 1] += 1;
  }

  // Occurrences per variable counted over literals (a clause holding both v and ~v counts twice).
  std::vector<double> var_occ(n, 0);
  for (const Clause& c : f.clauses()) {
    lits.assign(c.begin(), c.end());
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (Literal l : lits) var_occ[l.var - 1] += 1;
  }

  std::vector<double> deg, pos_frac, horn_occ;
  for (std::size_t v = 0; v < n; ++v) {
    if (var_deg[v] == 0) continue;
    deg.push_back(var_deg[v]);
    pos_frac.push_back(var_pos[v] / var_occ[v]);
    horn_occ.push_back(var_horn[v]);
  }

  const double nv = static_cast<double>(n), m = static_cast<double>(f.num_clauses());
  FeatureVector out;
  auto& x = out.values;
  std::size_t i = 0;
  x[i++] = nv;
  x[i++] = m;
  x[i++] = m / nv;
  x[i++] = nv / m;
  x[i++] = std::abs(m / nv - 4.26);
  for (const auto* group : {&deg, &clause_deg, &clause_pos_frac, &pos_frac})
    for (double s : detail::summary_stats(*group)) x[i++] = s;
  x[i++] = binary / m;
  x[i++] = ternary / m;
  x[i++] = horn / m;
  for (double s : detail::summary_stats(horn_occ)) x[i++] = s;
  return out;
}

}  // namespace clausekit
