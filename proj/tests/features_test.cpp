#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "clausekit/features.hpp"
#include "support.hpp"

using namespace clausekit;

namespace {

// Straightforward recount used as an oracle: maps and sets, no sorting tricks.
struct Recount {
  std::map<std::string, double> values;

  static std::vector<double> stats(const std::vector<double>& xs) {
    double n = static_cast<double>(xs.size());
    double mean = 0;
    for (double x : xs) mean += x / n;
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean) / n;
    std::map<double, int> hist;
    for (double x : xs) hist[x]++;
    double h = 0;
    for (auto [v, c] : hist) h -= (c / n) * std::log(c / n);
    return {mean, mean == 0 ? 0 : std::sqrt(var) / mean, *std::min_element(xs.begin(), xs.end()),
            *std::max_element(xs.begin(), xs.end()), h};
  }

  void put(const std::string& group, const std::vector<double>& xs) {
    auto s = stats(xs);
    const char* names[] = {"mean", "coeff", "min", "max", "entropy"};
    for (int i = 0; i < 5; ++i) values[group + "_" + names[i]] = s[i];
  }

  explicit Recount(const CnfFormula& f) {
    double n = static_cast<double>(f.num_vars()), m = static_cast<double>(f.num_clauses());
    values["num_vars"] = n;
    values["num_clauses"] = m;
    values["clause_var_ratio"] = m / n;
    values["var_clause_ratio"] = n / m;
    values["ratio_dist_4_26"] = std::fabs(m / n - 4.26);
    std::map<Var, double> deg, pos, occ, horn;
    std::vector<double> cdeg, cpos;
    double bin = 0, ter = 0, hornc = 0;
    for (const Clause& c : f.clauses()) {
      std::set<std::int64_t> lits;
      std::set<Var> vars;
      for (Literal l : c) {
        lits.insert(l.to_dimacs());
        vars.insert(l.var);
      }
      int p = 0;
      for (auto l : lits) p += l > 0;
      cdeg.push_back(static_cast<double>(vars.size()));
      cpos.push_back(static_cast<double>(p) / lits.size());
      bin += lits.size() == 2;
      ter += lits.size() == 3;
      hornc += p <= 1;
      for (Var v : vars) {
        deg[v] += 1;
        if (p <= 1) horn[v] += 1;
        else horn[v] += 0;
      }
      for (auto l : lits) {
        Var v = static_cast<Var>(std::llabs(l));
        occ[v] += 1;
        pos[v] += l > 0;
      }
    }
    std::vector<double> vd, vp, vh;
    for (auto [v, d] : deg) {
      vd.push_back(d);
      vp.push_back(pos[v] / occ[v]);
      vh.push_back(horn[v]);
    }
    put("vcg_var", vd);
    put("vcg_clause", cdeg);
    put("pos_frac_clause", cpos);
    put("pos_frac_var", vp);
    values["binary_fraction"] = bin / m;
    values["ternary_fraction"] = ter / m;
    values["horn_fraction"] = hornc / m;
    put("horn_var", vh);
  }
};

}  // namespace

TEST(Features, SchemaShape) {
  const auto& names = feature_names();
  ASSERT_EQ(names.size(), 48u);
  std::set<std::string> unique(names.begin(), names.end());
  EXPECT_EQ(unique.size(), 48u);
  EXPECT_EQ(names[0], "num_vars");
  EXPECT_EQ(names[33], "reserved_0");
  EXPECT_EQ(names[47], "reserved_14");
}

TEST(Features, ProblemSizeOfUf20Shape) {
  std::mt19937_64 rng(2);
  FeatureVector fv = extract_features(clausekit::testing::random_ksat(rng, 20, 91));
  EXPECT_EQ(fv.at("num_vars"), 20);
  EXPECT_EQ(fv.at("num_clauses"), 91);
  EXPECT_NEAR(fv.at("clause_var_ratio"), 4.55, 1e-12);
  EXPECT_EQ(fv.at("ternary_fraction"), 1.0);
}

TEST(Features, SingleUnitClause) {
  FeatureVector fv = extract_features(CnfFormula(1, {Clause{1}}));
  EXPECT_EQ(fv.at("vcg_var_mean"), 1);
  EXPECT_EQ(fv.at("vcg_var_coeff"), 0);
  EXPECT_EQ(fv.at("horn_fraction"), 1);
}

TEST(Features, DegenerateFormula) {
  EXPECT_THROW(extract_features(CnfFormula()), DegenerateFormula);
  EXPECT_THROW(extract_features(CnfFormula(3, {})), DegenerateFormula);
}

TEST(Features, MatchesRecountOracle) {
  std::mt19937_64 rng(31);
  for (int iter = 0; iter < 100; ++iter) {
    std::size_t n = 5 + rng() % 20;
    std::vector<Clause> cs;
    for (std::size_t i = 0, m = 1 + rng() % 80; i < m; ++i) {
      std::vector<Literal> lits;
      for (std::size_t k = 0, len = 1 + rng() % 4; k < len; ++k)
        lits.emplace_back(static_cast<Var>(1 + rng() % n), (rng() & 1) != 0);
      cs.emplace_back(std::move(lits));
    }
    CnfFormula f(n, cs);
    FeatureVector fv = extract_features(f);
    Recount oracle(f);
    const auto& names = feature_names();
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      if (names[i].rfind("reserved_", 0) == 0) {
        ASSERT_EQ(fv[i], 0.0);
        continue;
      }
      ASSERT_NEAR(fv[i], oracle.values.at(names[i]), 1e-9) << names[i];
    }
  }
}

TEST(Features, InvariantUnderPermutationAndRenaming) {
  std::mt19937_64 rng(12);
  for (int iter = 0; iter < 50; ++iter) {
    CnfFormula f = clausekit::testing::random_ksat(rng, 20, 91);
    FeatureVector base = extract_features(f);

    std::vector<Var> perm(20);
    for (Var v = 0; v < 20; ++v) perm[v] = v + 1;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Clause> cs;
    for (const Clause& c : f.clauses()) {
      std::vector<Literal> lits;
      for (Literal l : c) lits.emplace_back(perm[l.var - 1], l.negated);
      std::shuffle(lits.begin(), lits.end(), rng);
      cs.emplace_back(std::move(lits));
    }
    std::shuffle(cs.begin(), cs.end(), rng);
    EXPECT_EQ(extract_features(CnfFormula(20, cs)), base);

    for (std::size_t i = 0; i < kNumFeatures; ++i) ASSERT_TRUE(std::isfinite(base[i]));
    for (const char* g : {"vcg_var", "vcg_clause", "pos_frac_clause", "pos_frac_var", "horn_var"}) {
      double h = base.at(std::string(g) + "_entropy");
      std::size_t support = std::string(g).find("clause") != std::string::npos ? 91 : 20;
      EXPECT_GE(h, 0);
      EXPECT_LE(h, std::log(static_cast<double>(support)) + 1e-12);
    }
    for (const char* fr : {"binary_fraction", "ternary_fraction", "horn_fraction", "pos_frac_clause_mean"}) {
      EXPECT_GE(base.at(fr), 0);
      EXPECT_LE(base.at(fr), 1);
    }
  }
}
