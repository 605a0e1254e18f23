/*
 * Copyright 2026 The alab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "alab/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "oracles/generators.hpp"
#include "oracles/reference.hpp"

namespace alab {
namespace {

OutputMatrix rows(std::initializer_list<std::initializer_list<double>> r) {
  OutputMatrix g;
  g.rows.resize(static_cast<Index>(r.size()), static_cast<Index>(r.begin()->size()));
  Index i = 0;
  for (const auto& row : r) {
    Index j = 0;
    for (double v : row) g.rows(i, j++) = v;
    ++i;
  }
  return g;
}

OutputMatrix permute_rows(const OutputMatrix& g, const std::vector<Index>& perm) {
  OutputMatrix p = g;
  for (Index t = 0; t < g.samples(); ++t) p.rows.row(t) = g.rows.row(perm[static_cast<std::size_t>(t)]);
  return p;
}

std::vector<std::vector<double>> to_nested(const MatrixXd& m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
  return out;
}

std::vector<double> to_vec(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// --- var ratio -------------------------------------------------------------

TEST(VarRatio, UnanimousIsZero) {
  EXPECT_DOUBLE_EQ(var_ratio(rows({{0.1, 0.2, 0.7}, {0.0, 0.1, 0.9}, {0.2, 0.2, 0.6}})), 0.0);
}

TEST(VarRatio, ThreeOfFour) {
  EXPECT_DOUBLE_EQ(var_ratio(rows({{0.9, 0.1}, {0.8, 0.2}, {0.6, 0.4}, {0.3, 0.7}})), 0.25);
}

TEST(VarRatio, RowTiesGoToLowestClass) {
  // Each row ties between classes 0 and 1 -> all vote 0.
  EXPECT_DOUBLE_EQ(var_ratio(rows({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}})), 0.0);
}

// --- entropy ---------------------------------------------------------------

TEST(PredEntropy, UniformBinaryIsLn2) { EXPECT_NEAR(pred_entropy(rows({{0.5, 0.5}})), std::log(2.0), 1e-15); }

TEST(PredEntropy, OneHotIsZero) { EXPECT_DOUBLE_EQ(pred_entropy(rows({{0.0, 1.0, 0.0}, {0.0, 1.0, 0.0}})), 0.0); }

TEST(PredEntropy, HandValue) { EXPECT_NEAR(pred_entropy(rows({{0.8, 0.2}, {0.6, 0.4}})), 0.610864302054894, 1e-12); }

// --- BALD ------------------------------------------------------------------

TEST(Bald, IdenticalRowsIsZero) { EXPECT_NEAR(bald(rows({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}})), 0.0, 1e-15); }

TEST(Bald, OppositeOneHotsIsLn2) { EXPECT_NEAR(bald(rows({{1.0, 0.0}, {0.0, 1.0}})), std::log(2.0), 1e-15); }

TEST(Bald, UniformRowsIsZero) { EXPECT_NEAR(bald(rows({{0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}})), 0.0, 1e-15); }

// --- Gaussian fit and KL ---------------------------------------------------

TEST(GaussianFit, EqualRowsGiveRidgeCovariance) {
  const auto f = gaussian_fit(rows({{0.2, 0.8}, {0.2, 0.8}, {0.2, 0.8}}), 1e-3);
  EXPECT_NEAR(f.mean[0], 0.2, 1e-15);
  EXPECT_NEAR(f.mean[1], 0.8, 1e-15);
  EXPECT_TRUE(f.cov.isApprox(1e-3 * MatrixXd::Identity(2, 2), 1e-12));
}

TEST(GaussianFit, TwoOppositeRows) {
  const double ridge = 1e-6;
  const auto f = gaussian_fit(rows({{1.0, 0.0}, {0.0, 1.0}}), ridge);
  EXPECT_DOUBLE_EQ(f.mean[0], 0.5);
  EXPECT_DOUBLE_EQ(f.mean[1], 0.5);
  EXPECT_NEAR(f.cov(0, 0), 0.5 + ridge, 1e-15);
  EXPECT_NEAR(f.cov(0, 1), -0.5, 1e-15);
  EXPECT_NEAR(f.cov(1, 0), -0.5, 1e-15);
  EXPECT_NEAR(f.cov(1, 1), 0.5 + ridge, 1e-15);
}

TEST(GaussianFit, RowPermutationInvariant) {
  Rng rng(4);
  const auto g = oracle::random_outputs(7, 4, rng);
  const auto p = permute_rows(g, {3, 1, 6, 0, 2, 5, 4});
  const auto a = gaussian_fit(g), b = gaussian_fit(p);
  EXPECT_TRUE(a.mean.isApprox(b.mean, 1e-14));
  EXPECT_TRUE(a.cov.isApprox(b.cov, 1e-12));
}

TEST(GaussianFit, RejectsNonPositiveRidge) { EXPECT_THROW(gaussian_fit(rows({{0.5, 0.5}}), 0.0), Error); }

GaussianFit fit1d(double mean, double var) {
  GaussianFit f;
  f.mean = VectorXd::Constant(1, mean);
  f.cov = MatrixXd::Constant(1, 1, var);
  return f;
}

TEST(KlMvn, SelfIsZero) {
  Rng rng(2);
  const auto f = gaussian_fit(oracle::random_outputs(10, 3, rng));
  EXPECT_NEAR(kl_mvn(f, f), 0.0, 1e-9);
}

TEST(KlMvn, UnitShift1D) { EXPECT_NEAR(kl_mvn(fit1d(0, 1), fit1d(1, 1)), 0.5, 1e-14); }

TEST(KlMvn, VarianceRatio1D) { EXPECT_NEAR(kl_mvn(fit1d(0, 4), fit1d(0, 1)), 0.5 * (3.0 - std::log(4.0)), 1e-14); }

TEST(KlMvn, NotPositiveDefiniteThrows) {
  EXPECT_THROW(kl_mvn(fit1d(0, 1), fit1d(0, -1)), NumericFailure);
}

// --- BALC ------------------------------------------------------------------

TEST(BalcKld, IdenticalIsZero) {
  Rng rng(5);
  const auto g = oracle::random_outputs(20, 3, rng);
  EXPECT_NEAR(balc_kld(g, g), 0.0, 1e-9);
}

TEST(BalcKld, RowPermutationIsZero) {
  Rng rng(6);
  const auto g = oracle::random_outputs(5, 3, rng);
  EXPECT_NEAR(balc_kld(g, permute_rows(g, {4, 2, 0, 1, 3})), 0.0, 1e-9);
}

TEST(BalcKld, MatchesDenseOracle) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int c = 2 + trial % 4;
    const auto g = oracle::random_outputs(20, c, rng, 2.0);
    const auto gp = oracle::random_outputs(20, c, rng, 2.0);
    const auto fa = gaussian_fit(g), fb = gaussian_fit(gp);
    const double want = oracle::kl_mvn_dense(to_vec(fa.mean), to_nested(fa.cov), to_vec(fb.mean), to_nested(fb.cov));
    EXPECT_NEAR(balc_kld(g, gp), want, 1e-9 * std::max(1.0, std::abs(want))) << "trial " << trial;
  }
}

TEST(BalcKld, ShapeMismatchThrows) {
  EXPECT_THROW(balc_kld(rows({{0.5, 0.5}}), rows({{0.5, 0.5}, {0.5, 0.5}})), InputShapeError);
}

TEST(BalcJsd, IdenticalIsZero) {
  Rng rng(8);
  const auto g = oracle::random_outputs(20, 4, rng);
  EXPECT_NEAR(balc_jsd(g, g), 0.0, 1e-15);
}

TEST(BalcJsd, InputPerturbationOnlyHandValue) {
  const auto g = rows({{0.5, 0.5}, {0.5, 0.5}});
  const auto gp = rows({{0.6, 0.4}, {0.4, 0.6}});
  EXPECT_NEAR(balc_jsd(g, gp), 0.5 * std::log(25.0 / 24.0), 1e-12);
}

TEST(BalcJsd, ConsistentShiftIsZero) {
  const auto g = rows({{0.6, 0.4}, {0.6, 0.4}, {0.6, 0.4}});
  const auto gp = rows({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}});
  EXPECT_NEAR(balc_jsd(g, gp), 0.0, 1e-12);
  EXPECT_NEAR(categorical_kl(g.mean(), gp.mean()), 0.192041993161798, 1e-12);
}

TEST(BalcJsd, ShapeMismatchThrows) {
  EXPECT_THROW(balc_jsd(rows({{0.5, 0.5}}), rows({{0.5, 0.2, 0.3}})), InputShapeError);
}

// --- properties over random pairs -----------------------------------------

TEST(ScoreProperties, BoundsAndInvarianceOnRandomPairs) {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int t = 1 + trial % 25;
    const int c = 2 + trial % 6;
    const double conc = trial % 3 == 0 ? 0.2 : 1.5;
    const auto g = oracle::random_outputs(t, c, rng, conc);
    const auto gp = oracle::random_outputs(t, c, rng, conc);
    const double lnc = std::log(static_cast<double>(c));

    EXPECT_GE(balc_jsd(g, gp), -1e-9);
    EXPECT_GE(balc_kld(g, gp), -1e-9);
    const double h = pred_entropy(g), b = bald(g), v = var_ratio(g);
    EXPECT_GE(h, -1e-9);
    EXPECT_LE(h, lnc + 1e-9);
    EXPECT_GE(b, -1e-9);
    EXPECT_LE(b, lnc + 1e-9);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 - 1.0 / t + 1e-12);

    std::vector<Index> perm(static_cast<std::size_t>(t));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto gperm = permute_rows(g, perm), gpperm = permute_rows(gp, perm);
    EXPECT_NEAR(balc_kld(g, permute_rows(g, perm)), 0.0, 1e-9);
    EXPECT_NEAR(pred_entropy(gperm), h, 1e-12);
    EXPECT_NEAR(bald(gperm), b, 1e-12);
    EXPECT_DOUBLE_EQ(var_ratio(gperm), v);
    EXPECT_NEAR(balc_jsd(gperm, gpperm), balc_jsd(g, gp), 1e-12);
    const double kld = balc_kld(g, gp);
    EXPECT_NEAR(balc_kld(gperm, gpperm), kld, 1e-9 * std::max(1.0, kld));
  }
}

// --- AUTAF -----------------------------------------------------------------

TEST(Autaf, ConstantRectangle) {
  ScoreHistory h(1, 1);
  for (int e = 0; e <= 3; ++e) h.append(e, 2.0);
  EXPECT_DOUBLE_EQ(autaf(h, 3), 6.0);
}

TEST(Autaf, LinearRamp) {
  ScoreHistory h(1, 1);
  for (int e = 0; e <= 2; ++e) h.append(e, e);
  EXPECT_DOUBLE_EQ(autaf(h, 2), 2.0);
}

TEST(Autaf, SinglePointIsZero) {
  ScoreHistory h(1, 1);
  h.append(5, 3.3);
  EXPECT_DOUBLE_EQ(autaf(h, 5), 0.0);
}

TEST(Autaf, SpacingAndOrderEnforced) {
  ScoreHistory h(1, 2);
  h.append(2, 1.0);
  EXPECT_THROW(h.append(3, 1.0), HistoryOrderError);
  EXPECT_THROW(h.append(0, 1.0), HistoryOrderError);
  h.append(4, 1.0);
  EXPECT_THROW(autaf(h, 6), HistoryOrderError);
  EXPECT_THROW(autaf(ScoreHistory(2, 1), 0), HistoryOrderError);
  EXPECT_THROW(ScoreHistory(3, 0), HistoryOrderError);
}

TEST(Autaf, MatchesTrapezoidOracle) {
  Rng rng(31);
  std::uniform_real_distribution<double> val(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int dt = 1 + trial % 3;
    const int start = trial % 7;
    const int n = 1 + trial % 30;
    ScoreHistory h(trial, dt);
    std::vector<std::pair<int, double>> pts;
    for (int i = 0; i < n; ++i) {
      pts.emplace_back(start + i * dt, val(rng));
      h.append(pts.back().first, pts.back().second);
    }
    EXPECT_NEAR(autaf(h, pts.back().first), oracle::trapezoid(pts), 1e-12);
  }
}

// --- selection -------------------------------------------------------------

TEST(RankAndSelect, TwoPercentOfHundred) {
  std::map<InstanceId, double> s;
  for (int i = 0; i < 100; ++i) s[i] = i * 0.01;
  const auto got = rank_and_select(s, 0.02);
  EXPECT_EQ(got, (std::vector<InstanceId>{99, 98}));
}

TEST(RankAndSelect, TiesGoToLowestIds) {
  std::map<InstanceId, double> s;
  for (int i = 10; i < 110; ++i) s[i] = 0.3;
  EXPECT_EQ(rank_and_select(s, 0.02), (std::vector<InstanceId>{10, 11}));
}

TEST(RankAndSelect, FullFractionSortsEverything) {
  const std::map<InstanceId, double> s{{1, 0.2}, {2, 0.9}, {3, 0.2}, {4, 0.5}};
  EXPECT_EQ(rank_and_select(s, 1.0), (std::vector<InstanceId>{2, 4, 1, 3}));
}

TEST(RankAndSelect, EmptyPoolAndBadFraction) {
  EXPECT_TRUE(rank_and_select({}, 0.5).empty());
  EXPECT_THROW(rank_and_select({{1, 0.0}}, 0.0), Error);
  EXPECT_THROW(rank_and_select({{1, 0.0}}, 1.5), Error);
}

TEST(RankAndSelect, CeilingOfFraction) {
  std::map<InstanceId, double> s;
  for (int i = 0; i < 51; ++i) s[i] = -i;
  EXPECT_EQ(rank_and_select(s, 0.02).size(), 2u);  // ceil(1.02)
  EXPECT_EQ(rank_and_select(s, 0.001).size(), 1u);
}

TEST(Score, DispatchAndPairedRequirement) {
  const auto g = rows({{1.0, 0.0}, {0.0, 1.0}});
  const McOutputs out{g, std::nullopt};
  EXPECT_NEAR(score(AcquisitionFunction::kBald, out), std::log(2.0), 1e-15);
  EXPECT_THROW(score(AcquisitionFunction::kBalcJsd, out), Error);
  EXPECT_EQ(parse_acquisition("balc_kld"), AcquisitionFunction::kBalcKld);
  EXPECT_THROW(parse_acquisition("margin"), Error);
}

}  // namespace
}  // namespace alab
