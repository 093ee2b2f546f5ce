//
// Copyright 2026 The Piecewise Laplace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "plm/verify.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "plm/envelope.h"
#include "plm/mechanisms.h"
#include "plm/random.h"
#include "test_util.h"

namespace plm {
namespace {

using ::plm::testing::IntegerUniverse;
using ::plm::testing::kUnitRange;
using ::plm::testing::MedianTable;
using ::plm::testing::ValueOrDie;
using ::plm::testing::Vec;
using ::testing::ElementsAre;

EnvelopeTable NeighborTable() {
  const std::vector<double> data = {1, 2, 3, 4, 10};
  const std::vector<double> universe = IntegerUniverse();
  return ValueOrDie(BuildEnvelopeBruteForce(
      [](std::span<const double> x) { return Median(x); }, universe, data,
      NeighborModel::kSwap, 5, kUnitRange));
}

Mechanism Make(MechanismKind kind, const EnvelopeTable& table, double eps) {
  return ValueOrDie(Mechanism::Create(
      {.kind = kind, .epsilon = eps, .laplace_delta = 1.0}, table));
}

TEST(RefinedGridTest, PointsPerSegment) {
  const std::vector<double> breaks = {0, 1, 1, 3};
  const std::vector<double> grid = RefinedGrid(breaks, 64);
  ASSERT_EQ(grid.size(), 2u * 66);
  EXPECT_DOUBLE_EQ(grid.front(), 1e-9);
  EXPECT_DOUBLE_EQ(grid[65], 1 - 1e-9);
  for (std::size_t i = 0; i < 66; ++i) {
    EXPECT_GT(grid[i], 0);
    EXPECT_LT(grid[i], 1);
    EXPECT_GT(grid[66 + i], 1);
    EXPECT_LT(grid[66 + i], 3);
  }
}

TEST(VerifyDpTest, MedianNeighborPair) {
  const EnvelopeTable neighbor = NeighborTable();
  EXPECT_THAT(Vec(neighbor.upper()), ElementsAre(3, 4, 10, 10));
  EXPECT_THAT(Vec(neighbor.lower()), ElementsAre(3, 2, 1, 0));
  const VerificationReport report =
      ValueOrDie(VerifyDp(MedianTable(), neighbor, 2));
  EXPECT_TRUE(report.pass) << report.detail;
  EXPECT_LE(report.max_log_ratio, 2);
  EXPECT_GT(report.max_log_ratio, 0);
  EXPECT_GT(report.grid_size, 0);
  EXPECT_EQ(report.tolerance, kLogRatioTolerance);
}

TEST(VerifyDpTest, IdenticalTables) {
  const VerificationReport report =
      ValueOrDie(VerifyDp(MedianTable(), MedianTable(), 2));
  EXPECT_EQ(report.max_log_ratio, 0);
  EXPECT_TRUE(report.pass);
}

// Shrinking x's upper envelope below what its neighbor forces breaks the
// containment the privacy proof relies on.
TEST(VerifyDpTest, DeflatedEnvelopeFails) {
  const EnvelopeTable corrupted = ValueOrDie(
      EnvelopeTable::Create(3, {3, 3, 3, 3, 10}, {3, 2, 1, 0, 0}, kUnitRange));
  const VerificationReport report =
      ValueOrDie(VerifyDp(corrupted, NeighborTable(), 2));
  EXPECT_FALSE(report.pass);
  EXPECT_GT(report.max_log_ratio, 2.05);
}

TEST(VerifyDpTest, RangeMismatch) {
  const EnvelopeTable other = ValueOrDie(
      EnvelopeTable::Create(3, {3, 4}, {3, 2}, Range{0, 11}));
  EXPECT_EQ(VerifyDp(MedianTable(), other, 2).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(VerifyBoundedRange(MedianTable(), other, 2).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(VerifyDpTest, SupportMismatchFails) {
  const EnvelopeTable narrow = ValueOrDie(
      EnvelopeTable::Create(3, {3, 4}, {3, 2}, kUnitRange));
  const VerificationReport report =
      ValueOrDie(VerifyDp(MedianTable(), narrow, 2));
  EXPECT_FALSE(report.pass);
  EXPECT_EQ(report.detail, "supports differ");
}

TEST(VerifyDpTest, InverseSensitivityPair) {
  const VerificationReport report = ValueOrDie(
      VerifyDp(Make(MechanismKind::kInverseSensitivity, MedianTable(), 2),
               Make(MechanismKind::kInverseSensitivity, NeighborTable(), 2),
               2));
  EXPECT_TRUE(report.pass) << report.detail;
}

TEST(VerifyBoundedRangeTest, MedianNeighborPair) {
  const VerificationReport report =
      ValueOrDie(VerifyBoundedRange(MedianTable(), NeighborTable(), 2));
  EXPECT_TRUE(report.pass) << report.detail;
  EXPECT_LE(report.br_sum, 2 + kLogRatioTolerance);
}

TEST(VerifyBoundedRangeTest, IdenticalTables) {
  EXPECT_EQ(
      ValueOrDie(VerifyBoundedRange(MedianTable(), MedianTable(), 1)).br_sum,
      0);
}

// Laplace case: centers one sensitivity apart, far from the range ends.
TEST(VerifyBoundedRangeTest, SymmetricShiftedPair) {
  const Range range{-44.5, 55.5};
  for (double eps : {0.5, 1.0, 2.0}) {
    const EnvelopeTable a = ValueOrDie(
        BuildBoundedSumEnvelope(5, 1, range, NeighborModel::kSwap, 60));
    const EnvelopeTable b = ValueOrDie(
        BuildBoundedSumEnvelope(6, 1, range, NeighborModel::kSwap, 60));
    const LogRatioSups sups =
        SupLogRatios(Make(MechanismKind::kPiecewiseLaplace, a, eps),
                     Make(MechanismKind::kPiecewiseLaplace, b, eps));
    EXPECT_NEAR(sups.forward, eps / 2, 1e-6);
    EXPECT_NEAR(sups.backward, eps / 2, 1e-6);
    EXPECT_TRUE(ValueOrDie(VerifyBoundedRange(a, b, eps)).pass);
    // Understating the budget: each direction still fits, the sum does not.
    const Mechanism ma = Make(MechanismKind::kPiecewiseLaplace, a, eps);
    const Mechanism mb = Make(MechanismKind::kPiecewiseLaplace, b, eps);
    EXPECT_TRUE(ValueOrDie(VerifyDp(ma, mb, 0.75 * eps)).pass);
    EXPECT_FALSE(ValueOrDie(VerifyBoundedRange(ma, mb, 0.75 * eps)).pass);
  }
}

TEST(DominanceTest, MedianMargins) {
  const std::vector<double> alphas = {0, 0.5, 1};
  const std::vector<double> margins =
      ValueOrDie(DominanceMargins(MedianTable(), 2, alphas));
  EXPECT_EQ(margins[0], 0);
  EXPECT_NEAR(margins[1], 0.06903, 1e-5);
  EXPECT_NEAR(margins[2], 0, 1e-15);
}

TEST(DominanceTest, DenseAlphaGrid) {
  std::vector<double> alphas;
  for (int k = 0; k < 1000; ++k) alphas.push_back(7.5 * k / 999);
  const VerificationReport report =
      ValueOrDie(VerifyDominance(MedianTable(), 2, alphas));
  EXPECT_TRUE(report.pass) << report.detail;
  EXPECT_GE(report.dominance_min_margin, -kDominanceTolerance);
}

TEST(DominanceTest, HoldsForRandomTables) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> value(0, 10);
  std::vector<double> alphas;
  for (int k = 0; k <= 400; ++k) alphas.push_back(0.025 * k);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> data(1 + trial % 6);
    for (double& v : data) v = value(rng);
    const EnvelopeTable t = ValueOrDie(
        BuildMedianEnvelope(data, kUnitRange, NeighborModel::kSwap, 7));
    for (double eps : {0.5, 2.0, 6.0}) {
      EXPECT_TRUE(ValueOrDie(VerifyDominance(t, eps, alphas)).pass);
    }
  }
}

TEST(GofTest, PlmMatchesItsDensity) {
  const Mechanism m = Make(MechanismKind::kPiecewiseLaplace, MedianTable(), 2);
  const VerificationReport report =
      ValueOrDie(GofMechanism(m, m, 1'000'000, 200, 7));
  EXPECT_TRUE(report.pass) << report.detail;
  EXPECT_EQ(report.check, "gof");
}

TEST(GofTest, WrongPairingFails) {
  const Mechanism plm = Make(MechanismKind::kPiecewiseLaplace, MedianTable(), 2);
  const Mechanism inv =
      Make(MechanismKind::kInverseSensitivity, MedianTable(), 2);
  const VerificationReport report =
      ValueOrDie(GofMechanism(inv, plm, 1'000'000, 200, 7));
  EXPECT_FALSE(report.pass);
  EXPECT_LT(report.gof_p_value, 1e-10);
}

TEST(GofTest, UniformSampler) {
  const Sampler uniform = [](RandomStream& s) { return 2 + s.NextUniform(); };
  const GofTarget target{
      .cdf = [](double y) { return std::clamp(y - 2, 0.0, 1.0); },
      .support = Range{2, 3}};
  const VerificationReport report =
      ValueOrDie(Gof(uniform, target, 200'000, 200, 3));
  EXPECT_TRUE(report.pass) << report.detail;
  // Deterministic given the seed.
  EXPECT_EQ(report.gof_statistic,
            ValueOrDie(Gof(uniform, target, 200'000, 200, 3)).gof_statistic);
}

TEST(GofTest, Errors) {
  const Sampler uniform = [](RandomStream& s) { return s.NextUniform(); };
  const GofTarget target{.cdf = [](double y) { return y; },
                         .support = Range{0, 1}};
  EXPECT_FALSE(Gof(uniform, target, 1000, 200, 1).ok());
  EXPECT_FALSE(Gof(uniform, target, 100'000, 1, 1).ok());
  const GofTarget degenerate{.cdf = [](double) { return 0.0; },
                             .support = Range{0, 1}};
  EXPECT_FALSE(Gof(uniform, degenerate, 100'000, 200, 1).ok());
  const GofTarget empty{.cdf = [](double) { return 1.0; },
                        .support = Range{1, 1}};
  EXPECT_FALSE(Gof(uniform, empty, 100'000, 200, 1).ok());
}

TEST(ChiSquareTest, KnownQuantiles) {
  EXPECT_NEAR(ChiSquarePValue(3.841458820694124, 1), 0.05, 1e-9);
  EXPECT_NEAR(ChiSquarePValue(2, 2), std::exp(-1), 1e-12);
  EXPECT_EQ(ChiSquarePValue(0, 5), 1);
}

}  // namespace
}  // namespace plm
