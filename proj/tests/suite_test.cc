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

#include "plm/suite.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "plm/envelope.h"
#include "plm/kernels.h"
#include "test_util.h"

namespace plm {
namespace {

using ::plm::testing::IntegerUniverse;
using ::plm::testing::kUnitRange;
using ::plm::testing::ValueOrDie;
using ::plm::testing::Vec;
using ::testing::ElementsAre;

std::int64_t Binomial(int n, int k) {
  std::int64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

NeighborAtlas Atlas(SuiteFunction fn, int n,
                    Execution exec = Execution::kParallel) {
  return ValueOrDie(
      BuildNeighborAtlas(fn, n, IntegerUniverse(), kUnitRange, exec));
}

TEST(SuiteFunctionTest, Values) {
  const DatasetFunction median =
      MakeSuiteFunction(SuiteFunction::kMedian, kUnitRange);
  const DatasetFunction sum =
      MakeSuiteFunction(SuiteFunction::kClippedSum, kUnitRange);
  const std::vector<double> x = {1, 4, 9};
  EXPECT_EQ(median(x), 4);
  EXPECT_EQ(sum(x), 10);
  const std::vector<double> small = {1, 2};
  EXPECT_EQ(sum(small), 3);
  EXPECT_EQ(SuiteFunctionName(SuiteFunction::kClippedSum), "clipped_sum");
  EXPECT_EQ(SuiteVariantName(SuiteVariant::kApproximate), "approx");
}

TEST(NeighborAtlasTest, Counts) {
  for (int n : {3, 4}) {
    const NeighborAtlas atlas = Atlas(SuiteFunction::kMedian, n);
    ASSERT_EQ(static_cast<std::int64_t>(atlas.datasets.size()),
              Binomial(11 + n - 1, n));
    // Every edge is listed once, with i < j.
    std::int64_t degree_sum = 0;
    for (const auto& adj : atlas.adjacency) degree_sum += adj.size();
    EXPECT_EQ(static_cast<std::int64_t>(atlas.edges.size()) * 2, degree_sum);
    for (const auto& [i, j] : atlas.edges) ASSERT_LT(i, j);
  }
}

TEST(NeighborAtlasTest, AdjacencyIsSingleSwap) {
  const NeighborAtlas atlas = Atlas(SuiteFunction::kMedian, 3);
  for (const auto& [i, j] : atlas.edges) {
    std::vector<double> a = atlas.datasets[i];
    std::vector<double> b = atlas.datasets[j];
    std::vector<double> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(common));
    ASSERT_EQ(common.size(), 2u);
  }
}

TEST(NeighborAtlasTest, Sensitivities) {
  for (SuiteFunction fn : {SuiteFunction::kMedian, SuiteFunction::kClippedSum}) {
    const NeighborAtlas atlas = Atlas(fn, 3);
    EXPECT_EQ(atlas.global_sensitivity, 10);
    for (std::size_t i = 0; i < atlas.values.size(); ++i) {
      double local = 0;
      for (int j : atlas.adjacency[i]) {
        local = std::max(local, std::abs(atlas.values[i] - atlas.values[j]));
      }
      ASSERT_EQ(atlas.local_sensitivity[i], local);
      ASSERT_EQ(atlas.radius_bound[i][0], local);
      for (std::size_t l = 1; l < atlas.radius_bound[i].size(); ++l) {
        ASSERT_GE(atlas.radius_bound[i][l], atlas.radius_bound[i][l - 1]);
      }
    }
  }
}

TEST(NeighborAtlasTest, TablesMatchAnalyticMedian) {
  const NeighborAtlas atlas = Atlas(SuiteFunction::kMedian, 4);
  for (std::size_t i = 0; i < atlas.datasets.size(); ++i) {
    const EnvelopeTable analytic = ValueOrDie(BuildMedianEnvelope(
        atlas.datasets[i], kUnitRange, NeighborModel::kSwap, 4));
    ASSERT_EQ(Vec(atlas.tables[i].upper()), Vec(analytic.upper()));
    ASSERT_EQ(Vec(atlas.tables[i].lower()), Vec(analytic.lower()));
  }
}

TEST(NeighborAtlasTest, ParallelEqualsSerial) {
  for (SuiteFunction fn : {SuiteFunction::kMedian, SuiteFunction::kClippedSum}) {
    const NeighborAtlas p = Atlas(fn, 4, Execution::kParallel);
    const NeighborAtlas s = Atlas(fn, 4, Execution::kSerial);
    EXPECT_EQ(p.datasets, s.datasets);
    EXPECT_EQ(p.edges, s.edges);
    EXPECT_EQ(p.local_sensitivity, s.local_sensitivity);
    EXPECT_EQ(p.radius_bound, s.radius_bound);
    ASSERT_EQ(p.tables.size(), s.tables.size());
    for (std::size_t i = 0; i < p.tables.size(); ++i) {
      ASSERT_EQ(Vec(p.tables[i].upper()), Vec(s.tables[i].upper()));
      ASSERT_EQ(Vec(p.tables[i].lower()), Vec(s.tables[i].lower()));
    }
  }
}

TEST(NeighborAtlasTest, Errors) {
  EXPECT_FALSE(BuildNeighborAtlas(SuiteFunction::kMedian, 0, IntegerUniverse(),
                                  kUnitRange)
                   .ok());
  const std::vector<double> empty;
  EXPECT_FALSE(
      BuildNeighborAtlas(SuiteFunction::kMedian, 3, empty, kUnitRange).ok());
}

TEST(AtlasScheduleTest, CoversRangeAndFloors) {
  const NeighborAtlas atlas = Atlas(SuiteFunction::kClippedSum, 3);
  for (std::size_t i = 0; i < atlas.values.size(); ++i) {
    const RadiusSchedule s = ValueOrDie(AtlasSchedule(atlas, i));
    const double reach = std::max(kUnitRange.hi - atlas.values[i],
                                  atlas.values[i] - kUnitRange.lo);
    ASSERT_GE(s.cumulative().back(), reach);
    for (double r : s.radii()) ASSERT_GE(r, kAtlasRadiusFloor * 10);
  }
}

TEST(VerifyNeighborSuiteTest, SmallSuitePasses) {
  for (SuiteFunction fn : {SuiteFunction::kMedian, SuiteFunction::kClippedSum}) {
    const NeighborAtlas atlas = Atlas(fn, 3);
    const std::vector<SuiteCheck> checks =
        ValueOrDie(VerifyNeighborSuite(atlas, SuiteOptions{}));
    ASSERT_EQ(checks.size(), 4u * 3);
    for (const SuiteCheck& c : checks) {
      EXPECT_TRUE(c.dp_pass && c.br_pass)
          << SuiteVariantName(c.variant) << " eps=" << c.epsilon
          << " ratio=" << c.max_log_ratio << " br=" << c.max_br_sum;
      EXPECT_EQ(c.pairs, static_cast<std::int64_t>(atlas.edges.size()));
      EXPECT_FALSE(c.support_mismatch);
      EXPECT_GT(c.grid_points, 0);
      EXPECT_LE(c.max_log_ratio, c.max_br_sum + 1e-12);
    }
  }
}

TEST(VerifyNeighborSuiteTest, UnderstatedBudgetFails) {
  const NeighborAtlas atlas = Atlas(SuiteFunction::kMedian, 3);
  SuiteOptions options;
  options.variants = {SuiteVariant::kPiecewiseLaplace};
  options.epsilons = {2};
  options.claimed_scale = 0.9;
  const std::vector<SuiteCheck> checks =
      ValueOrDie(VerifyNeighborSuite(atlas, options));
  ASSERT_EQ(checks.size(), 1u);
  EXPECT_FALSE(checks[0].br_pass);
  EXPECT_DOUBLE_EQ(checks[0].claimed_epsilon, 1.8);
  const auto [i, j] = checks[0].worst_pair;
  EXPECT_GE(i, 0);
  EXPECT_GE(j, 0);
}

TEST(VerifyNeighborSuiteTest, ParallelEqualsSerial) {
  const NeighborAtlas atlas = Atlas(SuiteFunction::kClippedSum, 3);
  const std::vector<SuiteCheck> p = ValueOrDie(
      VerifyNeighborSuite(atlas, SuiteOptions{}, Execution::kParallel));
  const std::vector<SuiteCheck> s = ValueOrDie(
      VerifyNeighborSuite(atlas, SuiteOptions{}, Execution::kSerial));
  ASSERT_EQ(p.size(), s.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    EXPECT_EQ(p[k].max_log_ratio, s[k].max_log_ratio);
    EXPECT_EQ(p[k].max_br_sum, s[k].max_br_sum);
    EXPECT_EQ(p[k].grid_points, s[k].grid_points);
    EXPECT_EQ(p[k].worst_pair, s[k].worst_pair);
  }
}

TEST(MaxApproxScoreGapTest, AtMostOne) {
  std::vector<double> y_grid;
  for (int k = 0; k <= 200; ++k) y_grid.push_back(0.05 * k);
  for (SuiteFunction fn : {SuiteFunction::kMedian, SuiteFunction::kClippedSum}) {
    const NeighborAtlas atlas = Atlas(fn, 3);
    const double gap = ValueOrDie(MaxApproxScoreGap(atlas, y_grid));
    EXPECT_LE(gap, 1 + 1e-12);
    EXPECT_GT(gap, 0);
    EXPECT_EQ(gap, ValueOrDie(MaxApproxScoreGap(atlas, y_grid,
                                                Execution::kSerial)));
  }
}

TEST(VerifyOracleAgreementTest, NoMismatches) {
  const std::vector<int> sizes = {3, 4};
  const std::vector<OracleReport> reports =
      ValueOrDie(VerifyOracleAgreement(sizes, kUnitRange));
  ASSERT_EQ(reports.size(), 4u);
  EXPECT_EQ(reports[0].name, "median n=3");
  EXPECT_EQ(reports[0].instances, Binomial(13, 3));
  EXPECT_EQ(reports[1].name, "bounded_sum n=3");
  EXPECT_EQ(reports[1].instances, 4);
  for (const OracleReport& r : reports) EXPECT_EQ(r.mismatches, 0) << r.name;
}

}  // namespace
}  // namespace plm
