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

#include "plm/kernels.h"

#include <cstdint>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "plm/envelope.h"
#include "plm/mechanisms.h"
#include "plm/random.h"
#include "test_util.h"

namespace plm {
namespace {

using ::plm::testing::MedianTable;
using ::plm::testing::ValueOrDie;

std::vector<Mechanism> AllMechanisms() {
  std::vector<Mechanism> out;
  for (MechanismKind kind :
       {MechanismKind::kPiecewiseLaplace, MechanismKind::kInverseSensitivity,
        MechanismKind::kTruncatedLaplace}) {
    out.push_back(ValueOrDie(Mechanism::Create(
        {.kind = kind, .epsilon = 2, .laplace_delta = 1}, MedianTable())));
  }
  return out;
}

TEST(KernelsTest, RunsWithSeveralThreads) {
  // ctest sets OMP_NUM_THREADS=4; without OpenMP this is 1.
  EXPECT_GE(MaxThreads(), 1);
}

TEST(SampleBatchTest, MatchesSequentialSampling) {
  for (const Mechanism& m : AllMechanisms()) {
    RandomStream stream(11);
    const std::vector<double> batch =
        SampleBatch(m, 1000, 11, Execution::kSerial);
    for (double v : batch) ASSERT_EQ(v, m.Sample(stream));
  }
}

TEST(SampleBatchTest, ParallelEqualsSerial) {
  for (const Mechanism& m : AllMechanisms()) {
    for (std::int64_t n : {0, 1, 7, 1000, 100003}) {
      EXPECT_EQ(SampleBatch(m, n, 5, Execution::kParallel),
                SampleBatch(m, n, 5, Execution::kSerial))
          << MechanismName(m.spec().kind) << " n=" << n;
    }
  }
}

TEST(SampleBatchTest, SeedChangesOutput) {
  const Mechanism m = AllMechanisms()[0];
  EXPECT_NE(SampleBatch(m, 10, 1), SampleBatch(m, 10, 2));
}

TEST(DensityGridTest, ParallelEqualsSerial) {
  std::vector<double> grid;
  for (int k = 0; k <= 20000; ++k) grid.push_back(-1 + 12.0 * k / 20000);
  for (const Mechanism& m : AllMechanisms()) {
    const std::vector<double> serial = DensityGrid(m, grid, Execution::kSerial);
    EXPECT_EQ(DensityGrid(m, grid, Execution::kParallel), serial);
    for (std::size_t i = 0; i < grid.size(); i += 997) {
      EXPECT_EQ(serial[i], m.Density(grid[i]));
    }
  }
}

}  // namespace
}  // namespace plm
