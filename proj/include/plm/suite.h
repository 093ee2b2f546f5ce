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

#ifndef PLM_SUITE_H_
#define PLM_SUITE_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "plm/approx.h"
#include "plm/envelope.h"
#include "plm/kernels.h"
#include "plm/mechanisms.h"

namespace plm {

enum class SuiteFunction { kMedian, kClippedSum };

std::string_view SuiteFunctionName(SuiteFunction function);

// f(x) = median(x), or min(range.hi, max(range.lo, sum(x))).
DatasetFunction MakeSuiteFunction(SuiteFunction function, Range range);

// Every multiset of `size` records from `universe` under swap adjacency, with
// exact envelopes for all of them. Envelopes come from the recursion
//   upper_l(x) = max(upper_{l-1}(x), max over neighbors x' of upper_{l-1}(x'))
// run to depth `size` (every dataset is within that many swaps).
struct NeighborAtlas {
  SuiteFunction function = SuiteFunction::kMedian;
  int size = 0;
  std::vector<double> universe;
  Range range;
  std::vector<std::vector<double>> datasets;
  std::vector<double> values;
  std::vector<std::vector<int>> adjacency;
  // Unordered neighbor pairs (i < j).
  std::vector<std::pair<int, int>> edges;
  std::vector<EnvelopeTable> tables;
  std::vector<double> local_sensitivity;
  // radius_bound[i][l]: max local sensitivity within distance l of dataset i.
  std::vector<std::vector<double>> radius_bound;
  double global_sensitivity = 0.0;
};

absl::StatusOr<NeighborAtlas> BuildNeighborAtlas(
    SuiteFunction function, int size, std::span<const double> universe,
    Range range, Execution execution = Execution::kParallel);

// Smallest radius AtlasSchedule emits, as a fraction of the range length.
inline constexpr double kAtlasRadiusFloor = 1e-3;

// Radius schedule of dataset i from its local-sensitivity sups (floored at
// kAtlasRadiusFloor * range length), long enough to cover the range from its
// center.
absl::StatusOr<RadiusSchedule> AtlasSchedule(const NeighborAtlas& atlas, int i);

enum class SuiteVariant {
  kPiecewiseLaplace,
  kInverseSensitivity,
  kTruncatedLaplace,
  kApproximate,
};

std::string_view SuiteVariantName(SuiteVariant variant);

struct SuiteOptions {
  std::vector<SuiteVariant> variants = {
      SuiteVariant::kPiecewiseLaplace, SuiteVariant::kInverseSensitivity,
      SuiteVariant::kTruncatedLaplace, SuiteVariant::kApproximate};
  std::vector<double> epsilons = {0.5, 1.0, 2.0};
  // Budget checked against is claimed_scale * mechanism epsilon.
  double claimed_scale = 1.0;
  int points_per_segment = 64;
};

struct SuiteCheck {
  SuiteFunction function = SuiteFunction::kMedian;
  int size = 0;
  SuiteVariant variant = SuiteVariant::kPiecewiseLaplace;
  double epsilon = 0.0;
  double claimed_epsilon = 0.0;
  std::int64_t pairs = 0;
  std::int64_t grid_points = 0;
  double max_log_ratio = 0.0;
  double max_br_sum = 0.0;
  bool support_mismatch = false;
  bool dp_pass = true;
  bool br_pass = true;
  // Pair attaining max_log_ratio.
  std::pair<int, int> worst_pair = {-1, -1};
};

// Runs the pure-DP and bounded-range checks over every neighbor pair in the
// atlas, for every variant and epsilon.
absl::StatusOr<std::vector<SuiteCheck>> VerifyNeighborSuite(
    const NeighborAtlas& atlas, const SuiteOptions& options,
    Execution execution = Execution::kParallel);

// Largest |q~(y; x) - q~(y; x')| over neighbor pairs and the y grid, with
// every dataset scored against its AtlasSchedule.
absl::StatusOr<double> MaxApproxScoreGap(
    const NeighborAtlas& atlas, std::span<const double> y_grid,
    Execution execution = Execution::kParallel);

struct OracleReport {
  std::string name;
  std::int64_t instances = 0;
  std::int64_t mismatches = 0;
};

// Exact comparison of the analytic envelope builders against enumeration:
// median on every multiset of the given sizes over the integers of `range`
// (swap), and bounded sum on records in {0, 1} (add/remove, bound 1).
absl::StatusOr<std::vector<OracleReport>> VerifyOracleAgreement(
    std::span<const int> sizes, Range range,
    Execution execution = Execution::kParallel);

}  // namespace plm

#endif  // PLM_SUITE_H_
