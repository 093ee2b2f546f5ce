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

#include "plm/approx.h"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace plm {

absl::StatusOr<RadiusSchedule> RadiusSchedule::Create(std::vector<double> radii,
                                                      double p_norm) {
  if (radii.empty()) return absl::InvalidArgumentError("empty radius schedule");
  if (!(p_norm >= 1)) return absl::InvalidArgumentError("p_norm must be >= 1");
  RadiusSchedule schedule;
  double running = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0) || !std::isfinite(radii[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("radius R_", i + 1, " must be positive, got ", radii[i]));
    }
    running += radii[i];
    schedule.cumulative_.push_back(running);
  }
  schedule.radii_ = std::move(radii);
  schedule.p_norm_ = p_norm;
  return schedule;
}

absl::StatusOr<RadiusSchedule> ScheduleFromLocalSensitivity(
    const std::function<double(int)>& local_bound_at_distance,
    int max_distance) {
  if (max_distance < 1) {
    return absl::InvalidArgumentError("max distance L must be >= 1");
  }
  std::vector<double> radii;
  double previous = 0.0;
  for (int ell = 1; ell <= max_distance; ++ell) {
    const double bound = local_bound_at_distance(ell);
    if (!(bound > 0) || !std::isfinite(bound)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "local sensitivity bound at distance ", ell, " must be positive"));
    }
    if (bound < previous) {
      return absl::InvalidArgumentError(absl::StrCat(
          "local sensitivity bound decreases at distance ", ell));
    }
    radii.push_back(bound);
    previous = bound;
  }
  return RadiusSchedule::Create(std::move(radii));
}

absl::StatusOr<RadiusSchedule> ScheduleTruncateGlobal(
    const RadiusSchedule& schedule, int k, double global_delta) {
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  const auto radii = schedule.radii();
  const int covered = std::min<int>(k, schedule.size());
  const double largest =
      *std::max_element(radii.begin(), radii.begin() + covered);
  if (global_delta < largest) {
    return absl::InvalidArgumentError(absl::StrCat(
        "global sensitivity ", global_delta,
        " is below an existing radius ", largest));
  }
  std::vector<double> out(radii.begin(), radii.end());
  for (int ell = k; ell <= schedule.size(); ++ell) out[ell - 1] = global_delta;
  return RadiusSchedule::Create(std::move(out), schedule.p_norm());
}

int DefaultTruncationDistance(double eps) {
  return static_cast<int>(std::ceil(10.0 / eps));
}

absl::StatusOr<RadiusSchedule> ScheduleAffine(double local_delta,
                                              double delta_prime,
                                              int max_distance) {
  if (!(local_delta > 0)) {
    return absl::InvalidArgumentError("local sensitivity must be positive");
  }
  if (!(delta_prime >= 0)) {
    return absl::InvalidArgumentError("delta_prime must be >= 0");
  }
  if (max_distance < 1) {
    return absl::InvalidArgumentError("max distance L must be >= 1");
  }
  std::vector<double> radii;
  for (int ell = 1; ell <= max_distance; ++ell) {
    radii.push_back(local_delta + (ell - 1) * delta_prime);
  }
  return RadiusSchedule::Create(std::move(radii));
}

absl::StatusOr<EnvelopeTable> ScheduleToEnvelope(double center,
                                                 const RadiusSchedule& schedule,
                                                 Range range) {
  if (!(range.lo < range.hi) || !std::isfinite(range.lo) ||
      !std::isfinite(range.hi)) {
    return absl::InvalidArgumentError("invalid range");
  }
  if (!range.Contains(center)) {
    return absl::InvalidArgumentError("center outside range");
  }
  std::vector<double> upper = {center}, lower = {center};
  for (int ell = 1; ell <= schedule.size(); ++ell) {
    upper.push_back(std::min(range.hi, center + schedule.Cumulative(ell)));
    lower.push_back(std::max(range.lo, center - schedule.Cumulative(ell)));
  }
  absl::StatusOr<EnvelopeTable> table = EnvelopeTable::Create(
      center, std::move(upper), std::move(lower), range);
  if (!table.ok()) return table.status();
  return TrimSaturated(*table);
}

}  // namespace plm
