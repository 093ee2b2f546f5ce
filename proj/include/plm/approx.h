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

#ifndef PLM_APPROX_H_
#define PLM_APPROX_H_

#include <functional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "plm/envelope.h"

namespace plm {

// Per-step radius growth R_1..R_L of nested balls around f(x). The cumulative
// radius after l steps is R_1 + ... + R_l.
class RadiusSchedule {
 public:
  // Every radius must be finite and > 0; p_norm >= 1 (informational, only
  // d = 1 is sampled).
  static absl::StatusOr<RadiusSchedule> Create(std::vector<double> radii,
                                               double p_norm = 1.0);

  std::span<const double> radii() const { return radii_; }
  std::span<const double> cumulative() const { return cumulative_; }
  // Cumulative radius after l steps; 0 for l = 0.
  double Cumulative(int ell) const {
    return ell == 0 ? 0.0 : cumulative_[ell - 1];
  }
  int size() const { return static_cast<int>(radii_.size()); }
  double p_norm() const { return p_norm_; }

  friend bool operator==(const RadiusSchedule&, const RadiusSchedule&) = default;

 private:
  RadiusSchedule() = default;

  std::vector<double> radii_;
  std::vector<double> cumulative_;
  double p_norm_ = 1.0;
};

// R_l = local_bound_at_distance(l): an upper bound on the local sensitivity of
// every dataset within distance l. The bound must be positive and
// nondecreasing in l.
absl::StatusOr<RadiusSchedule> ScheduleFromLocalSensitivity(
    const std::function<double(int)>& local_bound_at_distance,
    int max_distance);

// Replaces R_l with global_delta for l >= k.
absl::StatusOr<RadiusSchedule> ScheduleTruncateGlobal(
    const RadiusSchedule& schedule, int k, double global_delta);

// ceil(10 / eps).
int DefaultTruncationDistance(double eps);

// R_l = local_delta + (l - 1) * delta_prime.
absl::StatusOr<RadiusSchedule> ScheduleAffine(double local_delta,
                                              double delta_prime,
                                              int max_distance);

// Symmetric envelope center +/- cumulative radius, clipped to range and
// trimmed once both sides saturate.
absl::StatusOr<EnvelopeTable> ScheduleToEnvelope(double center,
                                                 const RadiusSchedule& schedule,
                                                 Range range);

}  // namespace plm

#endif  // PLM_APPROX_H_
