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

#ifndef PLM_SCORES_H_
#define PLM_SCORES_H_

#include <limits>
#include <optional>

#include "absl/status/statusor.h"
#include "plm/envelope.h"

namespace plm {

class RadiusSchedule;

// Exponential-mechanism quality score. Outside the support the score is -inf,
// so exp(score * eps / 2) is exactly zero there.
struct Score {
  double value = -std::numeric_limits<double>::infinity();

  static Score OutsideSupport() { return Score{}; }
  bool InSupport() const { return value != -std::numeric_limits<double>::infinity(); }
};

// Piecewise-linear score: -q(y) = l_y + (position of y inside piece l_y),
// with q(center) = -1.
Score QPlm(double y, const EnvelopeTable& table);

// -|center - y| / delta - 1, the score of the equal-marginal table.
absl::StatusOr<Score> QLaplaceReduction(double y, double center, double delta);

// Smallest l with cumulative radius R_l >= distance (R_0 = 0); nullopt past
// the last radius.
std::optional<int> ApproxIndex(double distance, const RadiusSchedule& schedule);

// Score of the radius-bounded approximate variant at a given distance from
// f(x). Distance 0 scores -1 like the exact center.
Score QApprox(double distance, const RadiusSchedule& schedule);

enum class PrivacyKind { kPureDp, kBoundedRange };

struct PrivacyAccount {
  double epsilon_dp = 0.0;
  double epsilon_br = 0.0;
  double rho_zcdp = 0.0;
};

// eps-BR gives eps-DP and eps^2/8-zCDP; eps-DP gives 2eps-BR and eps^2/2-zCDP.
absl::StatusOr<PrivacyAccount> Account(double epsilon, PrivacyKind kind);

}  // namespace plm

#endif  // PLM_SCORES_H_
