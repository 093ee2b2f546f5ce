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

#include "plm/scores.h"

#include <algorithm>
#include <cmath>
#include <optional>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "plm/approx.h"

namespace plm {

Score QPlm(double y, const EnvelopeTable& table) {
  const std::optional<int> index = InverseIndex(y, table);
  if (!index.has_value()) return Score::OutsideSupport();
  const int ell = *index;
  if (ell == 0) return Score{-1.0};

  // ell is minimal, so y lies strictly beyond envelope ell - 1 and the piece
  // [envelope(ell - 1), envelope(ell)] has positive width.
  const double center = table.center();
  const double inner = y > center ? table.upper(ell - 1) : table.lower(ell - 1);
  const double outer = y > center ? table.upper(ell) : table.lower(ell);
  const double width = std::abs(outer - inner);
  double offset = std::abs(y - inner);
  double sloped = width;
  if (ell == 1 && table.smoothing() > 0) {
    const double flat = std::min(table.smoothing(), width);
    offset = std::max(0.0, offset - flat);
    sloped = width - flat;
  }
  const double fraction = sloped > 0 ? std::min(1.0, offset / sloped) : 0.0;
  return Score{-(ell + fraction)};
}

absl::StatusOr<Score> QLaplaceReduction(double y, double center,
                                        double delta) {
  if (!(delta > 0)) return absl::InvalidArgumentError("delta must be > 0");
  return Score{-std::abs(center - y) / delta - 1.0};
}

std::optional<int> ApproxIndex(double distance,
                               const RadiusSchedule& schedule) {
  if (distance <= 0) return 0;
  const auto cumulative = schedule.cumulative();
  const auto it =
      std::lower_bound(cumulative.begin(), cumulative.end(), distance);
  if (it == cumulative.end()) return std::nullopt;
  return static_cast<int>(it - cumulative.begin()) + 1;
}

Score QApprox(double distance, const RadiusSchedule& schedule) {
  const std::optional<int> index = ApproxIndex(distance, schedule);
  if (!index.has_value()) return Score::OutsideSupport();
  const int ell = *index;
  if (ell == 0) return Score{-1.0};
  const double inner = schedule.Cumulative(ell - 1);
  const double outer = schedule.Cumulative(ell);
  return Score{-(ell + (distance - inner) / (outer - inner))};
}

absl::StatusOr<PrivacyAccount> Account(double epsilon, PrivacyKind kind) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError("epsilon must be positive and finite");
  }
  PrivacyAccount account;
  account.epsilon_dp = epsilon;
  if (kind == PrivacyKind::kBoundedRange) {
    account.epsilon_br = epsilon;
    account.rho_zcdp = epsilon * epsilon / 8.0;
  } else {
    account.epsilon_br = 2.0 * epsilon;
    account.rho_zcdp = epsilon * epsilon / 2.0;
  }
  return account;
}

}  // namespace plm
