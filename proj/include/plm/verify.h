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

#ifndef PLM_VERIFY_H_
#define PLM_VERIFY_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "plm/envelope.h"
#include "plm/mechanisms.h"
#include "plm/random.h"

namespace plm {

// Absolute slack on log-density ratios. Densities are closed form, so only
// rounding error is tolerated.
inline constexpr double kLogRatioTolerance = 1e-9;
inline constexpr int kPointsPerSegment = 64;
inline constexpr double kDominanceTolerance = 1e-12;
inline constexpr double kGofSignificance = 1e-4;

struct VerificationReport {
  std::string check;
  double max_log_ratio = 0.0;
  double br_sum = 0.0;
  double dominance_min_margin = 0.0;
  // Minimum over alphas strictly inside a positive-width piece.
  double dominance_interior_margin = 0.0;
  double gof_statistic = 0.0;
  double gof_p_value = 1.0;
  bool pass = true;
  std::int64_t grid_size = 0;
  double tolerance = 0.0;
  std::string detail;
};

// Evaluation grid refined at the given breakpoints: for every segment between
// consecutive breakpoints, points_per_segment interior points at
// Chebyshev-like offsets plus both endpoints approached from inside at
// 1e-9 * segment width. Breakpoints must be sorted.
std::vector<double> RefinedGrid(std::span<const double> breakpoints,
                                int points_per_segment = kPointsPerSegment);

struct LogRatioSups {
  // sup_y log(p_a(y) / p_b(y)) and sup_y log(p_b(y) / p_a(y)).
  double forward = 0.0;
  double backward = 0.0;
  // Some y lies in one support only.
  bool support_mismatch = false;
  std::int64_t grid_size = 0;
};

// Sup of the log-density ratio in both directions over the grid refined at
// the union of both mechanisms' breakpoints.
LogRatioSups SupLogRatios(const Mechanism& a, const Mechanism& b,
                          int points_per_segment = kPointsPerSegment);

// max |log ratio| <= claimed_eps + tolerance. InvalidArgument if the tables
// carry different output ranges.
absl::StatusOr<VerificationReport> VerifyDp(
    const Mechanism& x, const Mechanism& neighbor, double claimed_eps,
    int points_per_segment = kPointsPerSegment);
// Piecewise Laplace mechanism at eps on both tables.
absl::StatusOr<VerificationReport> VerifyDp(
    const EnvelopeTable& x, const EnvelopeTable& neighbor, double eps,
    int points_per_segment = kPointsPerSegment);

// forward sup + backward sup <= claimed_eps + tolerance.
absl::StatusOr<VerificationReport> VerifyBoundedRange(
    const Mechanism& x, const Mechanism& neighbor, double claimed_eps,
    int points_per_segment = kPointsPerSegment);
absl::StatusOr<VerificationReport> VerifyBoundedRange(
    const EnvelopeTable& x, const EnvelopeTable& neighbor, double eps,
    int points_per_segment = kPointsPerSegment);

// P(|plm - center| <= alpha) - P(|inv - center| <= alpha) for each alpha.
absl::StatusOr<std::vector<double>> DominanceMargins(
    const EnvelopeTable& table, double eps, std::span<const double> alphas);

// Passes iff every margin >= -kDominanceTolerance.
absl::StatusOr<VerificationReport> VerifyDominance(
    const EnvelopeTable& table, double eps, std::span<const double> alphas);

using Sampler = std::function<double(RandomStream&)>;

struct GofTarget {
  std::function<double(double)> cdf;
  Range support;
};

// Pearson chi-square over n_bins bins that are equiprobable under the target
// (edges found by bisection on its CDF). Passes iff the p-value is at least
// `significance`.
absl::StatusOr<VerificationReport> Gof(const Sampler& sampler,
                                       const GofTarget& target,
                                       std::int64_t n_samples, int n_bins,
                                       std::uint64_t seed,
                                       double significance = kGofSignificance);

// Same, drawing the samples with SampleBatch (parallel when available).
absl::StatusOr<VerificationReport> GofMechanism(
    const Mechanism& sampled, const Mechanism& target, std::int64_t n_samples,
    int n_bins, std::uint64_t seed, double significance = kGofSignificance);

// Upper tail of the chi-square distribution.
double ChiSquarePValue(double statistic, int degrees_of_freedom);

}  // namespace plm

#endif  // PLM_VERIFY_H_
