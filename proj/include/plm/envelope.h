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

#ifndef PLM_ENVELOPE_H_
#define PLM_ENVELOPE_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace plm {

// Closed output interval [lo, hi].
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool Contains(double y) const { return y >= lo && y <= hi; }
  double Length() const { return hi - lo; }
  friend bool operator==(const Range&, const Range&) = default;
};

// Dataset adjacency. kSwap replaces one record; kAddSubtract inserts or
// deletes one record.
enum class NeighborModel { kSwap, kAddSubtract };

std::string_view NeighborModelName(NeighborModel model);
absl::StatusOr<NeighborModel> ParseNeighborModel(std::string_view name);

// One signed piece of the envelope. For sign=+1 the piece is
// [upper[ell-1], upper[ell]]; for sign=-1 it is [lower[ell], lower[ell-1]].
// `flat` is the length of the constant-score band adjacent to the center
// (nonzero only on ell=1 pieces of a smoothed table).
struct Interval {
  int sign = 1;
  int ell = 1;
  double lo = 0.0;
  double hi = 0.0;
  double width = 0.0;
  double flat = 0.0;

  // Endpoint of the piece nearest the center.
  double InnerEndpoint() const { return sign > 0 ? lo : hi; }
  double SlopedWidth() const { return width - flat; }
};

// Per-distance upper and lower envelopes of f around one dataset:
//   upper[l] = sup { f(x') : d(x, x') <= l },
//   lower[l] = inf { f(x') : d(x, x') <= l },
// clipped to a finite output range. Immutable once created.
class EnvelopeTable {
 public:
  // Validates: equal lengths >= 1, upper[0] == lower[0] == center, upper
  // nondecreasing, lower nonincreasing, every entry finite and inside range,
  // smoothing >= 0.
  static absl::StatusOr<EnvelopeTable> Create(
      double center, std::vector<double> upper, std::vector<double> lower,
      Range range, NeighborModel model = NeighborModel::kSwap,
      double smoothing = 0.0);

  double center() const { return center_; }
  std::span<const double> upper() const { return upper_; }
  std::span<const double> lower() const { return lower_; }
  double upper(int ell) const { return upper_[ell]; }
  double lower(int ell) const { return lower_[ell]; }
  // L, the largest modeled distance.
  int max_distance() const { return static_cast<int>(upper_.size()) - 1; }
  Range range() const { return range_; }
  NeighborModel model() const { return model_; }
  // Width of the constant band around the center (rho-smooth tables).
  double smoothing() const { return smoothing_; }

  // [lower[L], upper[L]].
  Range Support() const { return {lower_.back(), upper_.back()}; }

  // Marginal sensitivity for signed distance +ell / -ell, 1 <= ell <= L.
  double Marginal(int signed_ell) const;

  // All 2L signed pieces ordered by position: -L, ..., -1, +1, ..., +L.
  // Zero-width pieces are included.
  std::vector<Interval> Intervals() const;

  // Sorted, deduplicated envelope values (interval endpoints).
  std::vector<double> Breakpoints() const;

  friend bool operator==(const EnvelopeTable&, const EnvelopeTable&) = default;

 private:
  EnvelopeTable() = default;

  double center_ = 0.0;
  std::vector<double> upper_;
  std::vector<double> lower_;
  Range range_;
  NeighborModel model_ = NeighborModel::kSwap;
  double smoothing_ = 0.0;
};

// Drops trailing distances once both envelopes sit on the range bounds; the
// dropped pieces would all have zero width.
EnvelopeTable TrimSaturated(const EnvelopeTable& table);

// Median of a multiset: middle order statistic, or the mean of the two middle
// ones for even sizes. NaN for an empty input.
double Median(std::span<const double> values);

absl::StatusOr<EnvelopeTable> BuildMedianEnvelope(std::span<const double> data,
                                                  Range range,
                                                  NeighborModel model,
                                                  int max_distance);

absl::StatusOr<EnvelopeTable> BuildBoundedSumEnvelope(double value,
                                                      double per_record_bound,
                                                      Range range,
                                                      NeighborModel model,
                                                      int max_distance);

// A function of a multiset of records (passed sorted). Returning NaN marks a
// dataset as outside the domain of f; such datasets are still traversed but
// never contribute to an envelope.
using DatasetFunction = std::function<double(std::span<const double>)>;

inline constexpr std::int64_t kDefaultEnumerationBudget = 10'000'000;

// Exact envelopes on a finite universe by breadth-first enumeration of every
// dataset within distance L. Returns ResourceExhausted when more than
// `budget` datasets would be visited. Like the analytic builders, the result
// is trimmed with TrimSaturated.
absl::StatusOr<EnvelopeTable> BuildEnvelopeBruteForce(
    const DatasetFunction& f, std::span<const double> universe,
    std::span<const double> data, NeighborModel model, int max_distance,
    Range range, std::int64_t budget = kDefaultEnumerationBudget);

// Smallest l with lower[l] <= y <= upper[l]; nullopt when y lies outside the
// support (the "infinite" index).
std::optional<int> InverseIndex(double y, const EnvelopeTable& table);

// Widens both sides by rho (clipped to range) and records rho as the flat
// band around the center. rho = 0 returns the table unchanged.
absl::StatusOr<EnvelopeTable> SmoothShift(const EnvelopeTable& table,
                                          double rho);

// Minimum number of record changes needed for f to output y exactly, by
// exhaustive search; nullopt if no dataset within `max_distance` attains y.
absl::StatusOr<std::optional<int>> InverseSensitivityBruteForce(
    const DatasetFunction& f, std::span<const double> universe,
    std::span<const double> data, NeighborModel model, int max_distance,
    double y, std::int64_t budget = kDefaultEnumerationBudget);

struct SampleMonotoneReport {
  bool monotone = true;
  // inverse sensitivity == inverse index on every grid point where the former
  // is finite.
  bool matches_inverse_index = true;
  std::vector<double> y_grid;
  std::vector<std::optional<int>> inverse_sensitivity;
  std::vector<std::optional<int>> inverse_index;
};

absl::StatusOr<SampleMonotoneReport> CheckSampleMonotone(
    const DatasetFunction& f, std::span<const double> universe,
    std::span<const double> data, NeighborModel model, int max_distance,
    std::span<const double> y_grid, Range range,
    std::int64_t budget = kDefaultEnumerationBudget);

}  // namespace plm

#endif  // PLM_ENVELOPE_H_
