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

#include "plm/envelope.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace plm {
namespace {

using Dataset = std::vector<double>;

absl::Status ValidateRange(Range range) {
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi) ||
      !(range.lo < range.hi)) {
    return absl::InvalidArgumentError(
        absl::StrCat("range must be finite with lo < hi, got [", range.lo,
                     ", ", range.hi, "]"));
  }
  return absl::OkStatus();
}

// Every dataset within `max_distance` of `data`, with its distance.
struct Ball {
  std::vector<Dataset> datasets;
  std::vector<int> distance;
};

void ForEachNeighbor(const Dataset& x, std::span<const double> universe,
                     NeighborModel model,
                     const std::function<void(Dataset)>& visit) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0 && x[i] == x[i - 1]) continue;
    if (model == NeighborModel::kSwap) {
      for (double u : universe) {
        if (u == x[i]) continue;
        Dataset next = x;
        next.erase(next.begin() + static_cast<std::ptrdiff_t>(i));
        next.insert(std::upper_bound(next.begin(), next.end(), u), u);
        visit(std::move(next));
      }
    } else {
      Dataset next = x;
      next.erase(next.begin() + static_cast<std::ptrdiff_t>(i));
      visit(std::move(next));
    }
  }
  if (model == NeighborModel::kAddSubtract) {
    for (double u : universe) {
      Dataset next = x;
      next.insert(std::upper_bound(next.begin(), next.end(), u), u);
      visit(std::move(next));
    }
  }
}

absl::StatusOr<Ball> EnumerateBall(std::span<const double> universe_in,
                                   std::span<const double> data,
                                   NeighborModel model, int max_distance,
                                   std::int64_t budget) {
  if (max_distance < 0) {
    return absl::InvalidArgumentError("max_distance must be >= 0");
  }
  std::vector<double> universe(universe_in.begin(), universe_in.end());
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  if (universe.empty()) return absl::InvalidArgumentError("empty universe");

  Dataset start(data.begin(), data.end());
  std::sort(start.begin(), start.end());

  Ball ball;
  std::set<Dataset> seen = {start};
  std::vector<Dataset> frontier = {start};
  ball.datasets.push_back(start);
  ball.distance.push_back(0);
  for (int d = 1; d <= max_distance && !frontier.empty(); ++d) {
    std::vector<Dataset> next_frontier;
    bool over_budget = false;
    for (const Dataset& x : frontier) {
      ForEachNeighbor(x, universe, model, [&](Dataset y) {
        if (over_budget) return;
        if (seen.insert(y).second) {
          if (static_cast<std::int64_t>(seen.size()) > budget) {
            over_budget = true;
            return;
          }
          ball.datasets.push_back(y);
          ball.distance.push_back(d);
          next_frontier.push_back(std::move(y));
        }
      });
      if (over_budget) {
        return absl::ResourceExhaustedError(absl::StrCat(
            "enumeration exceeded budget of ", budget, " datasets at distance ",
            d));
      }
    }
    frontier = std::move(next_frontier);
  }
  return ball;
}

// Median of data[skip_low .. n - skip_high) plus `extra` copies of `pad`
// placed at the appropriate end.
double PaddedMedian(std::span<const double> sorted, int drop_front,
                    int drop_back, int extra, double pad) {
  std::vector<double> values(sorted.begin() + drop_front,
                             sorted.end() - drop_back);
  values.insert(values.end(), static_cast<std::size_t>(extra), pad);
  return Median(values);
}

}  // namespace

std::string_view NeighborModelName(NeighborModel model) {
  return model == NeighborModel::kSwap ? "swap" : "add_subtract";
}

absl::StatusOr<NeighborModel> ParseNeighborModel(std::string_view name) {
  if (name == "swap") return NeighborModel::kSwap;
  if (name == "add_subtract" || name == "add-subtract") {
    return NeighborModel::kAddSubtract;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown neighbor model '", std::string(name), "'"));
}

absl::StatusOr<EnvelopeTable> EnvelopeTable::Create(
    double center, std::vector<double> upper, std::vector<double> lower,
    Range range, NeighborModel model, double smoothing) {
  if (absl::Status s = ValidateRange(range); !s.ok()) return s;
  if (upper.empty() || upper.size() != lower.size()) {
    return absl::InvalidArgumentError(
        "upper and lower envelopes must be nonempty and of equal length");
  }
  if (!std::isfinite(smoothing) || smoothing < 0) {
    return absl::InvalidArgumentError("smoothing must be finite and >= 0");
  }
  if (upper[0] != center || lower[0] != center) {
    return absl::InvalidArgumentError(
        "upper[0] and lower[0] must equal the center");
  }
  for (std::size_t l = 0; l < upper.size(); ++l) {
    if (!std::isfinite(upper[l]) || !std::isfinite(lower[l])) {
      return absl::InvalidArgumentError(
          absl::StrCat("non-finite envelope entry at distance ", l));
    }
    if (!range.Contains(upper[l]) || !range.Contains(lower[l])) {
      return absl::InvalidArgumentError(
          absl::StrCat("envelope entry outside range at distance ", l));
    }
    if (l > 0 && (upper[l] < upper[l - 1] || lower[l] > lower[l - 1])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "envelopes must widen with distance; violated at distance ", l));
    }
  }
  EnvelopeTable table;
  table.center_ = center;
  table.upper_ = std::move(upper);
  table.lower_ = std::move(lower);
  table.range_ = range;
  table.model_ = model;
  table.smoothing_ = smoothing;
  return table;
}

double EnvelopeTable::Marginal(int signed_ell) const {
  const int ell = std::abs(signed_ell);
  if (signed_ell > 0) return upper_[ell] - upper_[ell - 1];
  return lower_[ell - 1] - lower_[ell];
}

std::vector<Interval> EnvelopeTable::Intervals() const {
  const int max_l = max_distance();
  std::vector<Interval> out;
  out.reserve(2 * static_cast<std::size_t>(max_l));
  auto flat_for = [this](int ell, double width) {
    return ell == 1 ? std::min(smoothing_, width) : 0.0;
  };
  for (int ell = max_l; ell >= 1; --ell) {
    Interval piece{.sign = -1, .ell = ell, .lo = lower_[ell],
                   .hi = lower_[ell - 1]};
    piece.width = piece.hi - piece.lo;
    piece.flat = flat_for(ell, piece.width);
    out.push_back(piece);
  }
  for (int ell = 1; ell <= max_l; ++ell) {
    Interval piece{.sign = 1, .ell = ell, .lo = upper_[ell - 1],
                   .hi = upper_[ell]};
    piece.width = piece.hi - piece.lo;
    piece.flat = flat_for(ell, piece.width);
    out.push_back(piece);
  }
  return out;
}

std::vector<double> EnvelopeTable::Breakpoints() const {
  std::vector<double> points(upper_.begin(), upper_.end());
  points.insert(points.end(), lower_.begin(), lower_.end());
  if (smoothing_ > 0) {
    for (const Interval& piece : Intervals()) {
      if (piece.ell == 1 && piece.flat > 0) {
        points.push_back(piece.sign > 0 ? piece.lo + piece.flat
                                        : piece.hi - piece.flat);
      }
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

EnvelopeTable TrimSaturated(const EnvelopeTable& table) {
  const Range range = table.range();
  int keep = table.max_distance();
  for (int ell = 0; ell <= table.max_distance(); ++ell) {
    if (table.upper(ell) == range.hi && table.lower(ell) == range.lo) {
      keep = ell;
      break;
    }
  }
  if (keep == table.max_distance()) return table;
  std::vector<double> upper(table.upper().begin(),
                            table.upper().begin() + keep + 1);
  std::vector<double> lower(table.lower().begin(),
                            table.lower().begin() + keep + 1);
  // Entries are a prefix of a valid table, so Create cannot fail.
  return *EnvelopeTable::Create(table.center(), std::move(upper),
                                std::move(lower), range, table.model(),
                                table.smoothing());
}

double Median(std::span<const double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

absl::StatusOr<EnvelopeTable> BuildMedianEnvelope(std::span<const double> data,
                                                  Range range,
                                                  NeighborModel model,
                                                  int max_distance) {
  if (absl::Status s = ValidateRange(range); !s.ok()) return s;
  if (data.empty()) return absl::InvalidArgumentError("empty data");
  if (max_distance < 1) {
    return absl::InvalidArgumentError("max distance L must be >= 1");
  }
  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  if (!range.Contains(sorted.front()) || !range.Contains(sorted.back())) {
    return absl::InvalidArgumentError("data outside range");
  }
  const int n = static_cast<int>(sorted.size());
  const double center = Median(sorted);

  // For a fixed number of removals r and additions a, removing the r smallest
  // records and adding copies of range.hi dominates every other choice order
  // statistic by order statistic (and symmetrically for the lower envelope).
  std::vector<double> upper(max_distance + 1), lower(max_distance + 1);
  for (int ell = 0; ell <= max_distance; ++ell) {
    double hi = center, lo = center;
    if (model == NeighborModel::kSwap) {
      for (int j = 0; j <= std::min(ell, n); ++j) {
        hi = std::max(hi, PaddedMedian(sorted, j, 0, j, range.hi));
        lo = std::min(lo, PaddedMedian(sorted, 0, j, j, range.lo));
      }
    } else {
      for (int r = 0; r <= std::min(ell, n); ++r) {
        for (int a = 0; a <= ell - r; ++a) {
          if (n - r + a < 1) continue;
          hi = std::max(hi, PaddedMedian(sorted, r, 0, a, range.hi));
          lo = std::min(lo, PaddedMedian(sorted, 0, r, a, range.lo));
        }
      }
    }
    upper[ell] = hi;
    lower[ell] = lo;
  }
  absl::StatusOr<EnvelopeTable> table = EnvelopeTable::Create(
      center, std::move(upper), std::move(lower), range, model);
  if (!table.ok()) return table.status();
  return TrimSaturated(*table);
}

absl::StatusOr<EnvelopeTable> BuildBoundedSumEnvelope(double value,
                                                      double per_record_bound,
                                                      Range range,
                                                      NeighborModel model,
                                                      int max_distance) {
  if (absl::Status s = ValidateRange(range); !s.ok()) return s;
  if (!range.Contains(value)) {
    return absl::InvalidArgumentError("value outside range");
  }
  if (!(per_record_bound > 0) || !std::isfinite(per_record_bound)) {
    return absl::InvalidArgumentError("per-record bound must be positive");
  }
  if (max_distance < 1) {
    return absl::InvalidArgumentError("max distance L must be >= 1");
  }
  std::vector<double> upper(max_distance + 1), lower(max_distance + 1);
  for (int ell = 0; ell <= max_distance; ++ell) {
    upper[ell] = std::min(range.hi, value + ell * per_record_bound);
    lower[ell] = std::max(range.lo, value - ell * per_record_bound);
  }
  upper[0] = lower[0] = value;
  absl::StatusOr<EnvelopeTable> table = EnvelopeTable::Create(
      value, std::move(upper), std::move(lower), range, model);
  if (!table.ok()) return table.status();
  return TrimSaturated(*table);
}

absl::StatusOr<EnvelopeTable> BuildEnvelopeBruteForce(
    const DatasetFunction& f, std::span<const double> universe,
    std::span<const double> data, NeighborModel model, int max_distance,
    Range range, std::int64_t budget) {
  if (absl::Status s = ValidateRange(range); !s.ok()) return s;
  absl::StatusOr<Ball> ball =
      EnumerateBall(universe, data, model, max_distance, budget);
  if (!ball.ok()) return ball.status();

  const double center = f(ball->datasets.front());
  if (!std::isfinite(center)) {
    return absl::InvalidArgumentError("f is undefined on the input dataset");
  }
  std::vector<double> upper(max_distance + 1, center);
  std::vector<double> lower(max_distance + 1, center);
  for (std::size_t i = 0; i < ball->datasets.size(); ++i) {
    const double v = f(ball->datasets[i]);
    if (std::isnan(v)) continue;
    if (!range.Contains(v)) {
      return absl::InvalidArgumentError(
          absl::StrCat("f produced ", v, " outside the range"));
    }
    const int d = ball->distance[i];
    upper[d] = std::max(upper[d], v);
    lower[d] = std::min(lower[d], v);
  }
  for (int ell = 1; ell <= max_distance; ++ell) {
    upper[ell] = std::max(upper[ell], upper[ell - 1]);
    lower[ell] = std::min(lower[ell], lower[ell - 1]);
  }
  absl::StatusOr<EnvelopeTable> table = EnvelopeTable::Create(
      center, std::move(upper), std::move(lower), range, model);
  if (!table.ok()) return table.status();
  return TrimSaturated(*table);
}

std::optional<int> InverseIndex(double y, const EnvelopeTable& table) {
  const int max_l = table.max_distance();
  if (!(table.lower(max_l) <= y && y <= table.upper(max_l))) {
    return std::nullopt;
  }
  // The bracket condition is monotone in l, so binary search for the first l
  // that contains y.
  int lo = 0, hi = max_l;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (table.lower(mid) <= y && y <= table.upper(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

absl::StatusOr<EnvelopeTable> SmoothShift(const EnvelopeTable& table,
                                          double rho) {
  if (!std::isfinite(rho) || rho < 0) {
    return absl::InvalidArgumentError("rho must be finite and >= 0");
  }
  if (rho == 0) return table;
  const Range range = table.range();
  std::vector<double> upper(table.upper().begin(), table.upper().end());
  std::vector<double> lower(table.lower().begin(), table.lower().end());
  for (std::size_t l = 1; l < upper.size(); ++l) {
    upper[l] = std::min(range.hi, upper[l] + rho);
    lower[l] = std::max(range.lo, lower[l] - rho);
  }
  absl::StatusOr<EnvelopeTable> shifted =
      EnvelopeTable::Create(table.center(), std::move(upper), std::move(lower),
                            range, table.model(), table.smoothing() + rho);
  if (!shifted.ok()) return shifted.status();
  return TrimSaturated(*shifted);
}

absl::StatusOr<std::optional<int>> InverseSensitivityBruteForce(
    const DatasetFunction& f, std::span<const double> universe,
    std::span<const double> data, NeighborModel model, int max_distance,
    double y, std::int64_t budget) {
  absl::StatusOr<Ball> ball =
      EnumerateBall(universe, data, model, max_distance, budget);
  if (!ball.ok()) return ball.status();
  // Datasets are enumerated in nondecreasing distance.
  for (std::size_t i = 0; i < ball->datasets.size(); ++i) {
    if (f(ball->datasets[i]) == y) return std::optional<int>(ball->distance[i]);
  }
  return std::optional<int>();
}

absl::StatusOr<SampleMonotoneReport> CheckSampleMonotone(
    const DatasetFunction& f, std::span<const double> universe,
    std::span<const double> data, NeighborModel model, int max_distance,
    std::span<const double> y_grid, Range range, std::int64_t budget) {
  absl::StatusOr<Ball> ball =
      EnumerateBall(universe, data, model, max_distance, budget);
  if (!ball.ok()) return ball.status();
  absl::StatusOr<EnvelopeTable> table = BuildEnvelopeBruteForce(
      f, universe, data, model, max_distance, range, budget);
  if (!table.ok()) return table.status();

  std::map<double, int> first_distance;
  for (std::size_t i = 0; i < ball->datasets.size(); ++i) {
    const double v = f(ball->datasets[i]);
    if (std::isnan(v)) continue;
    first_distance.emplace(v, ball->distance[i]);
  }

  SampleMonotoneReport report;
  report.y_grid.assign(y_grid.begin(), y_grid.end());
  for (double y : y_grid) {
    auto it = first_distance.find(y);
    report.inverse_sensitivity.push_back(
        it == first_distance.end() ? std::nullopt
                                   : std::optional<int>(it->second));
    report.inverse_index.push_back(InverseIndex(y, *table));
  }

  constexpr int kInfinite = std::numeric_limits<int>::max();
  const double center = table->center();
  for (int side : {1, -1}) {
    std::vector<std::pair<double, int>> ordered;
    for (std::size_t i = 0; i < y_grid.size(); ++i) {
      const double offset = side * (y_grid[i] - center);
      if (offset < 0) continue;
      ordered.emplace_back(offset,
                           report.inverse_sensitivity[i].value_or(kInfinite));
    }
    std::sort(ordered.begin(), ordered.end());
    for (std::size_t i = 1; i < ordered.size(); ++i) {
      if (ordered[i].second < ordered[i - 1].second) report.monotone = false;
    }
  }
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    if (report.inverse_sensitivity[i].has_value() &&
        report.inverse_sensitivity[i] != report.inverse_index[i]) {
      report.matches_inverse_index = false;
    }
  }
  return report;
}

}  // namespace plm
