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
#include <limits>
#include <map>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "plm/scores.h"
#include "plm/verify.h"

namespace plm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// All nondecreasing index vectors of length `size` over [0, m).
std::vector<std::vector<int>> Multisets(int size, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(size, 0);
  while (true) {
    out.push_back(current);
    int pos = size - 1;
    while (pos >= 0 && current[pos] == m - 1) --pos;
    if (pos < 0) break;
    const int next = current[pos] + 1;
    for (int j = pos; j < size; ++j) current[j] = next;
  }
  return out;
}

// One level of the max/min recursion over the neighbor graph.
std::vector<double> Propagate(const std::vector<double>& previous,
                              const std::vector<std::vector<int>>& adjacency,
                              bool take_max, Execution execution) {
  const std::int64_t n = static_cast<std::int64_t>(previous.size());
  std::vector<double> next(previous.size());
  auto step = [&](std::int64_t i) {
    double v = previous[i];
    for (int j : adjacency[i]) {
      v = take_max ? std::max(v, previous[j]) : std::min(v, previous[j]);
    }
    next[i] = v;
  };
  if (execution == Execution::kSerial) {
    for (std::int64_t i = 0; i < n; ++i) step(i);
  } else {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) step(i);
  }
  return next;
}

absl::StatusOr<std::vector<EnvelopeTable>> VariantTables(
    const NeighborAtlas& atlas, SuiteVariant variant) {
  if (variant != SuiteVariant::kApproximate) return atlas.tables;
  std::vector<EnvelopeTable> tables;
  tables.reserve(atlas.values.size());
  for (std::size_t i = 0; i < atlas.values.size(); ++i) {
    absl::StatusOr<RadiusSchedule> schedule =
        AtlasSchedule(atlas, static_cast<int>(i));
    if (!schedule.ok()) return schedule.status();
    absl::StatusOr<EnvelopeTable> table =
        ScheduleToEnvelope(atlas.values[i], *schedule, atlas.range);
    if (!table.ok()) return table.status();
    tables.push_back(*std::move(table));
  }
  return tables;
}

MechanismKind VariantKind(SuiteVariant variant) {
  switch (variant) {
    case SuiteVariant::kInverseSensitivity:
      return MechanismKind::kInverseSensitivity;
    case SuiteVariant::kTruncatedLaplace:
      return MechanismKind::kTruncatedLaplace;
    case SuiteVariant::kPiecewiseLaplace:
    case SuiteVariant::kApproximate:
      break;
  }
  return MechanismKind::kPiecewiseLaplace;
}

struct EdgeMax {
  double value = -std::numeric_limits<double>::infinity();
  std::int64_t edge = -1;

  // Largest value, ties to the smallest edge index, so the result does not
  // depend on how edges were split across threads.
  void Merge(double v, std::int64_t e) {
    if (v > value || (v == value && (edge < 0 || e < edge))) {
      value = v;
      edge = e;
    }
  }
};

struct EdgeAccumulator {
  EdgeMax ratio;
  EdgeMax br;
  std::int64_t grid_points = 0;
  bool mismatch = false;

  void Add(const LogRatioSups& sups, std::int64_t e) {
    ratio.Merge(std::max(sups.forward, sups.backward), e);
    br.Merge(sups.forward + sups.backward, e);
    grid_points += sups.grid_size;
    mismatch = mismatch || sups.support_mismatch;
  }

  void Merge(const EdgeAccumulator& other) {
    ratio.Merge(other.ratio.value, other.ratio.edge);
    br.Merge(other.br.value, other.br.edge);
    grid_points += other.grid_points;
    mismatch = mismatch || other.mismatch;
  }
};

}  // namespace

std::string_view SuiteFunctionName(SuiteFunction function) {
  return function == SuiteFunction::kMedian ? "median" : "clipped_sum";
}

DatasetFunction MakeSuiteFunction(SuiteFunction function, Range range) {
  if (function == SuiteFunction::kMedian) {
    return [](std::span<const double> x) { return Median(x); };
  }
  return [range](std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v;
    return std::clamp(sum, range.lo, range.hi);
  };
}

absl::StatusOr<NeighborAtlas> BuildNeighborAtlas(
    SuiteFunction function, int size, std::span<const double> universe,
    Range range, Execution execution) {
  if (size < 1) return absl::InvalidArgumentError("dataset size must be >= 1");
  std::vector<double> values(universe.begin(), universe.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() < 2) {
    return absl::InvalidArgumentError("universe needs at least two values");
  }

  NeighborAtlas atlas;
  atlas.function = function;
  atlas.size = size;
  atlas.universe = values;
  atlas.range = range;
  const int m = static_cast<int>(values.size());
  const std::vector<std::vector<int>> index_sets = Multisets(size, m);
  std::map<std::vector<int>, int> ids;
  for (std::size_t i = 0; i < index_sets.size(); ++i) {
    ids.emplace(index_sets[i], static_cast<int>(i));
  }

  const DatasetFunction f = MakeSuiteFunction(function, range);
  const std::size_t count = index_sets.size();
  atlas.datasets.resize(count);
  atlas.values.resize(count);
  atlas.adjacency.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double>& data = atlas.datasets[i];
    for (int idx : index_sets[i]) data.push_back(values[idx]);
    atlas.values[i] = f(data);
    if (!range.Contains(atlas.values[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("f(x) = ", atlas.values[i], " lies outside the range"));
    }
    // Swap one record for any other universe value. Distinct (record value,
    // replacement) pairs give distinct multisets.
    const std::vector<int>& base = index_sets[i];
    for (int pos = 0; pos < size; ++pos) {
      if (pos > 0 && base[pos] == base[pos - 1]) continue;
      for (int u = 0; u < m; ++u) {
        if (u == base[pos]) continue;
        std::vector<int> swapped = base;
        swapped[pos] = u;
        std::sort(swapped.begin(), swapped.end());
        const int j = ids.at(swapped);
        atlas.adjacency[i].push_back(j);
        if (static_cast<int>(i) < j) atlas.edges.emplace_back(i, j);
      }
    }
  }

  std::vector<std::vector<double>> upper = {atlas.values};
  std::vector<std::vector<double>> lower = {atlas.values};
  for (int ell = 1; ell <= size; ++ell) {
    upper.push_back(Propagate(upper.back(), atlas.adjacency, true, execution));
    lower.push_back(Propagate(lower.back(), atlas.adjacency, false, execution));
  }

  atlas.local_sensitivity.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    atlas.local_sensitivity[i] = std::max(upper[1][i] - atlas.values[i],
                                          atlas.values[i] - lower[1][i]);
    atlas.global_sensitivity =
        std::max(atlas.global_sensitivity, atlas.local_sensitivity[i]);
  }
  std::vector<std::vector<double>> radius = {atlas.local_sensitivity};
  for (int ell = 1; ell <= size; ++ell) {
    radius.push_back(Propagate(radius.back(), atlas.adjacency, true, execution));
  }

  atlas.tables.reserve(count);
  atlas.radius_bound.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> up, lo;
    for (int ell = 0; ell <= size; ++ell) {
      up.push_back(upper[ell][i]);
      lo.push_back(lower[ell][i]);
      atlas.radius_bound[i].push_back(radius[ell][i]);
    }
    absl::StatusOr<EnvelopeTable> table = EnvelopeTable::Create(
        atlas.values[i], std::move(up), std::move(lo), range);
    if (!table.ok()) return table.status();
    atlas.tables.push_back(TrimSaturated(*table));
  }
  return atlas;
}

absl::StatusOr<RadiusSchedule> AtlasSchedule(const NeighborAtlas& atlas,
                                             int i) {
  if (i < 0 || i >= static_cast<int>(atlas.values.size())) {
    return absl::OutOfRangeError("dataset index out of range");
  }
  const std::vector<double>& bound = atlas.radius_bound[i];
  // Where f is locally constant (a saturated clipped sum) the sup is 0.
  // Raising every radius to the same floor keeps both neighbor conditions.
  const double floor = kAtlasRadiusFloor * atlas.range.Length();
  auto g = [&](int ell) {
    return std::max(floor, bound[std::min(ell, atlas.size)]);
  };
  const double center = atlas.values[i];
  const double needed =
      std::max(atlas.range.hi - center, center - atlas.range.lo);
  int max_distance = 1;
  double reach = g(1);
  while (reach < needed) {
    ++max_distance;
    reach += g(max_distance);
  }
  return ScheduleFromLocalSensitivity(g, max_distance);
}

std::string_view SuiteVariantName(SuiteVariant variant) {
  switch (variant) {
    case SuiteVariant::kPiecewiseLaplace:
      return "plm";
    case SuiteVariant::kInverseSensitivity:
      return "inv";
    case SuiteVariant::kTruncatedLaplace:
      return "tlap";
    case SuiteVariant::kApproximate:
      return "approx";
  }
  return "unknown";
}

absl::StatusOr<std::vector<SuiteCheck>> VerifyNeighborSuite(
    const NeighborAtlas& atlas, const SuiteOptions& options,
    Execution execution) {
  std::vector<SuiteCheck> checks;
  const std::int64_t n_edges = static_cast<std::int64_t>(atlas.edges.size());
  for (SuiteVariant variant : options.variants) {
    absl::StatusOr<std::vector<EnvelopeTable>> tables =
        VariantTables(atlas, variant);
    if (!tables.ok()) return tables.status();
    for (double eps : options.epsilons) {
      const MechanismSpec spec{.kind = VariantKind(variant),
                               .epsilon = eps,
                               .laplace_delta = atlas.global_sensitivity};
      std::vector<Mechanism> mechanisms;
      mechanisms.reserve(tables->size());
      for (const EnvelopeTable& table : *tables) {
        absl::StatusOr<Mechanism> mech = Mechanism::Create(spec, table);
        if (!mech.ok()) return mech.status();
        mechanisms.push_back(*std::move(mech));
      }

      EdgeAccumulator total;
      auto visit = [&](std::int64_t e, EdgeAccumulator& acc) {
        const auto [a, b] = atlas.edges[e];
        acc.Add(SupLogRatios(mechanisms[a], mechanisms[b],
                             options.points_per_segment),
                e);
      };
      if (execution == Execution::kSerial) {
        for (std::int64_t e = 0; e < n_edges; ++e) visit(e, total);
      } else {
#pragma omp parallel
        {
          EdgeAccumulator local;
#pragma omp for schedule(dynamic, 256) nowait
          for (std::int64_t e = 0; e < n_edges; ++e) visit(e, local);
#pragma omp critical(plm_suite_merge)
          total.Merge(local);
        }
      }

      SuiteCheck check;
      check.function = atlas.function;
      check.size = atlas.size;
      check.variant = variant;
      check.epsilon = eps;
      check.claimed_epsilon = options.claimed_scale * eps;
      check.pairs = n_edges;
      check.grid_points = total.grid_points;
      check.max_log_ratio = std::max(0.0, total.ratio.value);
      check.max_br_sum = std::max(0.0, total.br.value);
      check.support_mismatch = total.mismatch;
      const double budget = check.claimed_epsilon + kLogRatioTolerance;
      check.dp_pass = !total.mismatch && check.max_log_ratio <= budget;
      check.br_pass = !total.mismatch && check.max_br_sum <= budget;
      if (total.ratio.edge >= 0) {
        check.worst_pair = atlas.edges[total.ratio.edge];
      }
      checks.push_back(check);
    }
  }
  return checks;
}

absl::StatusOr<double> MaxApproxScoreGap(const NeighborAtlas& atlas,
                                         std::span<const double> y_grid,
                                         Execution execution) {
  std::vector<RadiusSchedule> schedules;
  schedules.reserve(atlas.values.size());
  for (std::size_t i = 0; i < atlas.values.size(); ++i) {
    absl::StatusOr<RadiusSchedule> s =
        AtlasSchedule(atlas, static_cast<int>(i));
    if (!s.ok()) return s.status();
    schedules.push_back(*std::move(s));
  }
  const std::int64_t n_edges = static_cast<std::int64_t>(atlas.edges.size());
  auto edge_gap = [&](std::int64_t e) {
    const auto [a, b] = atlas.edges[e];
    double gap = 0.0;
    for (double y : y_grid) {
      const Score qa = QApprox(std::abs(y - atlas.values[a]), schedules[a]);
      const Score qb = QApprox(std::abs(y - atlas.values[b]), schedules[b]);
      if (qa.InSupport() != qb.InSupport()) return kInf;
      if (qa.InSupport()) gap = std::max(gap, std::abs(qa.value - qb.value));
    }
    return gap;
  };
  double worst = 0.0;
  if (execution == Execution::kSerial) {
    for (std::int64_t e = 0; e < n_edges; ++e) {
      worst = std::max(worst, edge_gap(e));
    }
  } else {
#pragma omp parallel for schedule(dynamic, 256) reduction(max : worst)
    for (std::int64_t e = 0; e < n_edges; ++e) {
      worst = std::max(worst, edge_gap(e));
    }
  }
  return worst;
}

namespace {

bool SameTable(const EnvelopeTable& a, const EnvelopeTable& b) {
  return a.center() == b.center() &&
         std::equal(a.upper().begin(), a.upper().end(), b.upper().begin(),
                    b.upper().end()) &&
         std::equal(a.lower().begin(), a.lower().end(), b.lower().begin(),
                    b.lower().end());
}

}  // namespace

absl::StatusOr<std::vector<OracleReport>> VerifyOracleAgreement(
    std::span<const int> sizes, Range range, Execution execution) {
  std::vector<double> universe;
  for (double v = std::ceil(range.lo); v <= range.hi; v += 1) {
    universe.push_back(v);
  }
  std::vector<OracleReport> reports;
  for (int size : sizes) {
    absl::StatusOr<NeighborAtlas> atlas = BuildNeighborAtlas(
        SuiteFunction::kMedian, size, universe, range, execution);
    if (!atlas.ok()) return atlas.status();
    OracleReport median{.name = absl::StrCat("median n=", size)};
    for (std::size_t i = 0; i < atlas->datasets.size(); ++i) {
      absl::StatusOr<EnvelopeTable> analytic = BuildMedianEnvelope(
          atlas->datasets[i], range, NeighborModel::kSwap, size);
      if (!analytic.ok()) return analytic.status();
      ++median.instances;
      if (!SameTable(TrimSaturated(*analytic), atlas->tables[i])) {
        ++median.mismatches;
      }
    }
    reports.push_back(median);

    const std::vector<double> bits = {0.0, 1.0};
    const DatasetFunction sum =
        MakeSuiteFunction(SuiteFunction::kClippedSum, range);
    const int max_distance = static_cast<int>(std::ceil(range.Length())) + 1;
    OracleReport bounded{.name = absl::StrCat("bounded_sum n=", size)};
    for (int ones = 0; ones <= size; ++ones) {
      std::vector<double> data(size, 0.0);
      std::fill(data.end() - ones, data.end(), 1.0);
      absl::StatusOr<EnvelopeTable> brute =
          BuildEnvelopeBruteForce(sum, bits, data, NeighborModel::kAddSubtract,
                                  max_distance, range);
      if (!brute.ok()) return brute.status();
      absl::StatusOr<EnvelopeTable> analytic =
          BuildBoundedSumEnvelope(sum(data), 1.0, range,
                                  NeighborModel::kAddSubtract, max_distance);
      if (!analytic.ok()) return analytic.status();
      ++bounded.instances;
      if (!SameTable(TrimSaturated(*analytic), TrimSaturated(*brute))) {
        ++bounded.mismatches;
      }
    }
    reports.push_back(bounded);
  }
  return reports;
}

}  // namespace plm
