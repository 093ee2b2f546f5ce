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

#include "plm/verify.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "boost/math/special_functions/gamma.hpp"
#include "plm/kernels.h"

namespace plm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEndpointOffset = 1e-9;

// Piece of `pieces` containing y, or nullptr.
const LogLinearPiece* FindPiece(const std::vector<LogLinearPiece>& pieces,
                                double y) {
  auto it = std::upper_bound(
      pieces.begin(), pieces.end(), y,
      [](double value, const LogLinearPiece& p) { return value < p.a; });
  if (it == pieces.begin()) return nullptr;
  --it;
  return y <= it->b ? &*it : nullptr;
}

void AppendSegmentGrid(double s, double t, int points_per_segment,
                       std::vector<double>& out) {
  const double width = t - s;
  out.push_back(s + kEndpointOffset * width);
  for (int k = 0; k < points_per_segment; ++k) {
    const double theta = std::numbers::pi * (k + 0.5) / points_per_segment;
    out.push_back(s + width * 0.5 * (1.0 - std::cos(theta)));
  }
  out.push_back(t - kEndpointOffset * width);
}

std::vector<double> MergedBreakpoints(const Mechanism& a, const Mechanism& b) {
  std::vector<double> points;
  for (const Mechanism* m : {&a, &b}) {
    for (const LogLinearPiece& p : m->Pieces()) {
      points.push_back(p.a);
      points.push_back(p.b);
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

absl::Status CheckSameRange(const Mechanism& a, const Mechanism& b) {
  if (!(a.table().range() == b.table().range())) {
    return absl::InvalidArgumentError("tables have different output ranges");
  }
  return absl::OkStatus();
}

MechanismSpec PlmSpec(double eps) {
  return {.kind = MechanismKind::kPiecewiseLaplace, .epsilon = eps};
}

}  // namespace

std::vector<double> RefinedGrid(std::span<const double> breakpoints,
                                int points_per_segment) {
  std::vector<double> out;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (breakpoints[i] > breakpoints[i - 1]) {
      AppendSegmentGrid(breakpoints[i - 1], breakpoints[i], points_per_segment,
                        out);
    }
  }
  return out;
}

LogRatioSups SupLogRatios(const Mechanism& a, const Mechanism& b,
                          int points_per_segment) {
  LogRatioSups sups;
  sups.forward = -kInf;
  sups.backward = -kInf;
  const std::vector<double> points = MergedBreakpoints(a, b);
  std::vector<double> grid;
  grid.reserve(points_per_segment + 2);
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double s = points[i - 1], t = points[i];
    const double mid = 0.5 * (s + t);
    const LogLinearPiece* pa = FindPiece(a.Pieces(), mid);
    const LogLinearPiece* pb = FindPiece(b.Pieces(), mid);
    if (pa == nullptr && pb == nullptr) continue;
    if (pa == nullptr || pb == nullptr) {
      sups.support_mismatch = true;
      sups.forward = sups.backward = kInf;
      continue;
    }
    grid.clear();
    AppendSegmentGrid(s, t, points_per_segment, grid);
    for (double y : grid) {
      const double diff = pa->LogDensity(y) - pb->LogDensity(y);
      sups.forward = std::max(sups.forward, diff);
      sups.backward = std::max(sups.backward, -diff);
    }
    sups.grid_size += static_cast<std::int64_t>(grid.size());
  }
  if (sups.grid_size == 0 && !sups.support_mismatch) {
    sups.forward = sups.backward = 0.0;
  }
  return sups;
}

absl::StatusOr<VerificationReport> VerifyDp(const Mechanism& x,
                                            const Mechanism& neighbor,
                                            double claimed_eps,
                                            int points_per_segment) {
  if (absl::Status s = CheckSameRange(x, neighbor); !s.ok()) return s;
  const LogRatioSups sups = SupLogRatios(x, neighbor, points_per_segment);
  VerificationReport report;
  report.check = "dp";
  report.max_log_ratio = std::max(sups.forward, sups.backward);
  report.br_sum = sups.forward + sups.backward;
  report.grid_size = sups.grid_size;
  report.tolerance = kLogRatioTolerance;
  report.pass = !sups.support_mismatch &&
                report.max_log_ratio <= claimed_eps + kLogRatioTolerance;
  report.detail =
      sups.support_mismatch
          ? "supports differ"
          : absl::StrFormat("max |log ratio| %.12g vs eps %.12g",
                            report.max_log_ratio, claimed_eps);
  return report;
}

absl::StatusOr<VerificationReport> VerifyDp(const EnvelopeTable& x,
                                            const EnvelopeTable& neighbor,
                                            double eps,
                                            int points_per_segment) {
  absl::StatusOr<Mechanism> mx = Mechanism::Create(PlmSpec(eps), x);
  if (!mx.ok()) return mx.status();
  absl::StatusOr<Mechanism> mn = Mechanism::Create(PlmSpec(eps), neighbor);
  if (!mn.ok()) return mn.status();
  return VerifyDp(*mx, *mn, eps, points_per_segment);
}

absl::StatusOr<VerificationReport> VerifyBoundedRange(
    const Mechanism& x, const Mechanism& neighbor, double claimed_eps,
    int points_per_segment) {
  if (absl::Status s = CheckSameRange(x, neighbor); !s.ok()) return s;
  const LogRatioSups sups = SupLogRatios(x, neighbor, points_per_segment);
  VerificationReport report;
  report.check = "bounded_range";
  report.max_log_ratio = std::max(sups.forward, sups.backward);
  report.br_sum = sups.forward + sups.backward;
  report.grid_size = sups.grid_size;
  report.tolerance = kLogRatioTolerance;
  report.pass = !sups.support_mismatch &&
                report.br_sum <= claimed_eps + kLogRatioTolerance;
  report.detail =
      sups.support_mismatch
          ? "supports differ"
          : absl::StrFormat("forward %.12g + backward %.12g vs eps %.12g",
                            sups.forward, sups.backward, claimed_eps);
  return report;
}

absl::StatusOr<VerificationReport> VerifyBoundedRange(
    const EnvelopeTable& x, const EnvelopeTable& neighbor, double eps,
    int points_per_segment) {
  absl::StatusOr<Mechanism> mx = Mechanism::Create(PlmSpec(eps), x);
  if (!mx.ok()) return mx.status();
  absl::StatusOr<Mechanism> mn = Mechanism::Create(PlmSpec(eps), neighbor);
  if (!mn.ok()) return mn.status();
  return VerifyBoundedRange(*mx, *mn, eps, points_per_segment);
}

absl::StatusOr<std::vector<double>> DominanceMargins(
    const EnvelopeTable& table, double eps, std::span<const double> alphas) {
  absl::StatusOr<Mechanism> plm = Mechanism::Create(PlmSpec(eps), table);
  if (!plm.ok()) return plm.status();
  absl::StatusOr<Mechanism> inv = Mechanism::Create(
      {.kind = MechanismKind::kInverseSensitivity, .epsilon = eps}, table);
  if (!inv.ok()) return inv.status();
  std::vector<double> margins;
  margins.reserve(alphas.size());
  for (double alpha : alphas) {
    margins.push_back(plm->MassWithin(alpha) - inv->MassWithin(alpha));
  }
  return margins;
}

absl::StatusOr<VerificationReport> VerifyDominance(
    const EnvelopeTable& table, double eps, std::span<const double> alphas) {
  absl::StatusOr<std::vector<double>> margins =
      DominanceMargins(table, eps, alphas);
  if (!margins.ok()) return margins.status();
  VerificationReport report;
  report.check = "dominance";
  report.tolerance = kDominanceTolerance;
  report.grid_size = static_cast<std::int64_t>(alphas.size());
  report.dominance_min_margin =
      margins->empty() ? 0.0 : *std::min_element(margins->begin(),
                                                 margins->end());
  report.pass = report.dominance_min_margin >= -kDominanceTolerance;

  // Strictness: alpha strictly inside a positive-width piece on either side.
  double interior_min = kInf;
  const double center = table.center();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (const Interval& piece : table.Intervals()) {
      if (!(piece.width > 0)) continue;
      const double inner = std::abs(piece.InnerEndpoint() - center);
      if (alphas[i] > inner && alphas[i] < inner + piece.width) {
        interior_min = std::min(interior_min, (*margins)[i]);
        break;
      }
    }
  }
  report.dominance_interior_margin = interior_min;
  report.detail = absl::StrFormat(
      "min margin %.12g; min margin at interior alpha %.12g",
      report.dominance_min_margin, interior_min);
  return report;
}

double ChiSquarePValue(double statistic, int degrees_of_freedom) {
  if (statistic <= 0) return 1.0;
  return boost::math::gamma_q(0.5 * degrees_of_freedom, 0.5 * statistic);
}

namespace {

absl::StatusOr<std::vector<double>> EquiprobableEdges(const GofTarget& target,
                                                      int n_bins) {
  const Range support = target.support;
  if (!(support.lo < support.hi)) {
    return absl::InvalidArgumentError("degenerate density: empty support");
  }
  if (std::abs(target.cdf(support.lo)) > 1e-12 ||
      std::abs(target.cdf(support.hi) - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        "degenerate density: CDF does not run from 0 to 1 over the support");
  }
  std::vector<double> edges;
  edges.reserve(n_bins - 1);
  for (int k = 1; k < n_bins; ++k) {
    const double level = static_cast<double>(k) / n_bins;
    double lo = edges.empty() ? support.lo : edges.back();
    double hi = support.hi;
    for (int iter = 0; iter < 200 && hi - lo > 0; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (target.cdf(mid) < level) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    edges.push_back(hi);
  }
  return edges;
}

VerificationReport ChiSquareReport(std::span<const double> samples,
                                   std::span<const double> edges, int n_bins,
                                   double significance) {
  std::vector<std::int64_t> counts(n_bins, 0);
  for (double y : samples) {
    const auto bin = std::upper_bound(edges.begin(), edges.end(), y) -
                     edges.begin();
    ++counts[bin];
  }
  const double expected = static_cast<double>(samples.size()) / n_bins;
  double statistic = 0.0;
  for (std::int64_t c : counts) {
    const double diff = static_cast<double>(c) - expected;
    statistic += diff * diff / expected;
  }
  VerificationReport report;
  report.check = "gof";
  report.gof_statistic = statistic;
  report.gof_p_value = ChiSquarePValue(statistic, n_bins - 1);
  report.grid_size = n_bins;
  report.tolerance = significance;
  report.pass = report.gof_p_value >= significance;
  report.detail = absl::StrFormat("chi2 %.6g on %d dof, p = %.6g", statistic,
                                  n_bins - 1, report.gof_p_value);
  return report;
}

absl::Status ValidateGofArgs(std::int64_t n_samples, int n_bins) {
  if (n_samples < 100'000) {
    return absl::InvalidArgumentError("goodness of fit needs >= 1e5 samples");
  }
  if (n_bins < 2) return absl::InvalidArgumentError("need at least 2 bins");
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<VerificationReport> Gof(const Sampler& sampler,
                                       const GofTarget& target,
                                       std::int64_t n_samples, int n_bins,
                                       std::uint64_t seed,
                                       double significance) {
  if (absl::Status s = ValidateGofArgs(n_samples, n_bins); !s.ok()) return s;
  absl::StatusOr<std::vector<double>> edges =
      EquiprobableEdges(target, n_bins);
  if (!edges.ok()) return edges.status();
  RandomStream stream(seed);
  std::vector<double> samples(static_cast<std::size_t>(n_samples));
  for (double& y : samples) y = sampler(stream);
  return ChiSquareReport(samples, *edges, n_bins, significance);
}

absl::StatusOr<VerificationReport> GofMechanism(const Mechanism& sampled,
                                                const Mechanism& target,
                                                std::int64_t n_samples,
                                                int n_bins, std::uint64_t seed,
                                                double significance) {
  if (absl::Status s = ValidateGofArgs(n_samples, n_bins); !s.ok()) return s;
  const GofTarget gof_target{
      .cdf = [&target](double y) { return target.Cdf(y); },
      .support = target.Support()};
  absl::StatusOr<std::vector<double>> edges =
      EquiprobableEdges(gof_target, n_bins);
  if (!edges.ok()) return edges.status();
  const std::vector<double> samples = SampleBatch(sampled, n_samples, seed);
  return ChiSquareReport(samples, *edges, n_bins, significance);
}

}  // namespace plm
