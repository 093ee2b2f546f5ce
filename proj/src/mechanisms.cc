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

#include "plm/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "plm/scores.h"

namespace plm {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

absl::Status ValidateEpsilon(double eps) {
  if (!(eps > 0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", eps));
  }
  return absl::OkStatus();
}

absl::Status ValidateUniform(double u) {
  if (!(u >= 0.0 && u < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("uniform draw must lie in [0, 1), got ", u));
  }
  return absl::OkStatus();
}

// Integral of exp(-(z / w) * eps / 2) over [0, w], divided by w.
double SlopedMassFactor(double eps) {
  const double half = 0.5 * eps;
  return -std::expm1(-half) / half;
}

double LogSumExp(std::span<const double> values) {
  double peak = kNegInf;
  for (double v : values) peak = std::max(peak, v);
  if (peak == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

// Truncated Laplace pieces: rate beta = eps / (2 delta) around center on
// [range.lo, range.hi].
struct TruncLaplaceLaw {
  double center;
  double rate;
  Range range;

  // Unnormalized mass on [center - left, center] and [center, center + right].
  double SideMass(double extent) const {
    return -std::expm1(-rate * extent) / rate;
  }
  double LeftMass() const { return SideMass(center - range.lo); }
  double RightMass() const { return SideMass(range.hi - center); }
  double LogNormalizer() const { return std::log(LeftMass() + RightMass()); }

  double Cdf(double y) const {
    if (y <= range.lo) return 0.0;
    if (y >= range.hi) return 1.0;
    const double total = LeftMass() + RightMass();
    const double below = y <= center ? LeftMass() - SideMass(center - y)
                                     : LeftMass() + SideMass(y - center);
    return std::clamp(below / total, 0.0, 1.0);
  }

  double Quantile(double u) const {
    const double left = LeftMass();
    const double t = u * (left + RightMass());
    if (t < left) {
      return center + std::log1p(-rate * (left - t)) / rate;
    }
    return center - std::log1p(-rate * (t - left)) / rate;
  }
};

}  // namespace

std::string_view MechanismName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kPiecewiseLaplace:
      return "plm";
    case MechanismKind::kInverseSensitivity:
      return "inv";
    case MechanismKind::kTruncatedLaplace:
      return "tlap";
  }
  return "unknown";
}

absl::StatusOr<MechanismKind> ParseMechanismKind(std::string_view name) {
  if (name == "plm") return MechanismKind::kPiecewiseLaplace;
  if (name == "inv") return MechanismKind::kInverseSensitivity;
  if (name == "tlap") return MechanismKind::kTruncatedLaplace;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism '", std::string(name), "' (expected plm|inv|tlap)"));
}

absl::StatusOr<double> SampleTruncExpo(double delta, double eps, double u) {
  if (!(delta > 0) || !std::isfinite(delta)) {
    return absl::InvalidArgumentError("delta must be positive");
  }
  if (absl::Status s = ValidateEpsilon(eps); !s.ok()) return s;
  if (absl::Status s = ValidateUniform(u); !s.ok()) return s;
  const double z = -(delta / eps) * std::log1p(u * std::expm1(-eps));
  return std::clamp(z, 0.0, delta);
}

double TruncExpoCdf(double z, double delta, double eps) {
  if (z <= 0) return 0.0;
  if (z >= delta) return 1.0;
  return std::expm1(-z * eps / delta) / std::expm1(-eps);
}

absl::StatusOr<Mechanism> Mechanism::Create(const MechanismSpec& spec,
                                            const EnvelopeTable& table) {
  if (absl::Status s = ValidateEpsilon(spec.epsilon); !s.ok()) return s;
  if (!(spec.rho_smooth >= 0) || !std::isfinite(spec.rho_smooth)) {
    return absl::InvalidArgumentError("rho_smooth must be finite and >= 0");
  }
  if (spec.kind == MechanismKind::kTruncatedLaplace) {
    if (!(spec.laplace_delta > 0) || !std::isfinite(spec.laplace_delta)) {
      return absl::InvalidArgumentError(
          "truncated Laplace needs a positive sensitivity");
    }
    Mechanism mechanism(spec, table);
    const TruncLaplaceLaw law{table.center(),
                              spec.epsilon / (2.0 * spec.laplace_delta),
                              table.range()};
    mechanism.log_normalizer_ = law.LogNormalizer();
    mechanism.BuildPieces();
    return mechanism;
  }

  absl::StatusOr<EnvelopeTable> smoothed = SmoothShift(table, spec.rho_smooth);
  if (!smoothed.ok()) return smoothed.status();
  Mechanism mechanism(spec, *std::move(smoothed));

  const double eps = spec.epsilon;
  const double factor = SlopedMassFactor(eps);
  for (const Interval& piece : mechanism.table_.Intervals()) {
    if (!(piece.width > 0)) continue;
    const double extent =
        spec.kind == MechanismKind::kPiecewiseLaplace
            ? piece.flat + piece.SlopedWidth() * factor
            : piece.width;
    mechanism.intervals_.push_back(piece);
    mechanism.log_weight_.push_back(-0.5 * eps * piece.ell +
                                    std::log(extent));
  }
  if (mechanism.intervals_.empty()) {
    return absl::FailedPreconditionError(
        "all interval widths are zero; the table has an empty support");
  }
  mechanism.log_normalizer_ = LogSumExp(mechanism.log_weight_);
  mechanism.cumulative_.resize(mechanism.intervals_.size());
  double running = 0.0;
  for (std::size_t i = 0; i < mechanism.intervals_.size(); ++i) {
    running += std::exp(mechanism.log_weight_[i] - mechanism.log_normalizer_);
    mechanism.cumulative_[i] = running;
  }
  mechanism.cumulative_.back() = 1.0;
  mechanism.BuildPieces();
  return mechanism;
}

Range Mechanism::Support() const {
  if (spec_.kind == MechanismKind::kTruncatedLaplace) return table_.range();
  return {intervals_.front().lo, intervals_.back().hi};
}

int Mechanism::DrawsPerSample() const {
  return spec_.kind == MechanismKind::kTruncatedLaplace ? 1 : 2;
}

double Mechanism::PositionInPiece(std::size_t i, double u) const {
  const Interval& piece = intervals_[i];
  double offset;
  if (spec_.kind == MechanismKind::kInverseSensitivity) {
    offset = u * piece.width;
  } else {
    const double sloped = piece.SlopedWidth();
    const double half = 0.5 * spec_.epsilon;
    if (piece.flat > 0) {
      const double flat_share =
          piece.flat / (piece.flat + sloped * SlopedMassFactor(spec_.epsilon));
      if (u < flat_share || !(sloped > 0)) {
        offset = std::min(u / flat_share, 1.0) * piece.flat;
      } else {
        const double rescaled =
            std::min((u - flat_share) / (1.0 - flat_share),
                     std::nextafter(1.0, 0.0));
        offset = piece.flat + *SampleTruncExpo(sloped, half, rescaled);
      }
    } else {
      offset = *SampleTruncExpo(piece.width, half, u);
    }
  }
  offset = std::clamp(offset, 0.0, piece.width);
  return piece.sign > 0 ? piece.lo + offset : piece.hi - offset;
}

double Mechanism::SampleFromUniforms(std::span<const double> u) const {
  if (spec_.kind == MechanismKind::kTruncatedLaplace) {
    const TruncLaplaceLaw law{table_.center(),
                              spec_.epsilon / (2.0 * spec_.laplace_delta),
                              table_.range()};
    return std::clamp(law.Quantile(u[0]), table_.range().lo,
                      table_.range().hi);
  }
  const auto it =
      std::upper_bound(cumulative_.begin(), cumulative_.end(), u[0]);
  const std::size_t i = std::min<std::size_t>(it - cumulative_.begin(),
                                              cumulative_.size() - 1);
  return PositionInPiece(i, u[1]);
}

double Mechanism::Sample(RandomStream& stream) const {
  double u[2] = {stream.NextUniform(), 0.0};
  if (DrawsPerSample() == 2) u[1] = stream.NextUniform();
  return SampleFromUniforms(u);
}

double Mechanism::LogDensity(double y) const {
  switch (spec_.kind) {
    case MechanismKind::kPiecewiseLaplace: {
      const Score score = QPlm(y, table_);
      if (!score.InSupport()) return kNegInf;
      return 0.5 * spec_.epsilon * score.value - log_normalizer_;
    }
    case MechanismKind::kInverseSensitivity: {
      const std::optional<int> index = InverseIndex(y, table_);
      if (!index.has_value()) return kNegInf;
      const int ell = std::max(*index, 1);
      return -0.5 * spec_.epsilon * ell - log_normalizer_;
    }
    case MechanismKind::kTruncatedLaplace: {
      if (!table_.range().Contains(y)) return kNegInf;
      const double rate = spec_.epsilon / (2.0 * spec_.laplace_delta);
      return -rate * std::abs(y - table_.center()) - log_normalizer_;
    }
  }
  return kNegInf;
}

double Mechanism::Density(double y) const { return std::exp(LogDensity(y)); }

double Mechanism::PieceMassWithin(std::size_t i, double t) const {
  const Interval& piece = intervals_[i];
  const double mass = std::exp(log_weight_[i] - log_normalizer_);
  t = std::clamp(t, 0.0, piece.width);
  if (spec_.kind == MechanismKind::kInverseSensitivity) {
    return mass * (t / piece.width);
  }
  const double sloped = piece.SlopedWidth();
  const double factor = SlopedMassFactor(spec_.epsilon);
  const double flat_part = std::min(t, piece.flat);
  const double sloped_part =
      sloped > 0 ? sloped * factor *
                       TruncExpoCdf(t - piece.flat, sloped, 0.5 * spec_.epsilon)
                 : 0.0;
  return mass * (flat_part + sloped_part) / (piece.flat + sloped * factor);
}

double Mechanism::Cdf(double y) const {
  if (spec_.kind == MechanismKind::kTruncatedLaplace) {
    const TruncLaplaceLaw law{table_.center(),
                              spec_.epsilon / (2.0 * spec_.laplace_delta),
                              table_.range()};
    return law.Cdf(y);
  }
  double below = 0.0;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const Interval& piece = intervals_[i];
    const double mass = std::exp(log_weight_[i] - log_normalizer_);
    if (y >= piece.hi) {
      below += mass;
      continue;
    }
    if (y > piece.lo) {
      below += piece.sign > 0 ? PieceMassWithin(i, y - piece.lo)
                              : mass - PieceMassWithin(i, piece.hi - y);
    }
    break;
  }
  return std::clamp(below, 0.0, 1.0);
}

double Mechanism::MassWithin(double alpha) const {
  if (alpha < 0) return 0.0;
  const double center = table_.center();
  if (spec_.kind == MechanismKind::kTruncatedLaplace) {
    const TruncLaplaceLaw law{center,
                              spec_.epsilon / (2.0 * spec_.laplace_delta),
                              table_.range()};
    const double left = law.SideMass(std::min(alpha, center - law.range.lo));
    const double right = law.SideMass(std::min(alpha, law.range.hi - center));
    return (left + right) / (law.LeftMass() + law.RightMass());
  }
  double total = 0.0;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const double inner = std::abs(intervals_[i].InnerEndpoint() - center);
    total += PieceMassWithin(i, alpha - inner);
  }
  return std::min(total, 1.0);
}

void Mechanism::BuildPieces() {
  pieces_.clear();
  const double half = 0.5 * spec_.epsilon;
  if (spec_.kind == MechanismKind::kTruncatedLaplace) {
    const double rate = spec_.epsilon / (2.0 * spec_.laplace_delta);
    const double c = table_.center();
    const Range r = table_.range();
    if (c > r.lo) {
      pieces_.push_back({r.lo, c, -rate * (c - r.lo) - log_normalizer_, rate});
    }
    if (r.hi > c) pieces_.push_back({c, r.hi, -log_normalizer_, -rate});
    return;
  }
  for (const Interval& piece : intervals_) {
    const double top = -half * piece.ell - log_normalizer_;
    if (spec_.kind == MechanismKind::kInverseSensitivity) {
      pieces_.push_back({piece.lo, piece.hi, top, 0.0});
      continue;
    }
    const double sloped = piece.SlopedWidth();
    if (piece.sign > 0) {
      if (piece.flat > 0) {
        pieces_.push_back({piece.lo, piece.lo + piece.flat, top, 0.0});
      }
      if (sloped > 0) {
        pieces_.push_back(
            {piece.lo + piece.flat, piece.hi, top, -half / sloped});
      }
    } else {
      if (sloped > 0) {
        pieces_.push_back(
            {piece.lo, piece.hi - piece.flat, top - half, half / sloped});
      }
      if (piece.flat > 0) {
        pieces_.push_back({piece.hi - piece.flat, piece.hi, top, 0.0});
      }
    }
  }
}

absl::StatusOr<std::vector<double>> IntervalProbabilities(
    const EnvelopeTable& table, double eps) {
  if (absl::Status s = ValidateEpsilon(eps); !s.ok()) return s;
  // Log-space weights with the running max subtracted, so large l * eps does
  // not underflow.
  const double factor = SlopedMassFactor(eps);
  const std::vector<Interval> pieces = table.Intervals();
  std::vector<double> log_weight(pieces.size(), kNegInf);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!(pieces[i].width > 0)) continue;
    log_weight[i] = -0.5 * eps * pieces[i].ell +
                    std::log(pieces[i].flat + pieces[i].SlopedWidth() * factor);
  }
  const double log_total = LogSumExp(log_weight);
  if (log_total == kNegInf) {
    return absl::FailedPreconditionError(
        "all interval widths are zero; the table has an empty support");
  }
  std::vector<double> out(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    out[i] = std::exp(log_weight[i] - log_total);
  }
  return out;
}

absl::StatusOr<Interval> SampleInterval(const EnvelopeTable& table, double eps,
                                        double u) {
  if (absl::Status s = ValidateUniform(u); !s.ok()) return s;
  absl::StatusOr<std::vector<double>> probabilities =
      IntervalProbabilities(table, eps);
  if (!probabilities.ok()) return probabilities.status();
  const std::vector<Interval> pieces = table.Intervals();
  double running = 0.0;
  std::optional<std::size_t> last_positive;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if ((*probabilities)[i] <= 0) continue;
    last_positive = i;
    running += (*probabilities)[i];
    if (u < running) return pieces[i];
  }
  return pieces[*last_positive];
}

absl::StatusOr<double> SamplePlmFromUniforms(const EnvelopeTable& table,
                                             double eps, double u_select,
                                             double u_position) {
  if (absl::Status s = ValidateUniform(u_select); !s.ok()) return s;
  if (absl::Status s = ValidateUniform(u_position); !s.ok()) return s;
  absl::StatusOr<Mechanism> mechanism = Mechanism::Create(
      {.kind = MechanismKind::kPiecewiseLaplace, .epsilon = eps}, table);
  if (!mechanism.ok()) return mechanism.status();
  const double u[2] = {u_select, u_position};
  return mechanism->SampleFromUniforms(u);
}

absl::StatusOr<double> SamplePlm(const EnvelopeTable& table, double eps,
                                 RandomStream& stream) {
  const double u_select = stream.NextUniform();
  const double u_position = stream.NextUniform();
  return SamplePlmFromUniforms(table, eps, u_select, u_position);
}

absl::StatusOr<double> SampleInverseSensitivityFromUniforms(
    const EnvelopeTable& table, double eps, double u_select,
    double u_position) {
  if (absl::Status s = ValidateUniform(u_select); !s.ok()) return s;
  if (absl::Status s = ValidateUniform(u_position); !s.ok()) return s;
  absl::StatusOr<Mechanism> mechanism = Mechanism::Create(
      {.kind = MechanismKind::kInverseSensitivity, .epsilon = eps}, table);
  if (!mechanism.ok()) return mechanism.status();
  const double u[2] = {u_select, u_position};
  return mechanism->SampleFromUniforms(u);
}

absl::StatusOr<double> SampleInverseSensitivity(const EnvelopeTable& table,
                                                double eps,
                                                RandomStream& stream) {
  const double u_select = stream.NextUniform();
  const double u_position = stream.NextUniform();
  return SampleInverseSensitivityFromUniforms(table, eps, u_select,
                                              u_position);
}

absl::StatusOr<double> SampleTruncLaplaceFromUniform(double center,
                                                     double delta, double eps,
                                                     Range range, double u) {
  if (!(range.lo < range.hi) || !std::isfinite(range.lo) ||
      !std::isfinite(range.hi)) {
    return absl::InvalidArgumentError("invalid range");
  }
  if (!range.Contains(center)) {
    return absl::InvalidArgumentError("center outside range");
  }
  if (!(delta > 0)) return absl::InvalidArgumentError("delta must be > 0");
  if (absl::Status s = ValidateEpsilon(eps); !s.ok()) return s;
  if (absl::Status s = ValidateUniform(u); !s.ok()) return s;
  const TruncLaplaceLaw law{center, eps / (2.0 * delta), range};
  return std::clamp(law.Quantile(u), range.lo, range.hi);
}

absl::StatusOr<double> SampleTruncLaplace(double center, double delta,
                                          double eps, Range range,
                                          RandomStream& stream) {
  return SampleTruncLaplaceFromUniform(center, delta, eps, range,
                                       stream.NextUniform());
}

double DensityPlm(double y, const EnvelopeTable& table, double eps) {
  if (!(eps > 0)) return 0.0;
  // Closed-form normalizer: each piece integrates to
  // exp(-l eps / 2) * (flat + sloped * (2 / eps) * (1 - exp(-eps / 2))).
  const double factor = SlopedMassFactor(eps);
  std::vector<double> log_terms;
  for (const Interval& piece : table.Intervals()) {
    if (!(piece.width > 0)) continue;
    log_terms.push_back(-0.5 * eps * piece.ell +
                        std::log(piece.flat + piece.SlopedWidth() * factor));
  }
  if (log_terms.empty()) return 0.0;
  const Score score = QPlm(y, table);
  if (!score.InSupport()) return 0.0;
  return std::exp(0.5 * eps * score.value - LogSumExp(log_terms));
}

double DensityInv(double y, const EnvelopeTable& table, double eps) {
  if (!(eps > 0)) return 0.0;
  std::vector<double> log_terms;
  for (const Interval& piece : table.Intervals()) {
    if (!(piece.width > 0)) continue;
    log_terms.push_back(-0.5 * eps * piece.ell + std::log(piece.width));
  }
  if (log_terms.empty()) return 0.0;
  const std::optional<int> index = InverseIndex(y, table);
  if (!index.has_value()) return 0.0;
  const int ell = std::max(*index, 1);
  return std::exp(-0.5 * eps * ell - LogSumExp(log_terms));
}

double DensityTruncLaplace(double y, double center, double delta, double eps,
                           Range range) {
  if (!(delta > 0) || !(eps > 0) || !range.Contains(y) ||
      !range.Contains(center)) {
    return 0.0;
  }
  const TruncLaplaceLaw law{center, eps / (2.0 * delta), range};
  return std::exp(-law.rate * std::abs(y - center) - law.LogNormalizer());
}

}  // namespace plm
