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

#ifndef PLM_MECHANISMS_H_
#define PLM_MECHANISMS_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "plm/envelope.h"
#include "plm/random.h"

namespace plm {

enum class MechanismKind {
  kPiecewiseLaplace,
  kInverseSensitivity,
  kTruncatedLaplace,
};

// "plm", "inv", "tlap".
std::string_view MechanismName(MechanismKind kind);
absl::StatusOr<MechanismKind> ParseMechanismKind(std::string_view name);

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kPiecewiseLaplace;
  // Total pure-DP budget. The exponent uses epsilon / 2 internally.
  double epsilon = 1.0;
  double rho_smooth = 0.0;
  std::uint64_t seed = 0;
  // Sensitivity of the truncated Laplace baseline; unused by the others.
  double laplace_delta = 0.0;
};

// Inverse CDF of the truncated exponential with density proportional to
// (eps / delta) exp(-z eps / delta) on [0, delta].
absl::StatusOr<double> SampleTruncExpo(double delta, double eps, double u);

// P(Z <= z) for the same law.
double TruncExpoCdf(double z, double delta, double eps);

// Selection probability of every piece of table.Intervals(), in that order:
// exp(-l eps / 2) * width, normalized. Zero-width pieces get probability 0.
absl::StatusOr<std::vector<double>> IntervalProbabilities(
    const EnvelopeTable& table, double eps);

// Picks a signed piece by inverting the cumulative weights at u in [0, 1).
absl::StatusOr<Interval> SampleInterval(const EnvelopeTable& table, double eps,
                                        double u);

// Two-step sampler: u_select picks the piece, u_position the offset inside it
// (truncated exponential with rate eps / 2 over the piece width).
absl::StatusOr<double> SamplePlmFromUniforms(const EnvelopeTable& table,
                                             double eps, double u_select,
                                             double u_position);
absl::StatusOr<double> SamplePlm(const EnvelopeTable& table, double eps,
                                 RandomStream& stream);

// Same piece selection, uniform position.
absl::StatusOr<double> SampleInverseSensitivityFromUniforms(
    const EnvelopeTable& table, double eps, double u_select, double u_position);
absl::StatusOr<double> SampleInverseSensitivity(const EnvelopeTable& table,
                                                double eps,
                                                RandomStream& stream);

// Density proportional to exp(-|y - center| eps / (2 delta)) on range.
absl::StatusOr<double> SampleTruncLaplaceFromUniform(double center,
                                                     double delta, double eps,
                                                     Range range, double u);
absl::StatusOr<double> SampleTruncLaplace(double center, double delta,
                                          double eps, Range range,
                                          RandomStream& stream);

// Normalized densities. Zero outside the support, and zero everywhere for a
// table without a positive-width piece.
double DensityPlm(double y, const EnvelopeTable& table, double eps);
double DensityInv(double y, const EnvelopeTable& table, double eps);
double DensityTruncLaplace(double y, double center, double delta, double eps,
                           Range range);

// Piece of a density whose logarithm is affine: on [a, b],
// log p(y) = log_at_a + slope * (y - a).
struct LogLinearPiece {
  double a = 0.0;
  double b = 0.0;
  double log_at_a = 0.0;
  double slope = 0.0;

  double LogDensity(double y) const { return log_at_a + slope * (y - a); }
};

// A mechanism bound to one dataset's table with cached normalizers. All three
// output laws are piecewise log-linear, which the verification harness uses
// to evaluate log-ratios exactly between breakpoints.
class Mechanism {
 public:
  // For kTruncatedLaplace the table supplies center and range and
  // spec.laplace_delta must be positive. spec.rho_smooth > 0 smooths the table
  // first.
  static absl::StatusOr<Mechanism> Create(const MechanismSpec& spec,
                                          const EnvelopeTable& table);

  const MechanismSpec& spec() const { return spec_; }
  const EnvelopeTable& table() const { return table_; }
  Range Support() const;

  // Uniform draws consumed per sample: 2 for the interval samplers, 1 for
  // truncated Laplace.
  int DrawsPerSample() const;

  double Sample(RandomStream& stream) const;
  double SampleFromUniforms(std::span<const double> u) const;

  double LogDensity(double y) const;
  double Density(double y) const;
  double Cdf(double y) const;
  // P(|Y - center| <= alpha).
  double MassWithin(double alpha) const;

  // Pieces cover the support in increasing order.
  const std::vector<LogLinearPiece>& Pieces() const { return pieces_; }

 private:
  Mechanism(MechanismSpec spec, EnvelopeTable table)
      : spec_(spec), table_(std::move(table)) {}

  // Unnormalized mass within offset t of the inner endpoint of piece i.
  double PieceMassWithin(std::size_t i, double t) const;
  double PositionInPiece(std::size_t i, double u) const;
  void BuildPieces();

  MechanismSpec spec_;
  EnvelopeTable table_;
  // Positive-width pieces only (interval samplers).
  std::vector<Interval> intervals_;
  std::vector<double> log_weight_;   // unnormalized log mass per piece
  std::vector<double> cumulative_;   // normalized, cumulative_.back() == 1
  double log_normalizer_ = 0.0;
  std::vector<LogLinearPiece> pieces_;
};

}  // namespace plm

#endif  // PLM_MECHANISMS_H_
