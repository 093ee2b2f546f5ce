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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "plm/approx.h"
#include "plm/envelope.h"
#include "plm/io.h"
#include "plm/mechanisms.h"
#include "plm/scores.h"
#include "plm/suite.h"
#include "plm/verify.h"

#ifndef PLM_CLI_PATH
#error "PLM_CLI_PATH must name the plm_cli binary"
#endif

namespace plm {
namespace {

constexpr double kLogTol = 1e-9;
const std::vector<double> kEpsilons = {0.5, 1.0, 2.0};
const std::vector<int> kSizes = {3, 4, 5};
const Range kRange{0, 10};

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Library errors abort the criterion; main reports them as a failure.
template <typename T>
T Unwrap(absl::StatusOr<T> value) {
  if (!value.ok()) {
    throw std::runtime_error(std::string(value.status().message()));
  }
  return *std::move(value);
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::vector<double> Universe() {
  std::vector<double> u;
  for (int v = 0; v <= 10; ++v) u.push_back(v);
  return u;
}

EnvelopeTable MedianReference() {
  const std::vector<double> data = {1, 2, 3, 4, 5};
  return TrimSaturated(
      *BuildMedianEnvelope(data, kRange, NeighborModel::kSwap, 5));
}

// Runs the neighbor suite for one variant over both functions and all sizes.
struct SuiteTotals {
  double worst_ratio_excess = -1e300;  // max_log_ratio - eps
  double worst_br_excess = -1e300;     // max_br_sum - eps
  bool dp_pass = true;
  bool br_pass = true;
  std::int64_t pairs = 0;
  bool ok = true;
  std::string error;
};

SuiteTotals RunSuite(SuiteVariant variant) {
  SuiteTotals totals;
  SuiteOptions options;
  options.variants = {variant};
  options.epsilons = kEpsilons;
  for (SuiteFunction fn :
       {SuiteFunction::kMedian, SuiteFunction::kClippedSum}) {
    for (int size : kSizes) {
      absl::StatusOr<NeighborAtlas> atlas =
          BuildNeighborAtlas(fn, size, Universe(), kRange);
      if (!atlas.ok()) {
        totals.ok = false;
        totals.error = std::string(atlas.status().message());
        return totals;
      }
      absl::StatusOr<std::vector<SuiteCheck>> checks =
          VerifyNeighborSuite(*atlas, options);
      if (!checks.ok()) {
        totals.ok = false;
        totals.error = std::string(checks.status().message());
        return totals;
      }
      for (const SuiteCheck& c : *checks) {
        totals.worst_ratio_excess =
            std::max(totals.worst_ratio_excess, c.max_log_ratio - c.epsilon);
        totals.worst_br_excess =
            std::max(totals.worst_br_excess, c.max_br_sum - c.epsilon);
        totals.dp_pass = totals.dp_pass && c.dp_pass;
        totals.br_pass = totals.br_pass && c.br_pass;
        totals.pairs += c.pairs;
      }
    }
  }
  return totals;
}

// Criteria 1 and 2 share one suite run.
SuiteTotals g_plm_suite;
double g_plm_suite_seconds = 0.0;

Outcome Criterion1() {
  const auto start = std::chrono::steady_clock::now();
  g_plm_suite = RunSuite(SuiteVariant::kPiecewiseLaplace);
  g_plm_suite_seconds = Seconds(start);
  Outcome out;
  if (!g_plm_suite.ok) return {false, g_plm_suite.error};
  out.pass = g_plm_suite.dp_pass && g_plm_suite_seconds <= 60.0;
  out.detail = absl::StrFormat(
      "%d pair-checks, max(ratio - eps) = %.3g (tol %.0e), %.2f s (limit 60 s)",
      g_plm_suite.pairs, g_plm_suite.worst_ratio_excess, kLogTol,
      g_plm_suite_seconds);
  return out;
}

Outcome Criterion2() {
  Outcome out;
  if (!g_plm_suite.ok) return {false, g_plm_suite.error};
  out.pass = g_plm_suite.br_pass;
  // Equal-marginal tables one sensitivity apart; both range ends sit a whole
  // number of steps from each center.
  const Range range{-44.5, 55.5};
  const EnvelopeTable a = Unwrap(
      BuildBoundedSumEnvelope(5, 1, range, NeighborModel::kSwap, 60));
  const EnvelopeTable b = Unwrap(
      BuildBoundedSumEnvelope(6, 1, range, NeighborModel::kSwap, 60));
  double worst = 0.0;
  for (double eps : kEpsilons) {
    const Mechanism ma = Unwrap(Mechanism::Create({.epsilon = eps}, a));
    const Mechanism mb = Unwrap(Mechanism::Create({.epsilon = eps}, b));
    const LogRatioSups s = SupLogRatios(ma, mb);
    worst = std::max({worst, std::abs(s.forward - eps / 2),
                      std::abs(s.backward - eps / 2)});
  }
  out.pass = out.pass && worst <= 1e-6;
  out.detail = absl::StrFormat(
      "suite max(br_sum - eps) = %.3g; symmetric pair |sup - eps/2| <= %.3g "
      "(tol 1e-6)",
      g_plm_suite.worst_br_excess, worst);
  return out;
}

// Max |p_plm - p_tlap| over 10^4 points for an equal-marginal table.
double LaplaceGap(const EnvelopeTable& table, double center, double delta,
                  double eps) {
  const Range r = table.range();
  double gap = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double y = r.lo + r.Length() * (k + 0.5) / 10000;
    const double tlap = DensityTruncLaplace(y, center, delta, eps, r);
    gap = std::max(gap, std::abs(DensityPlm(y, table, eps) - tlap));
  }
  return gap;
}

Outcome Criterion3() {
  Outcome out;
  double gap = 0.0;
  for (double delta : {0.5, 1.0, 2.0}) {
    const Range range{5 - 30 * delta, 5 + 25 * delta};
    const EnvelopeTable t = Unwrap(
        BuildBoundedSumEnvelope(5, delta, range, NeighborModel::kSwap, 40));
    for (double eps : kEpsilons) {
      gap = std::max(gap, LaplaceGap(t, 5, delta, eps));
    }
  }
  out.pass = gap <= 1e-12;
  out.detail = absl::StrFormat(
      "max |p_plm - p_tlap| = %.3g over 10^4 points x 9 (delta, eps) "
      "(tol 1e-12)",
      gap);
  return out;
}

Outcome Criterion4() {
  Outcome out;
  const EnvelopeTable table = MedianReference();
  const double eps = 2.0;
  const double reach = std::max(table.range().hi - table.center(),
                                table.center() - table.range().lo);
  std::vector<double> alphas;
  for (int k = 0; k < 1000; ++k) alphas.push_back(reach * k / 999);
  const std::vector<double> margins =
      Unwrap(DominanceMargins(table, eps, alphas));
  const std::vector<double> half = {0.5};
  const double at_half = Unwrap(DominanceMargins(table, eps, half))[0];

  double min_margin = 1e300;
  double min_interior = 1e300;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    min_margin = std::min(min_margin, margins[i]);
    for (const Interval& piece : table.Intervals()) {
      if (piece.width < 0.5) continue;
      const double inner = std::abs(piece.InnerEndpoint() - table.center());
      if (alphas[i] > inner && alphas[i] < inner + piece.width) {
        min_interior = std::min(min_interior, margins[i]);
        break;
      }
    }
  }
  out.pass = min_margin >= -kDominanceTolerance &&
             std::abs(at_half - 0.06903) <= 1e-5 && min_interior >= 1e-4;
  out.detail = absl::StrFormat(
      "min margin %.3g over 10^3 alphas, margin(0.5) = %.5f (0.06903 +- 1e-5), "
      "min interior margin %.3g (>= 1e-4)",
      min_margin, at_half, min_interior);
  return out;
}

Outcome Criterion5() {
  Outcome out;
  const EnvelopeTable table = MedianReference();
  std::string parts;
  for (MechanismKind kind :
       {MechanismKind::kPiecewiseLaplace, MechanismKind::kInverseSensitivity,
        MechanismKind::kTruncatedLaplace}) {
    const Mechanism m = Unwrap(
        Mechanism::Create({.kind = kind, .epsilon = 2, .laplace_delta = 1},
                          table));
    const auto start = std::chrono::steady_clock::now();
    const VerificationReport r =
        Unwrap(GofMechanism(m, m, 1'000'000, 200, 20260101));
    const double seconds = Seconds(start);
    out.pass = out.pass && r.gof_p_value >= 1e-4 && seconds <= 30.0;
    absl::StrAppend(&parts, parts.empty() ? "" : "; ",
                    absl::StrFormat("%s p = %.4f (%.2f s)",
                                    std::string(MechanismName(kind)),
                                    r.gof_p_value, seconds));
  }
  out.detail = absl::StrCat("10^6 samples, 200 bins: ", parts,
                            " (p >= 1e-4, <= 30 s each)");
  return out;
}

Outcome Criterion6() {
  Outcome out;
  const std::vector<OracleReport> reports =
      Unwrap(VerifyOracleAgreement(kSizes, kRange));
  std::int64_t instances = 0;
  std::int64_t mismatches = 0;
  for (const OracleReport& r : reports) {
    instances += r.instances;
    mismatches += r.mismatches;
  }
  out.pass = out.pass && mismatches == 0 && instances > 0;
  out.detail = absl::StrFormat(
      "%d of %d analytic envelopes differ from enumeration (median n=3..5 "
      "swap; bounded sum n=3..5 add/remove)",
      mismatches, instances);
  return out;
}

Outcome Criterion7() {
  Outcome out;
  std::vector<double> y_grid;
  for (int k = 0; k <= 1000; ++k) y_grid.push_back(kRange.Length() * k / 1000);
  double gap = 0.0;
  for (SuiteFunction fn :
       {SuiteFunction::kMedian, SuiteFunction::kClippedSum}) {
    for (int size : kSizes) {
      const NeighborAtlas atlas =
          Unwrap(BuildNeighborAtlas(fn, size, Universe(), kRange));
      gap = std::max(gap, Unwrap(MaxApproxScoreGap(atlas, y_grid)));
    }
  }
  const SuiteTotals approx = RunSuite(SuiteVariant::kApproximate);
  if (!approx.ok) return {false, approx.error};

  // A constant schedule is the Laplace case.
  double laplace_gap = 0.0;
  const double delta = 1.0;
  const Range range{-50, 60};
  const EnvelopeTable constant = Unwrap(
      ScheduleToEnvelope(5, Unwrap(ScheduleAffine(delta, 0, 60)), range));
  for (double eps : kEpsilons) {
    laplace_gap = std::max(laplace_gap, LaplaceGap(constant, 5, delta, eps));
  }
  out.pass = gap <= 1 + 1e-12 && approx.dp_pass && laplace_gap <= 1e-12;
  out.detail = absl::StrFormat(
      "q~ sensitivity %.15g (<= 1 + 1e-12); approx suite max(ratio - eps) = "
      "%.3g; constant schedule |p - p_tlap| = %.3g",
      gap, approx.worst_ratio_excess, laplace_gap);
  return out;
}

Outcome Criterion8() {
  double min_gap = 1e300;
  double min_mid = 1e300;
  for (double delta : {0.5, 1.0, 2.0}) {
    for (double eps : {0.5, 1.0, 2.0}) {
      for (int k = 0; k < 10000; ++k) {
        const double y = delta * k / 9999;
        min_gap = std::min(min_gap, TruncExpoCdf(y, delta, eps) - y / delta);
      }
      min_mid = std::min(min_mid,
                         TruncExpoCdf(delta / 2, delta, eps) - 0.5);
    }
  }
  Outcome out;
  out.pass = min_gap >= 0 && min_mid >= 1e-6;
  out.detail = absl::StrFormat(
      "min CDF - uniform %.3g over 10^4 points x 9 (delta, eps); at delta/2 "
      "%.4g (>= 1e-6)",
      min_gap, min_mid);
  return out;
}

int RunCli(const std::string& args) {
  const std::string command =
      absl::StrCat("\"", PLM_CLI_PATH, "\" ", args, " >/dev/null 2>&1");
  const int status = std::system(command.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

Outcome Criterion9() {
  Outcome out;
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() /
      absl::StrCat("plm_acceptance_", getpid());
  std::filesystem::create_directories(dir);

  // x = (1, 2, 3, 4, 5) and its neighbor (1, 2, 3, 4, 10) on [0, 10].
  const EnvelopeTable x = MedianReference();
  const std::vector<double> neighbor_data = {1, 2, 3, 4, 10};
  const EnvelopeTable neighbor = TrimSaturated(Unwrap(
      BuildMedianEnvelope(neighbor_data, kRange, NeighborModel::kSwap, 5)));
  // x's upper envelope deflated below what its neighbor reaches.
  const EnvelopeTable corrupted = Unwrap(
      EnvelopeTable::Create(3, {3, 3, 3, 3, 10}, {3, 2, 1, 0, 0}, kRange));
  const std::string x_path = (dir / "x.json").string();
  const std::string nb_path = (dir / "neighbor.json").string();
  const std::string bad_path = (dir / "corrupted.csv").string();
  for (const auto& [path, text] :
       {std::pair{x_path, EnvelopeToJson(x).dump()},
        std::pair{nb_path, EnvelopeToJson(neighbor).dump()},
        std::pair{bad_path, EnvelopeToCsv(corrupted)}}) {
    if (!WriteFile(path, text).ok()) return {false, "cannot write tables"};
  }

  struct Case {
    std::string label;
    std::string args;
    int expected;
  };
  const std::string true_pair =
      absl::StrCat("verify --tables ", x_path, " ", nb_path, " --eps 2");
  const std::string bad_pair =
      absl::StrCat("verify --tables ", bad_path, " ", nb_path, " --eps 2");
  const std::vector<Case> cases = {
      {"dp-median eps 2", "verify --suite dp-median --eps 2", 0},
      {"dp-median eps 1.8 vs 2",
       "verify --suite dp-median --eps 1.8 --mech-eps 2", 1},
      {"dp-median eps 1.79 vs 2",
       "verify --suite dp-median --eps 1.79 --mech-eps 2", 1},
      {"dp-sum eps 0.9 vs 1", "verify --suite dp-sum --eps 0.9 --mech-eps 1",
       1},
      {"true pair", true_pair, 0},
      {"corrupted pair", bad_pair, 1},
      {"usage error", "verify --suite no-such-suite", 2},
  };
  std::string parts;
  for (const Case& c : cases) {
    const int code = RunCli(c.args);
    out.pass = out.pass && code == c.expected;
    absl::StrAppend(&parts, parts.empty() ? "" : ", ",
                    absl::StrFormat("%s -> %d", c.label, code));
  }
  std::filesystem::remove_all(dir);
  out.detail = absl::StrCat("exit codes: ", parts);
  return out;
}

}  // namespace
}  // namespace plm

int main() {
  using Check = plm::Outcome (*)();
  const Check checks[] = {plm::Criterion1, plm::Criterion2, plm::Criterion3,
                          plm::Criterion4, plm::Criterion5, plm::Criterion6,
                          plm::Criterion7, plm::Criterion8, plm::Criterion9};
  int failures = 0;
  for (int i = 0; i < 9; ++i) {
    plm::Outcome o;
    try {
      o = checks[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("[%s] criterion %d: %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of 9 criteria pass\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
