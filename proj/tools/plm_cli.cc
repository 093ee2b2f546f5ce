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

// Command-line front end for the piecewise Laplace library.
//
//   plm_cli envelope --function median --data d.csv --range 0 10 --out t.json
//   plm_cli sample   --function median --data d.csv --range 0 10 --mech plm \
//                    --eps 2 --seed 7 --n 1000
//   plm_cli verify   --suite dp-median --eps 2
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "json.hpp"
#include "plm/approx.h"
#include "plm/envelope.h"
#include "plm/io.h"
#include "plm/kernels.h"
#include "plm/mechanisms.h"
#include "plm/scores.h"
#include "plm/suite.h"
#include "plm/verify.h"

namespace plm {
namespace {

using json = nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string function = "median";
  std::string data_path;
  std::vector<double> range;
  std::string model = "swap";
  int max_distance = 0;
  std::string mechanism = "plm";
  double epsilon = 1.0;
  std::optional<double> mech_epsilon;
  double rho = 0.0;
  int k_trunc = 0;
  std::string schedule_path;
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  int bins = 200;
  std::string output_path;
  std::string format;
  double bound = 1.0;
  std::optional<double> delta;
  std::vector<double> grid;
  std::vector<double> ys;
  std::vector<double> alphas;
  std::string suite;
  std::vector<std::string> tables;
  std::vector<int> sizes = {3, 4, 5};
  std::vector<std::string> variants;
  bool eps_given = false;
};

absl::Status Usage(std::string_view message) {
  return absl::InvalidArgumentError(std::string(message));
}

absl::StatusOr<std::string> ReadInput(const std::string& path) {
  if (path.empty()) return Usage("--data is required");
  return ReadFile(path);
}

absl::Status WriteOutput(const RunConfig& c, const std::string& text) {
  if (c.output_path.empty()) {
    std::cout << text;
    return absl::OkStatus();
  }
  return WriteFile(c.output_path, text);
}

absl::StatusOr<Range> ConfigRange(const RunConfig& c) {
  if (c.range.empty()) return Usage("--range lo hi is required");
  const Range range{c.range[0], c.range[1]};
  if (!(range.lo < range.hi)) return Usage("--range needs lo < hi");
  return range;
}

absl::StatusOr<EnvelopeTable> LoadTableFile(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  const std::size_t first = text->find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (*text)[first] == '{') {
    const json j = json::parse(*text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ": invalid JSON"));
    }
    return EnvelopeFromJson(j);
  }
  return EnvelopeFromCsv(*text);
}

absl::StatusOr<RadiusSchedule> LoadSchedule(const RunConfig& c,
                                            double global_delta) {
  absl::StatusOr<std::string> text = ReadFile(c.schedule_path);
  if (!text.ok()) return text.status();
  const json j = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return Usage("--schedule: invalid JSON");
  absl::StatusOr<RadiusSchedule> schedule = ScheduleFromJson(j);
  if (!schedule.ok() || c.k_trunc <= 0) return schedule;
  return ScheduleTruncateGlobal(*schedule, c.k_trunc, global_delta);
}

// Table for the configured function. With --schedule the radii replace the
// envelope around the same center.
absl::StatusOr<EnvelopeTable> BuildTable(const RunConfig& c) {
  absl::StatusOr<EnvelopeTable> table;
  if (c.function == "custom_table") {
    if (c.data_path.empty()) return Usage("--data is required");
    table = LoadTableFile(c.data_path);
  } else {
    absl::StatusOr<Range> range = ConfigRange(c);
    if (!range.ok()) return range.status();
    absl::StatusOr<NeighborModel> model = ParseNeighborModel(c.model);
    if (!model.ok()) return model.status();
    absl::StatusOr<std::string> text = ReadInput(c.data_path);
    if (!text.ok()) return text.status();
    absl::StatusOr<std::vector<double>> data = ParseRealList(*text);
    if (!data.ok()) return data.status();
    if (data->empty()) return Usage("data file has no records");
    if (c.function == "median") {
      const int distance = c.max_distance > 0
                               ? c.max_distance
                               : static_cast<int>(data->size());
      table = BuildMedianEnvelope(*data, *range, *model, distance);
    } else {
      if (!(c.bound > 0)) return Usage("--bound must be positive");
      const double sum = std::accumulate(data->begin(), data->end(), 0.0);
      const int distance =
          c.max_distance > 0
              ? c.max_distance
              : static_cast<int>(std::ceil(range->Length() / c.bound)) + 1;
      table = BuildBoundedSumEnvelope(std::clamp(sum, range->lo, range->hi),
                                      c.bound, *range, *model, distance);
    }
    if (table.ok()) table = TrimSaturated(*table);
  }
  if (!table.ok() || c.schedule_path.empty()) return table;
  absl::StatusOr<RadiusSchedule> schedule =
      LoadSchedule(c, c.delta.value_or(table->range().Length()));
  if (!schedule.ok()) return schedule.status();
  return ScheduleToEnvelope(table->center(), *schedule, table->range());
}

double LaplaceDelta(const RunConfig& c, const EnvelopeTable& table) {
  if (c.delta.has_value()) return *c.delta;
  return c.function == "bounded_sum" ? c.bound : table.range().Length();
}

absl::StatusOr<Mechanism> BuildMechanism(const RunConfig& c,
                                         const EnvelopeTable& table,
                                         MechanismKind kind) {
  return Mechanism::Create({.kind = kind,
                            .epsilon = c.mech_epsilon.value_or(c.epsilon),
                            .rho_smooth = c.rho,
                            .seed = c.seed,
                            .laplace_delta = LaplaceDelta(c, table)},
                           table);
}

absl::StatusOr<Mechanism> BuildMechanism(const RunConfig& c,
                                         const EnvelopeTable& table) {
  absl::StatusOr<MechanismKind> kind = ParseMechanismKind(c.mechanism);
  if (!kind.ok()) return kind.status();
  return BuildMechanism(c, table, *kind);
}

// ---------------------------------------------------------------------------
// envelope / sample / density / score / compare

absl::StatusOr<int> CmdEnvelope(const RunConfig& c) {
  absl::StatusOr<EnvelopeTable> table = BuildTable(c);
  if (!table.ok()) return table.status();
  const bool csv = c.format == "csv" ||
                   (c.format.empty() && c.output_path.ends_with(".csv"));
  const std::string text =
      csv ? EnvelopeToCsv(*table) : EnvelopeToJson(*table).dump(2) + "\n";
  absl::Status written = WriteOutput(c, text);
  if (!written.ok()) return written;
  return kExitPass;
}

absl::StatusOr<int> CmdSample(const RunConfig& c) {
  const std::int64_t n = c.n > 0 ? c.n : 1000;
  absl::StatusOr<EnvelopeTable> table = BuildTable(c);
  if (!table.ok()) return table.status();
  absl::StatusOr<Mechanism> mech = BuildMechanism(c, *table);
  if (!mech.ok()) return mech.status();
  const std::vector<double> samples = SampleBatch(*mech, n, c.seed);
  absl::Status written = WriteOutput(
      c, SamplesToCsv(samples, mech->spec().kind, mech->spec().epsilon,
                      c.seed));
  if (!written.ok()) return written;
  return kExitPass;
}

absl::StatusOr<std::vector<double>> EvaluationPoints(const RunConfig& c) {
  if (!c.ys.empty()) return c.ys;
  if (c.grid.empty()) return Usage("give --grid lo hi n or --y values");
  const double lo = c.grid[0];
  const double hi = c.grid[1];
  const double count = c.grid[2];
  if (!(count >= 2) || count != std::floor(count) || !(lo < hi)) {
    return Usage("--grid needs lo < hi and an integer n >= 2");
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return out;
}

absl::StatusOr<int> CmdDensity(const RunConfig& c) {
  absl::StatusOr<EnvelopeTable> table = BuildTable(c);
  if (!table.ok()) return table.status();
  absl::StatusOr<Mechanism> mech = BuildMechanism(c, *table);
  if (!mech.ok()) return mech.status();
  absl::StatusOr<std::vector<double>> ys = EvaluationPoints(c);
  if (!ys.ok()) return ys.status();
  absl::Status written =
      WriteOutput(c, DensityToCsv(*ys, DensityGrid(*mech, *ys)));
  if (!written.ok()) return written;
  return kExitPass;
}

json ScoreJson(const Score& s) {
  return s.InSupport() ? json(s.value) : json(nullptr);
}

absl::StatusOr<int> CmdScore(const RunConfig& c) {
  if (c.ys.empty()) return Usage("--y is required");
  absl::StatusOr<EnvelopeTable> table = BuildTable(c);
  if (!table.ok()) return table.status();
  std::optional<RadiusSchedule> schedule;
  if (!c.schedule_path.empty()) {
    absl::StatusOr<RadiusSchedule> s =
        LoadSchedule(c, c.delta.value_or(table->range().Length()));
    if (!s.ok()) return s.status();
    schedule = *std::move(s);
  }
  json rows = json::array();
  for (double y : c.ys) {
    json row{{"y", y}, {"q_plm", ScoreJson(QPlm(y, *table))}};
    const std::optional<int> ell = InverseIndex(y, *table);
    row["inverse_index"] = ell.has_value() ? json(*ell) : json(nullptr);
    if (schedule.has_value()) {
      row["q_approx"] =
          ScoreJson(QApprox(std::abs(y - table->center()), *schedule));
    }
    rows.push_back(row);
  }
  absl::Status written = WriteOutput(c, rows.dump(2) + "\n");
  if (!written.ok()) return written;
  return kExitPass;
}

absl::StatusOr<int> CmdCompare(const RunConfig& c) {
  absl::StatusOr<EnvelopeTable> table = BuildTable(c);
  if (!table.ok()) return table.status();
  const std::vector<double> alphas =
      c.alphas.empty() ? std::vector<double>{0.5, 1.0, 2.0} : c.alphas;
  const std::int64_t n = c.n > 0 ? c.n : 100000;
  json out{{"center", table->center()}, {"mechanisms", json::array()}};
  for (MechanismKind kind :
       {MechanismKind::kPiecewiseLaplace, MechanismKind::kInverseSensitivity,
        MechanismKind::kTruncatedLaplace}) {
    absl::StatusOr<Mechanism> mech = BuildMechanism(c, *table, kind);
    if (!mech.ok()) return mech.status();
    json mass = json::array();
    for (double a : alphas) {
      mass.push_back({{"alpha", a}, {"mass", mech->MassWithin(a)}});
    }
    const std::vector<double> samples = SampleBatch(*mech, n, c.seed);
    double abs_error = 0.0;
    for (double y : samples) abs_error += std::abs(y - table->center());
    out["mechanisms"].push_back(
        {{"mechanism", std::string(MechanismName(kind))},
         {"mass_within", mass},
         {"mean_abs_error", abs_error / static_cast<double>(n)},
         {"samples", n}});
  }
  absl::Status written = WriteOutput(c, out.dump(2) + "\n");
  if (!written.ok()) return written;
  return kExitPass;
}

// ---------------------------------------------------------------------------
// verify

struct NamedCheck {
  std::string name;
  bool pass = false;
  std::string summary;
  json report;
};

std::vector<double> Integers(Range range) {
  std::vector<double> out;
  for (double v = std::ceil(range.lo); v <= range.hi; v += 1) out.push_back(v);
  return out;
}

Range SuiteRange(const RunConfig& c) {
  return c.range.empty() ? Range{0, 10} : Range{c.range[0], c.range[1]};
}

absl::StatusOr<std::vector<SuiteVariant>> Variants(
    const RunConfig& c, std::vector<SuiteVariant> fallback) {
  if (c.variants.empty()) return fallback;
  std::vector<SuiteVariant> out;
  for (const std::string& name : c.variants) {
    bool found = false;
    for (SuiteVariant v :
         {SuiteVariant::kPiecewiseLaplace, SuiteVariant::kInverseSensitivity,
          SuiteVariant::kTruncatedLaplace, SuiteVariant::kApproximate}) {
      if (SuiteVariantName(v) == name) {
        out.push_back(v);
        found = true;
      }
    }
    if (!found) return Usage(absl::StrCat("unknown variant '", name, "'"));
  }
  return out;
}

// Mechanism epsilons and the claimed budget as a multiple of them.
void SuiteBudget(const RunConfig& c, SuiteOptions& options) {
  if (!c.eps_given && !c.mech_epsilon.has_value()) return;
  const double mech = c.mech_epsilon.value_or(c.epsilon);
  options.epsilons = {mech};
  options.claimed_scale = c.eps_given ? c.epsilon / mech : 1.0;
}

absl::Status RunNeighborSuite(const RunConfig& c, SuiteFunction function,
                              std::vector<SuiteVariant> fallback,
                              std::vector<NamedCheck>& out) {
  SuiteOptions options;
  absl::StatusOr<std::vector<SuiteVariant>> variants = Variants(c, fallback);
  if (!variants.ok()) return variants.status();
  options.variants = *variants;
  SuiteBudget(c, options);
  const Range range = SuiteRange(c);
  const std::vector<double> universe = Integers(range);
  for (int size : c.sizes) {
    absl::StatusOr<NeighborAtlas> atlas =
        BuildNeighborAtlas(function, size, universe, range);
    if (!atlas.ok()) return atlas.status();
    absl::StatusOr<std::vector<SuiteCheck>> checks =
        VerifyNeighborSuite(*atlas, options);
    if (!checks.ok()) return checks.status();
    for (const SuiteCheck& s : *checks) {
      const std::string base = absl::StrFormat(
          "%s n=%d %s eps=%g", std::string(SuiteFunctionName(function)), size,
          std::string(SuiteVariantName(s.variant)), s.epsilon);
      const json report = SuiteCheckToJson(s);
      out.push_back({absl::StrCat("dp ", base), s.dp_pass,
                     absl::StrFormat("max log ratio %.9f vs %.9g",
                                     s.max_log_ratio, s.claimed_epsilon),
                     report});
      out.push_back({absl::StrCat("br ", base), s.br_pass,
                     absl::StrFormat("max br sum %.9f vs %.9g", s.max_br_sum,
                                     s.claimed_epsilon),
                     report});
    }
  }
  return absl::OkStatus();
}

absl::Status RunApproxSuite(const RunConfig& c, std::vector<NamedCheck>& out) {
  for (SuiteFunction fn :
       {SuiteFunction::kMedian, SuiteFunction::kClippedSum}) {
    absl::Status s =
        RunNeighborSuite(c, fn, {SuiteVariant::kApproximate}, out);
    if (!s.ok()) return s;
    const Range range = SuiteRange(c);
    std::vector<double> y_grid;
    for (int k = 0; k <= 1000; ++k) {
      y_grid.push_back(range.lo + range.Length() * k / 1000);
    }
    for (int size : c.sizes) {
      absl::StatusOr<NeighborAtlas> atlas =
          BuildNeighborAtlas(fn, size, Integers(range), range);
      if (!atlas.ok()) return atlas.status();
      absl::StatusOr<double> gap = MaxApproxScoreGap(*atlas, y_grid);
      if (!gap.ok()) return gap.status();
      out.push_back(
          {absl::StrFormat("q_approx sensitivity %s n=%d",
                           std::string(SuiteFunctionName(fn)), size),
           *gap <= 1 + 1e-12, absl::StrFormat("max gap %.12g", *gap),
           json{{"max_gap", *gap}}});
    }
  }
  return absl::OkStatus();
}

// The reference median table: data (1..5) on [0, 10] unless --data is given.
absl::StatusOr<EnvelopeTable> SuiteMedianTable(const RunConfig& c) {
  if (!c.data_path.empty()) return BuildTable(c);
  const std::vector<double> data = {1, 2, 3, 4, 5};
  absl::StatusOr<EnvelopeTable> t =
      BuildMedianEnvelope(data, SuiteRange(c), NeighborModel::kSwap, 5);
  if (!t.ok()) return t;
  return TrimSaturated(*t);
}

double SuiteEpsilon(const RunConfig& c) {
  return c.eps_given ? c.epsilon : c.mech_epsilon.value_or(2.0);
}

absl::Status RunDominance(const RunConfig& c, std::vector<NamedCheck>& out) {
  absl::StatusOr<EnvelopeTable> table = SuiteMedianTable(c);
  if (!table.ok()) return table.status();
  const double reach = std::max(table->range().hi - table->center(),
                                table->center() - table->range().lo);
  std::vector<double> alphas = c.alphas;
  if (alphas.empty()) {
    for (int k = 0; k < 1000; ++k) alphas.push_back(reach * k / 999);
  }
  const double eps = SuiteEpsilon(c);
  absl::StatusOr<VerificationReport> r = VerifyDominance(*table, eps, alphas);
  if (!r.ok()) return r.status();
  out.push_back({absl::StrFormat("dominance median eps=%g", eps),
                 r->pass && r->dominance_interior_margin > 0, r->detail,
                 ReportToJson(*r)});
  return absl::OkStatus();
}

absl::Status RunGof(const RunConfig& c, std::vector<NamedCheck>& out) {
  absl::StatusOr<EnvelopeTable> table = SuiteMedianTable(c);
  if (!table.ok()) return table.status();
  const std::int64_t n = c.n > 0 ? c.n : 1'000'000;
  RunConfig mc = c;
  mc.mech_epsilon = SuiteEpsilon(c);
  for (MechanismKind kind :
       {MechanismKind::kPiecewiseLaplace, MechanismKind::kInverseSensitivity,
        MechanismKind::kTruncatedLaplace}) {
    absl::StatusOr<Mechanism> mech = BuildMechanism(mc, *table, kind);
    if (!mech.ok()) return mech.status();
    absl::StatusOr<VerificationReport> r =
        GofMechanism(*mech, *mech, n, c.bins, c.seed);
    if (!r.ok()) return r.status();
    out.push_back({absl::StrFormat("gof median %s eps=%g",
                                   std::string(MechanismName(kind)),
                                   *mc.mech_epsilon),
                   r->pass, r->detail, ReportToJson(*r)});
  }
  return absl::OkStatus();
}

absl::Status RunOracle(const RunConfig& c, std::vector<NamedCheck>& out) {
  absl::StatusOr<std::vector<OracleReport>> reports =
      VerifyOracleAgreement(c.sizes, SuiteRange(c));
  if (!reports.ok()) return reports.status();
  for (const OracleReport& r : *reports) {
    out.push_back({absl::StrCat("oracle ", r.name), r.mismatches == 0,
                   absl::StrFormat("%d of %d instances differ", r.mismatches,
                                   r.instances),
                   json{{"instances", r.instances},
                        {"mismatches", r.mismatches}}});
  }
  return absl::OkStatus();
}

absl::Status RunTablePair(const RunConfig& c, std::vector<NamedCheck>& out) {
  absl::StatusOr<EnvelopeTable> a = LoadTableFile(c.tables[0]);
  if (!a.ok()) return a.status();
  absl::StatusOr<EnvelopeTable> b = LoadTableFile(c.tables[1]);
  if (!b.ok()) return b.status();
  absl::StatusOr<Mechanism> ma = BuildMechanism(c, *a);
  if (!ma.ok()) return ma.status();
  absl::StatusOr<Mechanism> mb = BuildMechanism(c, *b);
  if (!mb.ok()) return mb.status();
  absl::StatusOr<VerificationReport> dp = VerifyDp(*ma, *mb, c.epsilon);
  if (!dp.ok()) return dp.status();
  absl::StatusOr<VerificationReport> br =
      VerifyBoundedRange(*ma, *mb, c.epsilon);
  if (!br.ok()) return br.status();
  out.push_back({"dp tables", dp->pass,
                 absl::StrFormat("max log ratio %.9f vs %.9g",
                                 dp->max_log_ratio, c.epsilon),
                 ReportToJson(*dp)});
  out.push_back({"br tables", br->pass,
                 absl::StrFormat("br sum %.9f vs %.9g", br->br_sum, c.epsilon),
                 ReportToJson(*br)});
  return absl::OkStatus();
}

absl::StatusOr<int> CmdVerify(const RunConfig& c) {
  if (c.suite.empty() == c.tables.empty()) {
    return Usage("give exactly one of --suite or --tables");
  }
  const std::vector<SuiteVariant> all = {
      SuiteVariant::kPiecewiseLaplace, SuiteVariant::kInverseSensitivity,
      SuiteVariant::kTruncatedLaplace, SuiteVariant::kApproximate};
  std::vector<NamedCheck> checks;
  absl::Status status;
  if (!c.tables.empty()) {
    status = RunTablePair(c, checks);
  } else if (c.suite == "dp-median") {
    status = RunNeighborSuite(c, SuiteFunction::kMedian, all, checks);
  } else if (c.suite == "dp-sum") {
    status = RunNeighborSuite(c, SuiteFunction::kClippedSum, all, checks);
  } else if (c.suite == "approx") {
    status = RunApproxSuite(c, checks);
  } else if (c.suite == "dominance-median") {
    status = RunDominance(c, checks);
  } else if (c.suite == "gof-median") {
    status = RunGof(c, checks);
  } else if (c.suite == "oracle") {
    status = RunOracle(c, checks);
  } else if (c.suite == "all") {
    // The approx variant runs once, inside the approx suite.
    const std::vector<SuiteVariant> exact(all.begin(), all.end() - 1);
    status = RunNeighborSuite(c, SuiteFunction::kMedian, exact, checks);
    if (status.ok()) {
      status = RunNeighborSuite(c, SuiteFunction::kClippedSum, exact, checks);
    }
    if (status.ok()) status = RunApproxSuite(c, checks);
    if (status.ok()) status = RunDominance(c, checks);
    if (status.ok()) status = RunGof(c, checks);
    if (status.ok()) status = RunOracle(c, checks);
  } else {
    return Usage(absl::StrCat("unknown suite '", c.suite, "'"));
  }
  if (!status.ok()) return status;

  bool all_pass = true;
  json report = json::array();
  for (const NamedCheck& check : checks) {
    std::cout << absl::StrFormat("%-4s  %-40s  %s\n",
                                 check.pass ? "PASS" : "FAIL", check.name,
                                 check.summary);
    report.push_back({{"name", check.name},
                      {"pass", check.pass},
                      {"summary", check.summary},
                      {"report", check.report}});
    all_pass = all_pass && check.pass;
  }
  if (!c.output_path.empty()) {
    absl::Status written = WriteFile(c.output_path, report.dump(2) + "\n");
    if (!written.ok()) return written;
  }
  for (const NamedCheck& check : checks) {
    if (!check.pass) std::cerr << "check failed: " << check.name << "\n";
  }
  return all_pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------

void AddTableOptions(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--function", c.function,
                  "median, bounded_sum or custom_table")
      ->check(CLI::IsMember({"median", "bounded_sum", "custom_table"}));
  cmd->add_option("--data", c.data_path,
                  "records, one real per line (an envelope JSON/CSV file for "
                  "custom_table)");
  cmd->add_option("--range", c.range, "output range lo hi")->expected(2);
  cmd->add_option("--model", c.model, "swap or add_subtract");
  cmd->add_option("--L", c.max_distance, "largest neighbor distance tabulated")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--bound", c.bound, "per-record bound for bounded_sum");
  cmd->add_option("--schedule", c.schedule_path,
                  "radius schedule JSON replacing the envelope");
  cmd->add_option("--k-trunc", c.k_trunc,
                  "truncate the schedule to --delta from this distance on")
      ->check(CLI::PositiveNumber);
}

void AddMechanismOptions(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--mech", c.mechanism, "plm, inv or tlap")
      ->check(CLI::IsMember({"plm", "inv", "tlap"}));
  cmd->add_option("--eps", c.epsilon, "total pure-DP budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--mech-eps", c.mech_epsilon,
                  "budget the mechanism runs at (default --eps)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rho", c.rho, "smoothing band width")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--delta", c.delta, "sensitivity for tlap and truncation")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "stream seed (PLM_SEED overrides)");
}

int Run(int argc, char** argv) {
  CLI::App app{"Piecewise Laplace mechanism tools"};
  app.require_subcommand(1);
  RunConfig c;

  CLI::App* envelope =
      app.add_subcommand("envelope", "build an envelope table");
  AddTableOptions(envelope, c);
  envelope->add_option("--format", c.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI::App* sample = app.add_subcommand("sample", "draw from a mechanism");
  CLI::App* density = app.add_subcommand("density", "evaluate a density");
  CLI::App* score = app.add_subcommand("score", "evaluate scores");
  CLI::App* compare =
      app.add_subcommand("compare", "mass near the center for plm, inv, tlap");
  for (CLI::App* cmd : {sample, density, score, compare}) {
    AddTableOptions(cmd, c);
    AddMechanismOptions(cmd, c);
  }
  sample->add_option("--n", c.n, "number of samples")
      ->check(CLI::PositiveNumber);
  density->add_option("--grid", c.grid, "lo hi n")->expected(3);
  density->add_option("--y", c.ys, "evaluation points");
  score->add_option("--y", c.ys, "evaluation points");
  compare->add_option("--alpha", c.alphas, "distances from the center");
  compare->add_option("--n", c.n, "samples per mechanism")
      ->check(CLI::PositiveNumber);

  CLI::App* verify = app.add_subcommand("verify", "run verification checks");
  AddTableOptions(verify, c);
  AddMechanismOptions(verify, c);
  verify->add_option("--suite", c.suite,
                     "dp-median, dp-sum, approx, dominance-median, "
                     "gof-median, oracle or all");
  verify->add_option("--tables", c.tables, "two neighboring envelope files")
      ->expected(2);
  verify->add_option("--sizes", c.sizes, "dataset sizes of the neighbor suites")
      ->check(CLI::PositiveNumber);
  verify->add_option("--variants", c.variants, "plm, inv, tlap, approx");
  verify->add_option("--n", c.n, "GOF samples")->check(CLI::PositiveNumber);
  verify->add_option("--bins", c.bins, "GOF bins")
      ->check(CLI::Range(2, 1 << 20));
  verify->add_option("--alpha", c.alphas, "dominance distances");

  for (CLI::App* cmd : {envelope, sample, density, score, compare, verify}) {
    cmd->add_option("--out", c.output_path, "output file (default stdout)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }
  for (CLI::App* cmd : {sample, density, score, compare, verify}) {
    if (cmd->parsed() && cmd->count("--eps") > 0) c.eps_given = true;
  }
  if (const char* env = std::getenv("PLM_SEED"); env != nullptr) {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      std::cerr << "error: PLM_SEED must be an unsigned integer\n";
      return kExitUsage;
    }
  }

  absl::StatusOr<int> result;
  if (envelope->parsed()) result = CmdEnvelope(c);
  if (sample->parsed()) result = CmdSample(c);
  if (density->parsed()) result = CmdDensity(c);
  if (score->parsed()) result = CmdScore(c);
  if (compare->parsed()) result = CmdCompare(c);
  if (verify->parsed()) result = CmdVerify(c);
  if (!result.ok()) {
    std::cerr << "error: " << result.status().message() << "\n";
    return kExitUsage;
  }
  return *result;
}

}  // namespace
}  // namespace plm

int main(int argc, char** argv) { return plm::Run(argc, argv); }
