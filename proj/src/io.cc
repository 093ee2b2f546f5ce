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

#include "plm/io.h"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace plm {
namespace {

using nlohmann::json;

// The system absl does not alias std::string_view, so text handling here
// stays with the standard library.
std::string_view Strip(std::string_view s) {
  const auto space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n';
  };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

// Splits on any character of `delimiters`, dropping empty pieces when asked.
std::vector<std::string_view> Split(std::string_view s,
                                    std::string_view delimiters,
                                    bool skip_empty) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find_first_of(delimiters, start);
    const std::string_view piece =
        s.substr(start, end == std::string_view::npos ? end : end - start);
    if (!skip_empty || !piece.empty()) out.push_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

absl::StatusOr<double> ParseReal(std::string_view token) {
  token = Strip(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc() ||
      ptr != token.data() + token.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("not a real number: '", std::string(token), "'"));
  }
  return value;
}

std::vector<double> JsonReals(const json& j) {
  return j.get<std::vector<double>>();
}

}  // namespace

std::string FormatReal(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

json EnvelopeToJson(const EnvelopeTable& table) {
  return json{
      {"center", table.center()},
      {"upper", std::vector<double>(table.upper().begin(), table.upper().end())},
      {"lower", std::vector<double>(table.lower().begin(), table.lower().end())},
      {"range", {table.range().lo, table.range().hi}},
      {"model", std::string(NeighborModelName(table.model()))},
      {"rho", table.smoothing()},
  };
}

absl::StatusOr<EnvelopeTable> EnvelopeFromJson(const json& j) {
  try {
    const json& range = j.at("range");
    if (!range.is_array() || range.size() != 2) {
      return absl::InvalidArgumentError("range must be [lo, hi]");
    }
    NeighborModel model = NeighborModel::kSwap;
    if (j.contains("model")) {
      absl::StatusOr<NeighborModel> parsed =
          ParseNeighborModel(j.at("model").get<std::string>());
      if (!parsed.ok()) return parsed.status();
      model = *parsed;
    }
    return EnvelopeTable::Create(
        j.at("center").get<double>(), JsonReals(j.at("upper")),
        JsonReals(j.at("lower")),
        Range{range[0].get<double>(), range[1].get<double>()}, model,
        j.value("rho", 0.0));
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed envelope JSON: ", e.what()));
  }
}

std::string EnvelopeToCsv(const EnvelopeTable& table) {
  std::string out = absl::StrCat(
      "# center=", FormatReal(table.center()),
      " range_lo=", FormatReal(table.range().lo),
      " range_hi=", FormatReal(table.range().hi),
      " model=", std::string(NeighborModelName(table.model())),
      " rho=", FormatReal(table.smoothing()), "\nell,upper,lower\n");
  for (int ell = 0; ell <= table.max_distance(); ++ell) {
    absl::StrAppend(&out, ell, ",", FormatReal(table.upper(ell)), ",",
                    FormatReal(table.lower(ell)), "\n");
  }
  return out;
}

absl::StatusOr<EnvelopeTable> EnvelopeFromCsv(std::string_view text) {
  double center = std::numeric_limits<double>::quiet_NaN();
  Range range{std::numeric_limits<double>::quiet_NaN(),
              std::numeric_limits<double>::quiet_NaN()};
  NeighborModel model = NeighborModel::kSwap;
  double rho = 0.0;
  std::vector<double> upper, lower;
  for (std::string_view line : Split(text, "\n", false)) {
    line = Strip(line);
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      for (std::string_view field : Split(line, " \t", true)) {
        const std::size_t eq = field.find('=');
        if (eq == std::string_view::npos) continue;
        const std::string_view kv[2] = {field.substr(0, eq),
                                        field.substr(eq + 1)};
        if (kv[0] == "model") {
          absl::StatusOr<NeighborModel> parsed = ParseNeighborModel(kv[1]);
          if (!parsed.ok()) return parsed.status();
          model = *parsed;
          continue;
        }
        absl::StatusOr<double> value = ParseReal(kv[1]);
        if (!value.ok()) return value.status();
        if (kv[0] == "center") center = *value;
        if (kv[0] == "range_lo") range.lo = *value;
        if (kv[0] == "range_hi") range.hi = *value;
        if (kv[0] == "rho") rho = *value;
      }
      continue;
    }
    if (line.starts_with("ell")) continue;
    const std::vector<std::string_view> cells = Split(line, ",", false);
    if (cells.size() != 3) {
      return absl::InvalidArgumentError(
          absl::StrCat("expected ell,upper,lower: '", std::string(line), "'"));
    }
    absl::StatusOr<double> ell = ParseReal(cells[0]);
    absl::StatusOr<double> up = ParseReal(cells[1]);
    absl::StatusOr<double> lo = ParseReal(cells[2]);
    if (!ell.ok()) return ell.status();
    if (!up.ok()) return up.status();
    if (!lo.ok()) return lo.status();
    if (*ell != static_cast<double>(upper.size())) {
      return absl::InvalidArgumentError("rows must list ell = 0, 1, 2, ...");
    }
    upper.push_back(*up);
    lower.push_back(*lo);
  }
  if (std::isnan(range.lo) || std::isnan(range.hi)) {
    return absl::InvalidArgumentError("CSV header lacks range_lo/range_hi");
  }
  if (std::isnan(center)) {
    if (upper.empty()) return absl::InvalidArgumentError("empty envelope CSV");
    center = upper.front();
  }
  return EnvelopeTable::Create(center, std::move(upper), std::move(lower),
                               range, model, rho);
}

json ScheduleToJson(const RadiusSchedule& schedule) {
  return json{
      {"radii",
       std::vector<double>(schedule.radii().begin(), schedule.radii().end())},
      {"p_norm", schedule.p_norm()},
  };
}

absl::StatusOr<RadiusSchedule> ScheduleFromJson(const json& j) {
  try {
    return RadiusSchedule::Create(JsonReals(j.at("radii")),
                                  j.value("p_norm", 1.0));
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed schedule JSON: ", e.what()));
  }
}

json ReportToJson(const VerificationReport& report) {
  return json{
      {"check", report.check},
      {"max_log_ratio", report.max_log_ratio},
      {"br_sum", report.br_sum},
      {"dominance_min_margin", report.dominance_min_margin},
      {"dominance_interior_margin", report.dominance_interior_margin},
      {"gof_statistic", report.gof_statistic},
      {"gof_p_value", report.gof_p_value},
      {"pass", report.pass},
      {"grid_size", report.grid_size},
      {"tolerance", report.tolerance},
      {"detail", report.detail},
  };
}

json SuiteCheckToJson(const SuiteCheck& check) {
  return json{
      {"function", std::string(SuiteFunctionName(check.function))},
      {"size", check.size},
      {"variant", std::string(SuiteVariantName(check.variant))},
      {"epsilon", check.epsilon},
      {"claimed_epsilon", check.claimed_epsilon},
      {"pairs", check.pairs},
      {"grid_points", check.grid_points},
      {"max_log_ratio", check.max_log_ratio},
      {"max_br_sum", check.max_br_sum},
      {"support_mismatch", check.support_mismatch},
      {"dp_pass", check.dp_pass},
      {"br_pass", check.br_pass},
      {"worst_pair", {check.worst_pair.first, check.worst_pair.second}},
  };
}

std::string SamplesToCsv(std::span<const double> samples, MechanismKind kind,
                         double epsilon, std::uint64_t seed) {
  std::string out = absl::StrCat("# mechanism=", std::string(MechanismName(kind)),
                                 " epsilon=", FormatReal(epsilon),
                                 " seed=", seed, " n=", samples.size(),
                                 "\nvalue\n");
  for (double y : samples) absl::StrAppend(&out, FormatReal(y), "\n");
  return out;
}

std::string DensityToCsv(std::span<const double> grid,
                         std::span<const double> density) {
  std::string out = "y,density\n";
  for (std::size_t i = 0; i < grid.size() && i < density.size(); ++i) {
    absl::StrAppend(&out, FormatReal(grid[i]), ",", FormatReal(density[i]),
                    "\n");
  }
  return out;
}

absl::StatusOr<std::vector<double>> ParseRealList(std::string_view text) {
  std::vector<double> out;
  for (std::string_view line : Split(text, "\n", false)) {
    line = Strip(line);
    if (line.empty() || line.front() == '#') continue;
    for (std::string_view token : Split(line, ", \t", true)) {
      absl::StatusOr<double> value = ParseReal(token);
      if (!value.ok()) return value.status();
      out.push_back(*value);
    }
  }
  return out;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << contents;
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

}  // namespace plm
