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

#ifndef PLM_IO_H_
#define PLM_IO_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "plm/approx.h"
#include "plm/envelope.h"
#include "plm/mechanisms.h"
#include "plm/suite.h"
#include "plm/verify.h"

namespace plm {

// {"center", "upper": [], "lower": [], "range": [lo, hi], "model", "rho"}.
nlohmann::json EnvelopeToJson(const EnvelopeTable& table);
absl::StatusOr<EnvelopeTable> EnvelopeFromJson(const nlohmann::json& j);

// "# center=... range_lo=... range_hi=... model=... rho=..." then
// "ell,upper,lower" rows.
std::string EnvelopeToCsv(const EnvelopeTable& table);
absl::StatusOr<EnvelopeTable> EnvelopeFromCsv(std::string_view text);

// {"radii": [], "p_norm"}.
nlohmann::json ScheduleToJson(const RadiusSchedule& schedule);
absl::StatusOr<RadiusSchedule> ScheduleFromJson(const nlohmann::json& j);

nlohmann::json ReportToJson(const VerificationReport& report);
nlohmann::json SuiteCheckToJson(const SuiteCheck& check);

// "# mechanism=plm epsilon=2 seed=7 n=..." then a "value" column.
std::string SamplesToCsv(std::span<const double> samples,
                         MechanismKind kind, double epsilon,
                         std::uint64_t seed);
// "y,density" rows.
std::string DensityToCsv(std::span<const double> grid,
                         std::span<const double> density);

// One real per line; blank lines and lines starting with '#' are skipped.
absl::StatusOr<std::vector<double>> ParseRealList(std::string_view text);

absl::StatusOr<std::string> ReadFile(const std::string& path);
absl::Status WriteFile(const std::string& path, std::string_view contents);

// Shortest decimal form that parses back to the same double.
std::string FormatReal(double value);

}  // namespace plm

#endif  // PLM_IO_H_
