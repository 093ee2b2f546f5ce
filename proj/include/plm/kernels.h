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

#ifndef PLM_KERNELS_H_
#define PLM_KERNELS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "plm/mechanisms.h"

namespace plm {

// kSerial is the reference path; kParallel splits the same work with OpenMP
// and must produce identical results.
enum class Execution { kSerial, kParallel };

// Number of OpenMP threads, 1 without OpenMP.
int MaxThreads();

// n draws from one stream seeded with `seed`. The parallel path skips ahead
// per sample, so both paths return the same values.
std::vector<double> SampleBatch(const Mechanism& mechanism, std::int64_t n,
                                std::uint64_t seed,
                                Execution execution = Execution::kParallel);

std::vector<double> DensityGrid(const Mechanism& mechanism,
                                std::span<const double> grid,
                                Execution execution = Execution::kParallel);

}  // namespace plm

#endif  // PLM_KERNELS_H_
