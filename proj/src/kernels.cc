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

#include "plm/kernels.h"

#include <cstdint>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "plm/random.h"

namespace plm {

int MaxThreads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<double> SampleBatch(const Mechanism& mechanism, std::int64_t n,
                                std::uint64_t seed, Execution execution) {
  std::vector<double> out(static_cast<std::size_t>(n > 0 ? n : 0));
  const std::uint64_t draws = mechanism.DrawsPerSample();
  if (execution == Execution::kSerial) {
    RandomStream stream(seed);
    for (std::int64_t i = 0; i < n; ++i) out[i] = mechanism.Sample(stream);
    return out;
  }
#pragma omp parallel
  {
    std::int64_t begin = 0, end = n;
#ifdef _OPENMP
    const std::int64_t threads = omp_get_num_threads();
    const std::int64_t id = omp_get_thread_num();
    begin = n * id / threads;
    end = n * (id + 1) / threads;
#endif
    RandomStream stream(seed);
    stream.Skip(static_cast<std::uint64_t>(begin) * draws);
    for (std::int64_t i = begin; i < end; ++i) {
      out[i] = mechanism.Sample(stream);
    }
  }
  return out;
}

std::vector<double> DensityGrid(const Mechanism& mechanism,
                                std::span<const double> grid,
                                Execution execution) {
  const std::int64_t n = static_cast<std::int64_t>(grid.size());
  std::vector<double> out(grid.size());
  if (execution == Execution::kSerial) {
    for (std::int64_t i = 0; i < n; ++i) out[i] = mechanism.Density(grid[i]);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) out[i] = mechanism.Density(grid[i]);
  return out;
}

}  // namespace plm
