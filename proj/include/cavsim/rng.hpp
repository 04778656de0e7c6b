// Copyright 2026 cavsim contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>

namespace cavsim
{

/// SplitMix64 generator. Simulation reproducibility is part of the output
/// contract, so we avoid <random> engines and distributions, whose streams
/// are implementation-defined and differ between standard libraries.
class SplitMix64
{
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64()
  {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 bits of resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Modulo bias is below 2^-53 for the small n
  /// used here (entry point choice).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  bool next_bernoulli(double p) { return next_double() < p; }

  /// Standard exponential variate (mean 1).
  double next_exponential() { return -std::log1p(-next_double()); }

private:
  std::uint64_t state_;
};

/// Derives an independent child stream from (seed, stream_id). Used to keep
/// arrival times, route choices and rule-violation draws on separate streams
/// so that one consumer does not perturb another.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t stream_id)
{
  SplitMix64 mixer(seed ^ (0xd1342543de82ef95ULL * (stream_id + 1)));
  mixer.next_u64();
  return SplitMix64{mixer.next_u64()};
}

}  // namespace cavsim
