// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace mmblock {

/// Random stream used throughout the library. Streams are caller-owned and
/// never shared between workers.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to decorrelate seeds derived from a master seed.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the independent stream for work item `index` under `master`.
///
/// Monte Carlo drivers give every drop (or trace) its own stream so results do
/// not depend on the number of workers or the order in which items run.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

inline Rng make_stream(std::uint64_t master, std::uint64_t index)
{
    return Rng(derive_seed(master, index));
}

/// Uniform draw on [0, 1).
inline double uniform01(Rng& rng)
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Runs `body(i)` for i in [0, n) on `workers` threads (static block split).
/// `body` must only write to per-index slots.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

} // namespace mmblock
