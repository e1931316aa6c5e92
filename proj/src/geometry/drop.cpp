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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mmblock/geometry.hpp"

namespace mmblock::geometry {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

} // namespace

void BlockerSpec::validate() const
{
    if (!(h_dev >= 0.0 && h_bar > h_dev))
        throw std::invalid_argument("blocker spec: need h_bar > h_dev >= 0");
    if (!(w_dev >= 0.0 && w_bar > w_dev))
        throw std::invalid_argument("blocker spec: need w_bar > w_dev >= 0");
}

void DropConfig::validate() const
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("drop config: lambda must be > 0");
    if (!(d_min > 0.0 && d_max > d_min) || !std::isfinite(d_max))
        throw std::invalid_argument("drop config: need 0 < d_min < d_max (got d_min=" + std::to_string(d_min)
                                    + ", d_max=" + std::to_string(d_max) + ")");
    if (!(theta_o >= 0.0 && theta_o <= 180.0))
        throw std::invalid_argument("drop config: theta_o must lie in [0, 180]");
    spec.validate();
}

double average_density(double lambda, double d_min, double d_max)
{
    if (!(d_max > d_min) || !(d_min > 0.0))
        throw std::invalid_argument("average_density: need d_max > d_min > 0");
    return lambda / (std::numbers::pi * (d_max * d_max - d_min * d_min));
}

double sample_radius(double u, double d_min, double d_max)
{
    if (!(u >= 0.0 && u <= 1.0))
        throw std::invalid_argument("sample_radius: u must lie in [0, 1]");
    return d_min + (d_max - d_min) * std::sqrt(u);
}

BlockerDrop sample_drop(const DropConfig& config, Rng& rng)
{
    const auto& s = config.spec;
    std::uniform_real_distribution<double> azimuth(0.0, 360.0);
    std::uniform_real_distribution<double> height(s.h_bar - s.h_dev, s.h_bar + s.h_dev);
    std::uniform_real_distribution<double> width(s.w_bar - s.w_dev, s.w_bar + s.w_dev);

    BlockerDrop drop;
    drop.config = config;
    const int count = std::poisson_distribution<int>(config.lambda)(rng);
    drop.blockers.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        BlockerInstance b;
        b.r = sample_radius(uniform01(rng), config.d_min, config.d_max);
        b.azimuth = azimuth(rng);
        if (b.azimuth >= 360.0)
            b.azimuth = 0.0;
        b.height = height(rng);
        b.width = width(rng);
        drop.blockers.push_back(b);
    }
    return drop;
}

BlockerDrop sample_drop(const DropConfig& config, std::uint64_t seed)
{
    config.validate();
    Rng rng(seed);
    BlockerDrop drop = sample_drop(config, rng);
    drop.seed = seed;
    return drop;
}

SubtendedAngles subtended_angles(const BlockerInstance& b)
{
    if (!(b.r > 0.0))
        throw std::invalid_argument("subtended_angles: r must be > 0");
    const double phi = 2.0 * std::asin(std::min(1.0, b.width / (2.0 * b.r)));
    const double theta = 2.0 * std::asin(std::min(1.0, b.height / (2.0 * b.r)));
    return {phi * kRadToDeg, theta * kRadToDeg};
}

} // namespace mmblock::geometry
