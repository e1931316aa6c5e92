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

#include "mmblock/blockage_model.hpp"

namespace mmblock::model {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kAngleSlack = 1e-9;

// Offset of `phi` from `center` folded into (-180, 180].
double azimuth_offset(double phi, double center)
{
    double d = std::fmod(phi - center, 360.0);
    if (d > 180.0)
        d -= 360.0;
    else if (d <= -180.0)
        d += 360.0;
    return d;
}

} // namespace

std::string_view to_string(SelfMode mode)
{
    switch (mode) {
    case SelfMode::Portrait:
        return "portrait";
    case SelfMode::Landscape:
        return "landscape";
    case SelfMode::None:
        break;
    }
    return "none";
}

std::string_view to_string(LossComplexity complexity)
{
    return complexity == LossComplexity::High ? "high" : "low";
}

std::string_view to_string(RegionKind kind)
{
    switch (kind) {
    case RegionKind::Human:
        return "human";
    case RegionKind::Vehicular:
        return "vehicular";
    case RegionKind::Self:
        break;
    }
    return "self";
}

void AngularRegion::validate() const
{
    if (!(phi_c >= 0.0 && phi_c < 360.0))
        throw std::invalid_argument("angular region: phi_c must lie in [0, 360)");
    if (!(x_spread > 0.0 && x_spread <= 360.0))
        throw std::invalid_argument("angular region: x_spread must lie in (0, 360]");
    if (!(theta_c >= 0.0 && theta_c <= 180.0))
        throw std::invalid_argument("angular region: theta_c must lie in [0, 180]");
    if (!(y_spread > 0.0 && y_spread <= 180.0))
        throw std::invalid_argument("angular region: y_spread must lie in (0, 180]");
}

void BlockageScenario::validate() const
{
    if (human_count < 0 || human_count > 4)
        throw std::invalid_argument("scenario: human_count must lie in [0, 4]");
    if (vehicular_count < 0 || vehicular_count > 3)
        throw std::invalid_argument("scenario: vehicular_count must lie in [0, 3]");
}

stats::LossModel hand_loss(LossComplexity complexity)
{
    if (complexity == LossComplexity::High)
        return stats::LossModel::gaussian_weibull(0.15, 15.8, 3.6, 17.2, 6.1);
    return stats::LossModel::gaussian(15.3, 3.8);
}

stats::LossModel human_body_loss(LossComplexity complexity)
{
    if (complexity == LossComplexity::High)
        return stats::LossModel::gaussian_weibull(0.15, 9.5, 1.95, 9.4, 3.7);
    return stats::LossModel::gaussian(8.5, 2.5);
}

stats::LossModel vehicular_loss()
{
    return stats::LossModel::gaussian(12.0, 1.5);
}

AngularRegion self_blockage_region(SelfMode mode, LossComplexity complexity)
{
    switch (mode) {
    case SelfMode::Portrait:
        return {RegionKind::Self, 260.0, 120.0, 100.0, 80.0, hand_loss(complexity)};
    case SelfMode::Landscape:
        return {RegionKind::Self, 40.0, 160.0, 110.0, 75.0, hand_loss(complexity)};
    case SelfMode::None:
        break;
    }
    throw std::invalid_argument("self_blockage_region: no self-blockage mode given");
}

std::vector<AngularRegion> dynamic_regions(const BlockageScenario& scenario, Rng& rng)
{
    scenario.validate();
    std::uniform_real_distribution<double> azimuth(0.0, 360.0);
    auto centre = [&] {
        const double a = azimuth(rng);
        return a >= 360.0 ? 0.0 : a;
    };
    std::vector<AngularRegion> regions;
    for (int k = 0; k < scenario.human_count; ++k)
        regions.push_back({RegionKind::Human, centre(), 2.5, 90.0, 15.0, human_body_loss(scenario.loss_complexity)});
    for (int k = 0; k < scenario.vehicular_count; ++k)
        regions.push_back({RegionKind::Vehicular, centre(), 15.0, 90.0, 5.0, vehicular_loss()});
    return regions;
}

bool is_blocked(const AngularRegion& region, double phi, double theta)
{
    if (region.x_spread < 360.0
        && std::abs(azimuth_offset(phi, region.phi_c)) > 0.5 * region.x_spread + kAngleSlack)
        return false;
    const double lo = std::max(0.0, region.theta_c - 0.5 * region.y_spread);
    const double hi = std::min(180.0, region.theta_c + 0.5 * region.y_spread);
    return theta >= lo - kAngleSlack && theta <= hi + kAngleSlack;
}

BlockageMap realize_map(const BlockageScenario& scenario, std::uint64_t seed)
{
    scenario.validate();
    Rng rng(seed);
    BlockageMap map;
    map.seed = seed;
    if (scenario.self_mode != SelfMode::None)
        map.regions.push_back(self_blockage_region(scenario.self_mode, scenario.loss_complexity));
    for (auto& r : dynamic_regions(scenario, rng))
        map.regions.push_back(std::move(r));
    map.sampled_losses.reserve(map.regions.size());
    for (const auto& r : map.regions)
        map.sampled_losses.push_back(r.loss.sample(rng));
    return map;
}

double attenuation_at(const BlockageMap& map, double phi, double theta)
{
    double total = 0.0;
    for (std::size_t i = 0; i < map.regions.size(); ++i)
        if (is_blocked(map.regions[i], phi, theta))
            total += map.sampled_losses[i];
    return total;
}

double blocked_sphere_fraction(const AngularRegion& region)
{
    const double lo = std::max(0.0, region.theta_c - 0.5 * region.y_spread);
    const double hi = std::min(180.0, region.theta_c + 0.5 * region.y_spread);
    const double band = 0.5 * (std::cos(lo * kDegToRad) - std::cos(hi * kDegToRad));
    return std::clamp(region.x_spread / 360.0 * band, 0.0, 1.0);
}

} // namespace mmblock::model
