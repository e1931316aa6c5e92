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

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mmblock/geometry.hpp"
#include "mmblock/rng.hpp"
#include "mmblock/stats.hpp"

namespace mmblock::model {

enum class SelfMode { None, Portrait, Landscape };
enum class LossComplexity { Low, High };

enum class RegionKind { Self, Human, Vehicular };

std::string_view to_string(SelfMode mode);
std::string_view to_string(LossComplexity complexity);
std::string_view to_string(RegionKind kind);

/// Square region in (azimuth, elevation): azimuth within phi_c +/- x_spread/2
/// (modulo 360) and elevation within theta_c +/- y_spread/2, all in degrees.
struct AngularRegion {
    RegionKind kind = RegionKind::Self;
    double phi_c = 0.0;
    double x_spread = 0.0;
    double theta_c = 90.0;
    double y_spread = 0.0;
    stats::LossModel loss = stats::LossModel::gaussian(0.0, 1.0);

    void validate() const;
};

struct BlockageScenario {
    SelfMode self_mode = SelfMode::None;
    int human_count = 0;     // 0..4
    int vehicular_count = 0; // 0..3
    LossComplexity loss_complexity = LossComplexity::Low;

    void validate() const;
};

struct BlockageMap {
    std::vector<AngularRegion> regions;
    std::vector<double> sampled_losses; // dB, one per region
    std::uint64_t seed = 0;
};

// Loss presets.
stats::LossModel hand_loss(LossComplexity complexity);
stats::LossModel human_body_loss(LossComplexity complexity);
stats::LossModel vehicular_loss();

/// Self-blockage region for a grip. Throws for SelfMode::None.
AngularRegion self_blockage_region(SelfMode mode, LossComplexity complexity);

/// Human regions first, then vehicular, each centred at a uniform azimuth.
std::vector<AngularRegion> dynamic_regions(const BlockageScenario& scenario, Rng& rng);

/// Closed-interval membership test, wrap-aware in azimuth. Elevation limits
/// are clipped to [0, 180].
bool is_blocked(const AngularRegion& region, double phi, double theta);

/// Self region (if any) plus dynamic regions with one loss draw per region.
BlockageMap realize_map(const BlockageScenario& scenario, std::uint64_t seed);

/// Sum in dB of the sampled losses of every region covering the direction.
double attenuation_at(const BlockageMap& map, double phi, double theta);

/// Solid-angle share of the unit sphere covered by the region, with theta
/// measured from the zenith.
double blocked_sphere_fraction(const AngularRegion& region);

// ---------------------------------------------------------------------------
// Screen diffraction

inline constexpr double kSpeedOfLight = 299792458.0;

/// Transmitter at horizontal distance `tr_distance` along azimuth 0 from the
/// receiver. The blocker is a vertical w x h screen standing on the ground,
/// facing the receiver, at the blocker's polar position.
struct DkedGeometry {
    double tr_distance = 20.5;
    double tx_height = 1.0;
    double rx_height = 1.0;
    geometry::BlockerInstance blocker;
    double wavelength = kSpeedOfLight / 28e9;
    /// When true the screen has no lower edge (it reaches the ground), so the
    /// lower-edge term is the half-plane limit 1/2.
    bool ground_anchored = true;
};

/// Whether the blocker's subtended azimuth interval contains the
/// transmitter direction (azimuth 0) and the blocker lies before the transmitter.
bool shadows_path(const geometry::BlockerInstance& blocker, double tr_distance);

/// Four-edge knife-edge shadowing loss in dB (>= 0). Geometry that places the
/// screen outside the TX-RX segment yields 0.
double dked_loss(const DkedGeometry& geom);

struct DkedScenario {
    geometry::DropConfig drop;
    double tr_distance = 20.5;
    double tx_height = 1.0;
    double rx_height = 1.0;
    double wavelength = kSpeedOfLight / 28e9;
    bool ground_anchored = true;
};

/// Empirical distribution of per-drop total shadowing loss over drops with at
/// least one shadowing blocker.
struct LossCdf {
    std::vector<double> losses; // ascending
    std::size_t n_drops = 0;

    double cdf(double x) const;
    double median() const;
};

/// Monte Carlo driver; drop i uses derive_seed(seed, i).
LossCdf dynamic_loss_cdf(const DkedScenario& scenario, std::size_t n_drops, std::uint64_t seed, int workers = 1);

} // namespace mmblock::model
