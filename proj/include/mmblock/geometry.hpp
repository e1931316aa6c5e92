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
#include <optional>
#include <span>
#include <vector>

#include "mmblock/rng.hpp"

namespace mmblock::geometry {

/// Blocker dimensions: heights ~ U[h_bar - h_dev, h_bar + h_dev] and widths
/// ~ U[w_bar - w_dev, w_bar + w_dev], all in metres.
struct BlockerSpec {
    double h_bar = 1.7;
    double w_bar = 0.3;
    double h_dev = 0.2;
    double w_dev = 0.1;

    static BlockerSpec human() { return {1.7, 0.3, 0.2, 0.1}; }
    static BlockerSpec vehicular() { return {1.4, 4.8, 0.4, 0.5}; }

    void validate() const;
};

/// How blockers whose azimuth intervals overlap are counted.
enum class OverlapRule {
    /// Every blocker is its own blocked region.
    Independent,
    /// Blockers with overlapping azimuth intervals coalesce into one region
    /// spanning the union of their intervals.
    Merge,
};

struct DropConfig {
    double lambda = 4.0; // Poisson mean blocker count
    double d_min = 3.0;
    double d_max = 10.0;
    BlockerSpec spec;
    double theta_o = 90.0; // elevation of the blocker plane, degrees
    OverlapRule overlap = OverlapRule::Merge;

    void validate() const;
};

struct BlockerInstance {
    double r = 0.0;       // distance from the receiver, m
    double azimuth = 0.0; // degrees in [0, 360)
    double height = 0.0;
    double width = 0.0;
};

struct BlockerDrop {
    std::vector<BlockerInstance> blockers;
    DropConfig config;
    std::uint64_t seed = 0;
};

struct SubtendedAngles {
    double phi = 0.0;   // azimuth extent, degrees
    double theta = 0.0; // elevation extent, degrees
};

/// lambda / (pi (d_max^2 - d_min^2)) blockers per square metre.
double average_density(double lambda, double d_min, double d_max);

/// Inverse CDF of the triangular radial density 2 (r - d_min) / (d_max - d_min)^2.
double sample_radius(double u, double d_min, double d_max);

/// One Monte Carlo realization, reproducible from `seed`.
BlockerDrop sample_drop(const DropConfig& config, std::uint64_t seed);

/// Same as above, drawing from a caller-owned stream.
BlockerDrop sample_drop(const DropConfig& config, Rng& rng);

/// Angles subtended at the receiver: sin(phi/2) = (w/2)/r, sin(theta/2) = (h/2)/r,
/// saturating at 180 degrees when the blocker reaches the receiver.
SubtendedAngles subtended_angles(const BlockerInstance& b);

/// Blocked regions of a drop after applying the drop's overlap rule. Under
/// `Merge` a region's elevation extent is the largest of its members.
std::vector<SubtendedAngles> blocked_regions(const BlockerDrop& drop);

/// Arithmetic mean of the per-region subtended angles; nullopt for an empty drop.
std::optional<SubtendedAngles> mean_angular_blockage(const BlockerDrop& drop);

/// Share (percent) of the summed azimuth extents held by the k largest.
/// 100 when there are at most k entries. Requires a nonempty input and k >= 1.
double top_k_power(std::span<const double> azimuth_extents, int k);

/// Top-k explanatory power of a drop's blocked regions; nullopt when empty.
std::optional<double> top_k_power(const BlockerDrop& drop, int k);

/// Nearest-rank percentile (p in (0, 100]) of an ascending-sorted range.
double percentile_nearest_rank(std::span<const double> sorted, double p);

/// Per-drop statistics of a Monte Carlo run over nonempty drops.
struct DropStatistics {
    std::size_t n_drops = 0;
    std::size_t n_empty = 0;
    std::vector<double> mean_phi;
    std::vector<double> mean_theta;
    std::vector<int> top_k;                    // the K values evaluated
    std::vector<std::vector<double>> top_k_power; // [k index][drop]
};

/// Runs `n_drops` drops, each on the stream derive_seed(seed, drop index).
/// The result does not depend on `workers`.
DropStatistics run_drops(const DropConfig& config, std::size_t n_drops, std::uint64_t seed,
                         std::span<const int> top_k = {}, int workers = 1);

struct PercentileRow {
    double percentile = 50.0;
    double azimuth = 0.0;
    double elevation = 0.0;
};

/// Nearest-rank percentiles of the per-drop mean angular blockage.
/// Throws std::invalid_argument when every drop is empty.
std::vector<PercentileRow> percentile_table(const DropStatistics& stats, std::span<const double> percentiles);

std::vector<PercentileRow> percentile_table(const DropConfig& config, std::size_t n_drops, std::uint64_t seed,
                                            std::span<const double> percentiles, int workers = 1);

/// Exceedance percentiles of top-k power: the value at percentile p is the
/// level exceeded by p percent of nonempty drops (nearest rank on the
/// ascending sort at 100 - p; p = 50 is the median).
double exceedance_percentile(std::span<const double> sorted, double p);

} // namespace mmblock::geometry
