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
#include <functional>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "mmblock/geometry.hpp"

namespace mmblock::geometry {

namespace {

double circular_gap(double a, double b)
{
    const double d = std::fmod(std::abs(a - b), 360.0);
    return std::min(d, 360.0 - d);
}

// Length of the union of closed arcs [center - half, center + half] on the circle.
double arc_union_length(std::span<const std::pair<double, double>> arcs)
{
    std::vector<std::pair<double, double>> pieces;
    for (const auto& [center, half] : arcs) {
        if (half >= 180.0)
            return 360.0;
        double start = std::fmod(center - half, 360.0);
        if (start < 0.0)
            start += 360.0;
        const double end = start + 2.0 * half;
        if (end > 360.0) {
            pieces.emplace_back(start, 360.0);
            pieces.emplace_back(0.0, end - 360.0);
        } else {
            pieces.emplace_back(start, end);
        }
    }
    std::sort(pieces.begin(), pieces.end());
    double total = 0.0;
    double cur_start = pieces.front().first;
    double cur_end = pieces.front().second;
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        if (pieces[i].first <= cur_end) {
            cur_end = std::max(cur_end, pieces[i].second);
        } else {
            total += cur_end - cur_start;
            cur_start = pieces[i].first;
            cur_end = pieces[i].second;
        }
    }
    total += cur_end - cur_start;
    return std::min(total, 360.0);
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i)
{
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

} // namespace

std::vector<SubtendedAngles> blocked_regions(const BlockerDrop& drop)
{
    const auto& blockers = drop.blockers;
    std::vector<SubtendedAngles> angles;
    angles.reserve(blockers.size());
    for (const auto& b : blockers)
        angles.push_back(subtended_angles(b));
    if (drop.config.overlap == OverlapRule::Independent || blockers.size() < 2)
        return angles;

    // Connected components of the azimuth-overlap graph. Touching intervals
    // do not merge.
    std::vector<std::size_t> parent(blockers.size());
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t i = 0; i < blockers.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (circular_gap(blockers[i].azimuth, blockers[j].azimuth) < 0.5 * (angles[i].phi + angles[j].phi))
                parent[find_root(parent, i)] = find_root(parent, j);

    std::vector<SubtendedAngles> regions;
    std::vector<std::pair<double, double>> arcs;
    for (std::size_t root = 0; root < blockers.size(); ++root) {
        if (find_root(parent, root) != root)
            continue;
        arcs.clear();
        double theta = 0.0;
        for (std::size_t i = 0; i < blockers.size(); ++i) {
            if (find_root(parent, i) != root)
                continue;
            arcs.emplace_back(blockers[i].azimuth, 0.5 * angles[i].phi);
            theta = std::max(theta, angles[i].theta);
        }
        regions.push_back({arc_union_length(arcs), theta});
    }
    return regions;
}

std::optional<SubtendedAngles> mean_angular_blockage(const BlockerDrop& drop)
{
    if (drop.blockers.empty())
        return std::nullopt;
    const auto regions = blocked_regions(drop);
    SubtendedAngles mean;
    for (const auto& r : regions) {
        mean.phi += r.phi;
        mean.theta += r.theta;
    }
    mean.phi /= static_cast<double>(regions.size());
    mean.theta /= static_cast<double>(regions.size());
    return mean;
}

double top_k_power(std::span<const double> azimuth_extents, int k)
{
    if (k < 1)
        throw std::invalid_argument("top_k_power: k must be >= 1");
    if (azimuth_extents.empty())
        throw std::invalid_argument("top_k_power: no blockers");
    if (azimuth_extents.size() <= static_cast<std::size_t>(k))
        return 100.0;
    std::vector<double> sorted(azimuth_extents.begin(), azimuth_extents.end());
    std::partial_sort(sorted.begin(), sorted.begin() + k, sorted.end(), std::greater<>());
    const double top = std::accumulate(sorted.begin(), sorted.begin() + k, 0.0);
    const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
    return 100.0 * top / total;
}

std::optional<double> top_k_power(const BlockerDrop& drop, int k)
{
    if (k < 1)
        throw std::invalid_argument("top_k_power: k must be >= 1");
    if (drop.blockers.empty())
        return std::nullopt;
    std::vector<double> extents;
    for (const auto& r : blocked_regions(drop))
        extents.push_back(r.phi);
    return top_k_power(extents, k);
}

double percentile_nearest_rank(std::span<const double> sorted, double p)
{
    if (sorted.empty())
        throw std::invalid_argument("percentile: no observations");
    if (!(p >= 0.0 && p <= 100.0))
        throw std::invalid_argument("percentile: p must lie in [0, 100]");
    const double n = static_cast<double>(sorted.size());
    const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(p / 100.0 * n - 1e-9)));
    return sorted[std::min(rank, sorted.size()) - 1];
}

double exceedance_percentile(std::span<const double> sorted, double p)
{
    return percentile_nearest_rank(sorted, 100.0 - p);
}

DropStatistics run_drops(const DropConfig& config, std::size_t n_drops, std::uint64_t seed,
                         std::span<const int> top_k, int workers)
{
    config.validate();
    if (n_drops < 1)
        throw std::invalid_argument("run_drops: n_drops must be >= 1");
    for (int k : top_k)
        if (k < 1)
            throw std::invalid_argument("run_drops: top-k values must be >= 1");

    struct PerDrop {
        bool empty = true;
        double phi = 0.0;
        double theta = 0.0;
        std::vector<double> top;
    };
    std::vector<PerDrop> per(n_drops);
    parallel_for(n_drops, workers, [&](std::size_t i) {
        Rng rng = make_stream(seed, i);
        const BlockerDrop drop = sample_drop(config, rng);
        if (drop.blockers.empty())
            return;
        const auto regions = blocked_regions(drop);
        PerDrop& out = per[i];
        out.empty = false;
        std::vector<double> extents;
        extents.reserve(regions.size());
        for (const auto& r : regions) {
            out.phi += r.phi;
            out.theta += r.theta;
            extents.push_back(r.phi);
        }
        out.phi /= static_cast<double>(regions.size());
        out.theta /= static_cast<double>(regions.size());
        for (int k : top_k)
            out.top.push_back(top_k_power(extents, k));
    });

    DropStatistics stats;
    stats.n_drops = n_drops;
    stats.top_k.assign(top_k.begin(), top_k.end());
    stats.top_k_power.resize(top_k.size());
    for (const auto& d : per) {
        if (d.empty) {
            ++stats.n_empty;
            continue;
        }
        stats.mean_phi.push_back(d.phi);
        stats.mean_theta.push_back(d.theta);
        for (std::size_t j = 0; j < d.top.size(); ++j)
            stats.top_k_power[j].push_back(d.top[j]);
    }
    return stats;
}

std::vector<PercentileRow> percentile_table(const DropStatistics& stats, std::span<const double> percentiles)
{
    if (stats.mean_phi.empty())
        throw std::invalid_argument("percentile_table: every drop was empty");
    std::vector<double> phi = stats.mean_phi;
    std::vector<double> theta = stats.mean_theta;
    std::sort(phi.begin(), phi.end());
    std::sort(theta.begin(), theta.end());
    std::vector<PercentileRow> rows;
    for (double p : percentiles)
        rows.push_back({p, percentile_nearest_rank(phi, p), percentile_nearest_rank(theta, p)});
    return rows;
}

std::vector<PercentileRow> percentile_table(const DropConfig& config, std::size_t n_drops, std::uint64_t seed,
                                            std::span<const double> percentiles, int workers)
{
    return percentile_table(run_drops(config, n_drops, seed, {}, workers), percentiles);
}

} // namespace mmblock::geometry
