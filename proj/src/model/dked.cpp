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
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mmblock/blockage_model.hpp"

namespace mmblock::model {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

struct Point3 {
    double x, y, z;
};

double distance(const Point3& a, const Point3& b)
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

// Knife-edge term of one screen edge. `excess` is the extra path length via
// the edge; `shadowed` tells whether the direct ray lies on the screen side.
double edge_term(double excess, bool shadowed, double wavelength)
{
    const double v = 0.5 * kPi * std::sqrt(kPi / wavelength * std::max(excess, 0.0));
    return std::atan(shadowed ? v : -v) / kPi;
}

} // namespace

bool shadows_path(const geometry::BlockerInstance& blocker, double tr_distance)
{
    if (!(blocker.r > 0.0) || blocker.r >= tr_distance)
        return false;
    const double half = 0.5 * geometry::subtended_angles(blocker).phi;
    double off = std::fmod(std::abs(blocker.azimuth), 360.0);
    off = std::min(off, 360.0 - off);
    return off <= half;
}

double dked_loss(const DkedGeometry& geom)
{
    if (!(geom.tr_distance > 0.0) || !(geom.wavelength > 0.0))
        throw std::invalid_argument("dked_loss: tr_distance and wavelength must be > 0");
    const auto& b = geom.blocker;
    if (!(b.r > 0.0) || b.r >= geom.tr_distance)
        return 0.0;

    const double a = b.azimuth * kDegToRad;
    const double ca = std::cos(a);
    const double sa = std::sin(a);
    if (ca <= 0.0)
        return 0.0;

    // The screen plane passes through the blocker centre, normal to the
    // receiver-blocker direction. Fraction of the TX-RX segment at the crossing:
    const double s = b.r / (geom.tr_distance * ca);
    if (s >= 1.0)
        return 0.0;

    const Point3 rx{0.0, 0.0, geom.rx_height};
    const Point3 tx{geom.tr_distance, 0.0, geom.tx_height};
    const double direct = distance(rx, tx);
    const double cross_x = s * geom.tr_distance;
    const double cross_z = geom.rx_height + s * (geom.tx_height - geom.rx_height);

    // Lateral coordinate of the crossing along the screen, from its centre.
    const double lateral = (cross_x - b.r * ca) * (-sa) + (0.0 - b.r * sa) * ca;
    auto excess_at = [&](const Point3& p) { return distance(tx, p) + distance(rx, p) - direct; };

    double f_width = 0.0;
    for (double side : {1.0, -1.0}) {
        const double off = side * 0.5 * b.width;
        const Point3 edge{b.r * ca - off * sa, b.r * sa + off * ca, cross_z};
        const bool shadowed = side > 0 ? lateral < off : lateral > off;
        f_width += edge_term(excess_at(edge), shadowed, geom.wavelength);
    }

    double f_height = edge_term(excess_at({cross_x, 0.0, b.height}), cross_z < b.height, geom.wavelength);
    if (geom.ground_anchored)
        f_height += 0.5;
    else
        f_height += edge_term(excess_at({cross_x, 0.0, 0.0}), cross_z > 0.0, geom.wavelength);

    const double transmitted = std::max(1.0 - f_height * f_width, 1e-12);
    return std::max(0.0, -20.0 * std::log10(transmitted));
}

double LossCdf::cdf(double x) const
{
    if (losses.empty())
        return 0.0;
    const auto it = std::upper_bound(losses.begin(), losses.end(), x);
    return static_cast<double>(it - losses.begin()) / static_cast<double>(losses.size());
}

double LossCdf::median() const
{
    return geometry::percentile_nearest_rank(losses, 50.0);
}

LossCdf dynamic_loss_cdf(const DkedScenario& scenario, std::size_t n_drops, std::uint64_t seed, int workers)
{
    scenario.drop.validate();
    if (n_drops < 1)
        throw std::invalid_argument("dynamic_loss_cdf: n_drops must be >= 1");

    // NaN marks a drop without a shadowing blocker.
    std::vector<double> per_drop(n_drops, std::numeric_limits<double>::quiet_NaN());
    parallel_for(n_drops, workers, [&](std::size_t i) {
        Rng rng = make_stream(seed, i);
        const auto drop = geometry::sample_drop(scenario.drop, rng);
        bool any = false;
        double total = 0.0;
        for (const auto& blocker : drop.blockers) {
            if (!shadows_path(blocker, scenario.tr_distance))
                continue;
            any = true;
            total += dked_loss({scenario.tr_distance, scenario.tx_height, scenario.rx_height, blocker,
                                scenario.wavelength, scenario.ground_anchored});
        }
        if (any)
            per_drop[i] = total;
    });

    LossCdf out;
    out.n_drops = n_drops;
    for (double v : per_drop)
        if (!std::isnan(v))
            out.losses.push_back(v);
    std::sort(out.losses.begin(), out.losses.end());
    return out;
}

} // namespace mmblock::model
