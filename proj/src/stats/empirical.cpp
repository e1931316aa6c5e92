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
#include <stdexcept>

#include "mmblock/stats.hpp"

namespace mmblock::stats {

EmpiricalSample::EmpiricalSample(std::vector<double> values)
    : values_(std::move(values))
{
    if (values_.empty())
        throw std::invalid_argument("empirical sample: no values");
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("empirical sample: non-finite value");
    std::sort(values_.begin(), values_.end());
}

double EmpiricalSample::cdf(double x) const
{
    const auto above = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(above - values_.begin()) / static_cast<double>(values_.size());
}

double empirical_cdf(const EmpiricalSample& sample, double x)
{
    return sample.cdf(x);
}

double ks_distance(const EmpiricalSample& sample, const LossModel& model)
{
    const auto v = sample.values();
    const double n = static_cast<double>(v.size());
    double worst = 0.0;
    std::size_t i = 0;
    while (i < v.size()) {
        // Step over ties so the pre/post jump levels are those of the distinct value.
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i])
            ++j;
        const double fm = model.cdf(v[i]);
        const double before = static_cast<double>(i) / n;
        const double after = static_cast<double>(j) / n;
        worst = std::max({worst, std::abs(fm - before), std::abs(after - fm)});
        i = j;
    }
    return std::min(worst, 1.0);
}

double weighted_cdf_gap(const std::function<double(double)>& f, const std::function<double(double)>& g,
                        double lo, double hi, double grid_step)
{
    if (!(grid_step > 0.0))
        throw std::invalid_argument("wks: grid_step must be > 0");
    if (!(hi > lo))
        return 0.0;
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / grid_step));
    const double h = (hi - lo) / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double x = lo + h * static_cast<double>(k);
        const double term = std::abs(x) * std::abs(f(x) - g(x));
        sum += (k == 0 || k == n) ? 0.5 * term : term;
    }
    return sum * h;
}

double wks_distance(const EmpiricalSample& sample, const LossModel& model, double grid_step)
{
    if (!(grid_step > 0.0))
        throw std::invalid_argument("wks: grid_step must be > 0");
    const double sd = model.stddev();
    const double lo = sample.min() - 5.0 * sd;
    const double hi = sample.max() + 5.0 * sd;
    if (!(hi > lo))
        return 0.0;

    // Same rule as weighted_cdf_gap, with the data CDF tracked by a cursor
    // instead of a binary search per grid point.
    const auto v = sample.values();
    const double inv_n = 1.0 / static_cast<double>(v.size());
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / grid_step));
    const double h = (hi - lo) / static_cast<double>(n);
    std::size_t cursor = 0;
    double sum = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double x = lo + h * static_cast<double>(k);
        while (cursor < v.size() && v[cursor] <= x)
            ++cursor;
        const double fd = static_cast<double>(cursor) * inv_n;
        const double term = std::abs(x) * std::abs(fd - model.cdf(x));
        sum += (k == 0 || k == n) ? 0.5 * term : term;
    }
    return sum * h;
}

FitReport make_fit_report(const EmpiricalSample& sample, const LossModel& model, double grid_step)
{
    return FitReport{model, ks_distance(sample, model), wks_distance(sample, model, grid_step)};
}

} // namespace mmblock::stats
