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
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mmblock/errors.hpp"
#include "mmblock/stats.hpp"

namespace mmblock::stats {

GaussianParams fit_gaussian(const EmpiricalSample& sample, SdConvention convention, double sigma_floor)
{
    const auto v = sample.values();
    if (v.size() < 2)
        throw std::invalid_argument("fit_gaussian: need at least 2 values");
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    const double divisor = convention == SdConvention::Population ? static_cast<double>(v.size())
                                                                  : static_cast<double>(v.size() - 1);
    return GaussianParams{mean, std::max(std::sqrt(ss / divisor), sigma_floor)};
}

// ---------------------------------------------------------------------------
// Weibull MLE

namespace {

// Profile score for the shape on data scaled to max 1:
//   g(b) = sum y^b ln y / sum y^b - 1/b - mean(ln y)
// g is strictly increasing; its root is the MLE shape.
struct WeibullScore {
    std::span<const double> log_y;
    double mean_log;

    void eval(double b, double& g, double& dg) const
    {
        double s0 = 0.0;
        double s1 = 0.0;
        double s2 = 0.0;
        for (double ly : log_y) {
            const double w = std::exp(b * ly);
            s0 += w;
            s1 += w * ly;
            s2 += w * ly * ly;
        }
        const double m1 = s1 / s0;
        g = m1 - 1.0 / b - mean_log;
        dg = (s2 / s0 - m1 * m1) + 1.0 / (b * b);
    }
};

} // namespace

WeibullFit fit_weibull(const EmpiricalSample& sample)
{
    const auto v = sample.values();
    if (v.size() < 2)
        throw std::invalid_argument("fit_weibull: need at least 2 values");
    if (!(v.front() > 0.0))
        throw std::invalid_argument("fit_weibull: data must be strictly positive (min " + std::to_string(v.front())
                                    + ")");

    const double scale = v.back();
    std::vector<double> log_y(v.size());
    double mean_log = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        log_y[i] = std::log(v[i] / scale);
        mean_log += log_y[i];
    }
    mean_log /= static_cast<double>(v.size());

    const WeibullScore score{log_y, mean_log};
    auto alpha_for = [&](double b) {
        double s0 = 0.0;
        for (double ly : log_y)
            s0 += std::exp(b * ly);
        return scale * std::pow(s0 / static_cast<double>(log_y.size()), 1.0 / b);
    };

    WeibullFit fit;
    double g = 0.0;
    double dg = 0.0;

    // Bracket the root. g -> -inf as b -> 0.
    double lo = 1e-3;
    double hi = 1.0;
    score.eval(hi, g, dg);
    while (g < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi >= kWeibullBetaCap) {
            score.eval(kWeibullBetaCap, g, dg);
            if (g < 0.0) {
                fit.params = {alpha_for(kWeibullBetaCap), kWeibullBetaCap};
                fit.beta_capped = true;
                return fit;
            }
            hi = kWeibullBetaCap;
            break;
        }
        score.eval(hi, g, dg);
    }

    // Newton with bisection fallback.
    double b = 0.5 * (lo + hi);
    constexpr int kMaxIterations = 200;
    for (int it = 1; it <= kMaxIterations; ++it) {
        score.eval(b, g, dg);
        fit.iterations = it;
        if (g > 0.0)
            hi = b;
        else
            lo = b;
        double next = b - g / dg;
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (std::abs(next - b) <= 1e-12 * b || hi - lo <= 1e-12 * b) {
            b = next;
            fit.params = {alpha_for(b), b};
            return fit;
        }
        b = next;
    }
    throw ConvergenceError("fit_weibull: shape did not converge after " + std::to_string(kMaxIterations)
                           + " iterations (bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "])");
}

// ---------------------------------------------------------------------------
// EM for a two-component Gaussian mixture

namespace {

double log_normal_density(double x, double mu, double var)
{
    return -0.5 * std::log(2.0 * std::numbers::pi * var) - (x - mu) * (x - mu) / (2.0 * var);
}

double log_add(double a, double b)
{
    if (a == -INFINITY)
        return b;
    if (b == -INFINITY)
        return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double safe_log(double p)
{
    return p > 0.0 ? std::log(p) : -INFINITY;
}

} // namespace

double gaussian_mixture_log_likelihood(const EmpiricalSample& sample, const GaussianMixtureParams& params)
{
    const double lp1 = safe_log(params.p1);
    const double lp2 = safe_log(1.0 - params.p1);
    const double v1 = params.comp1.sigma * params.comp1.sigma;
    const double v2 = params.comp2.sigma * params.comp2.sigma;
    double ll = 0.0;
    for (double y : sample.values())
        ll += log_add(lp1 + log_normal_density(y, params.comp1.mu, v1), lp2 + log_normal_density(y, params.comp2.mu, v2));
    return ll;
}

EmResult fit_gaussian_mixture(const EmpiricalSample& sample, const EmOptions& options)
{
    const auto y = sample.values();
    const std::size_t n = y.size();
    if (n < 4)
        throw std::invalid_argument("fit_gaussian_mixture: need at least 4 values");
    if (options.k_max < 0)
        throw std::invalid_argument("fit_gaussian_mixture: k_max must be >= 0");

    double mean = 0.0;
    for (double v : y)
        mean += v;
    mean /= static_cast<double>(n);
    double pooled = 0.0;
    for (double v : y)
        pooled += (v - mean) * (v - mean);
    pooled = std::max(pooled / static_cast<double>(n), options.variance_floor);

    double p1 = 0.5;
    double mu1 = sample.min();
    double mu2 = sample.max();
    double var1 = pooled;
    double var2 = pooled;

    auto snapshot = [&] {
        return GaussianMixtureParams{p1, {mu1, std::sqrt(var1)}, {mu2, std::sqrt(var2)}};
    };

    EmResult result;
    result.params = snapshot();
    result.log_likelihood.push_back(gaussian_mixture_log_likelihood(sample, result.params));

    std::vector<double> gamma(n);
    for (int k = 0; k < options.k_max; ++k) {
        // E-step: responsibility of component 1.
        const double lp1 = safe_log(p1);
        const double lp2 = safe_log(1.0 - p1);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = lp1 + log_normal_density(y[i], mu1, var1);
            const double b = lp2 + log_normal_density(y[i], mu2, var2);
            gamma[i] = std::exp(a - log_add(a, b));
        }

        // M-step.
        double g_sum = 0.0;
        double g_y = 0.0;
        double h_y = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            g_sum += gamma[i];
            g_y += gamma[i] * y[i];
            h_y += (1.0 - gamma[i]) * y[i];
        }
        const double h_sum = static_cast<double>(n) - g_sum;
        if (g_sum > 0.0)
            mu1 = g_y / g_sum;
        if (h_sum > 0.0)
            mu2 = h_y / h_sum;
        double g_ss = 0.0;
        double h_ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            g_ss += gamma[i] * (y[i] - mu1) * (y[i] - mu1);
            h_ss += (1.0 - gamma[i]) * (y[i] - mu2) * (y[i] - mu2);
        }
        if (g_sum > 0.0)
            var1 = std::max(g_ss / g_sum, options.variance_floor);
        if (h_sum > 0.0)
            var2 = std::max(h_ss / h_sum, options.variance_floor);
        p1 = g_sum / static_cast<double>(n);

        result.params = snapshot();
        result.iterations = k + 1;
        const double ll = gaussian_mixture_log_likelihood(sample, result.params);
        const double gain = ll - result.log_likelihood.back();
        result.log_likelihood.push_back(ll);
        if (gain < options.tolerance)
            break;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Gaussian-Weibull mixture by pattern search on the WKS distance

namespace {

using GwVector = std::array<double, 5>; // p1, mu, sigma, alpha, beta

bool admissible(const GwVector& t)
{
    return t[0] >= 0.0 && t[0] <= 1.0 && t[2] > 0.0 && t[3] > 0.0 && t[4] > 0.0;
}

GaussianWeibullMixtureParams to_params(const GwVector& t)
{
    return GaussianWeibullMixtureParams{t[0], {t[1], t[2]}, {t[3], t[4]}};
}

struct GwObjective {
    const EmpiricalSample& sample;
    double grid_step;
    int evaluations = 0;

    double operator()(const GwVector& t)
    {
        ++evaluations;
        return wks_distance(sample, LossModel(to_params(t)), grid_step);
    }
};

GwVector pattern_search(GwVector x, double& fx, GwObjective& objective, const GwSearchOptions& opt)
{
    GwVector step = {opt.p1_step, opt.location_step, opt.location_step, opt.location_step, opt.shape_step};
    auto all_small = [&] {
        return std::all_of(step.begin(), step.end(), [&](double s) { return s < opt.min_step; });
    };
    for (int round = 0; round < opt.max_rounds && !all_small(); ++round) {
        bool improved = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (double dir : {1.0, -1.0}) {
                GwVector trial = x;
                trial[i] += dir * step[i];
                if (!admissible(trial))
                    continue;
                const double f = objective(trial);
                if (f < fx) {
                    x = trial;
                    fx = f;
                    improved = true;
                    break;
                }
            }
        }
        if (!improved)
            for (double& s : step)
                s *= 0.5;
    }
    return x;
}

} // namespace

GwFit fit_gw_mixture(const EmpiricalSample& sample, const GaussianParams& init_gauss,
                     const WeibullParams& init_weib, const GwSearchOptions& options)
{
    // Validates the initializers.
    LossModel(GaussianWeibullMixtureParams{0.5, init_gauss, init_weib});

    GwObjective objective{sample, options.grid_step};
    const GwVector mid = {0.5, init_gauss.mu, init_gauss.sigma, init_weib.alpha, init_weib.beta};
    GwVector pure_gauss = mid;
    pure_gauss[0] = 1.0;
    GwVector pure_weib = mid;
    pure_weib[0] = 0.0;
    const double f_gauss = objective(pure_gauss);
    const double f_weib = objective(pure_weib);

    double f_best = objective(mid);
    GwVector best = pattern_search(mid, f_best, objective, options);

    // The half-and-half start can settle in a shallow basin. Restart from
    // other mixing weights and from the better pure initializer.
    std::vector<GwVector> starts;
    for (double p1 : {0.1, 0.3, 0.7, 0.9}) {
        GwVector start = mid;
        start[0] = p1;
        starts.push_back(start);
    }
    starts.push_back(f_gauss <= f_weib ? pure_gauss : pure_weib);
    for (const auto& start : starts) {
        double f_alt = objective(start);
        const GwVector alt = pattern_search(start, f_alt, objective, options);
        if (f_alt < f_best) {
            best = alt;
            f_best = f_alt;
        }
    }

    return GwFit{to_params(best), f_best, objective.evaluations};
}

} // namespace mmblock::stats
