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

#include "mmblock/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mmblock::stats {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_gaussian(const GaussianParams& g)
{
    if (!(g.sigma > 0.0) || !std::isfinite(g.sigma) || !std::isfinite(g.mu))
        throw std::invalid_argument("gaussian: sigma must be > 0 (got " + std::to_string(g.sigma) + ")");
}

void check_weibull(const WeibullParams& w)
{
    if (!(w.alpha > 0.0) || !std::isfinite(w.alpha))
        throw std::invalid_argument("weibull: alpha must be > 0 (got " + std::to_string(w.alpha) + ")");
    if (!(w.beta > 0.0) || !std::isfinite(w.beta))
        throw std::invalid_argument("weibull: beta must be > 0 (got " + std::to_string(w.beta) + ")");
}

void check_weight(double p1)
{
    if (!(p1 >= 0.0 && p1 <= 1.0))
        throw std::invalid_argument("mixture: p1 must lie in [0, 1] (got " + std::to_string(p1) + ")");
}

double gauss_pdf(const GaussianParams& g, double x)
{
    const double z = (x - g.mu) / g.sigma;
    return std::exp(-0.5 * z * z) / (g.sigma * std::sqrt(2.0 * std::numbers::pi));
}

double gauss_cdf(const GaussianParams& g, double x)
{
    return normal_cdf((x - g.mu) / g.sigma);
}

double weib_pdf(const WeibullParams& w, double x)
{
    if (x < 0.0)
        return 0.0;
    if (x == 0.0) {
        if (w.beta > 1.0)
            return 0.0;
        if (w.beta == 1.0)
            return 1.0 / w.alpha;
        return std::numeric_limits<double>::infinity();
    }
    const double t = x / w.alpha;
    return (w.beta / w.alpha) * std::pow(t, w.beta - 1.0) * std::exp(-std::pow(t, w.beta));
}

double weib_cdf(const WeibullParams& w, double x)
{
    if (x <= 0.0)
        return 0.0;
    return -std::expm1(-std::pow(x / w.alpha, w.beta));
}

double weib_mean(const WeibullParams& w)
{
    return w.alpha * std::tgamma(1.0 + 1.0 / w.beta);
}

double weib_var(const WeibullParams& w)
{
    const double g1 = std::tgamma(1.0 + 1.0 / w.beta);
    const double g2 = std::tgamma(1.0 + 2.0 / w.beta);
    return w.alpha * w.alpha * (g2 - g1 * g1);
}

// Second moment about the origin.
double raw_m2(double mean, double var)
{
    return var + mean * mean;
}

double sample_gauss(const GaussianParams& g, Rng& rng)
{
    return std::normal_distribution<double>(g.mu, g.sigma)(rng);
}

double sample_weib(const WeibullParams& w, Rng& rng)
{
    return std::weibull_distribution<double>(w.beta, w.alpha)(rng);
}

bool pick_first(double p1, Rng& rng)
{
    return uniform01(rng) < p1;
}

} // namespace

double normal_cdf(double z) noexcept
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

LossModel::LossModel(Params params)
    : params_(std::move(params))
{
    std::visit(overloaded{
                   [](const GaussianParams& g) { check_gaussian(g); },
                   [](const WeibullParams& w) { check_weibull(w); },
                   [](const GaussianMixtureParams& m) {
                       check_weight(m.p1);
                       check_gaussian(m.comp1);
                       check_gaussian(m.comp2);
                   },
                   [](const GaussianWeibullMixtureParams& m) {
                       check_weight(m.p1);
                       check_gaussian(m.gauss);
                       check_weibull(m.weib);
                   },
               },
               params_);
}

LossModel LossModel::gaussian(double mu, double sigma)
{
    return LossModel(GaussianParams{mu, sigma});
}

LossModel LossModel::weibull(double alpha, double beta)
{
    return LossModel(WeibullParams{alpha, beta});
}

LossModel LossModel::gaussian_mixture(double p1, double mu1, double sigma1, double mu2, double sigma2)
{
    return LossModel(GaussianMixtureParams{p1, {mu1, sigma1}, {mu2, sigma2}});
}

LossModel LossModel::gaussian_weibull(double p1, double mu, double sigma, double alpha, double beta)
{
    return LossModel(GaussianWeibullMixtureParams{p1, {mu, sigma}, {alpha, beta}});
}

std::string_view LossModel::family() const noexcept
{
    return std::visit(overloaded{
                          [](const GaussianParams&) { return std::string_view("gaussian"); },
                          [](const WeibullParams&) { return std::string_view("weibull"); },
                          [](const GaussianMixtureParams&) { return std::string_view("gmm"); },
                          [](const GaussianWeibullMixtureParams&) { return std::string_view("gw"); },
                      },
                      params_);
}

double LossModel::pdf(double x) const
{
    return std::visit(overloaded{
                          [x](const GaussianParams& g) { return gauss_pdf(g, x); },
                          [x](const WeibullParams& w) { return weib_pdf(w, x); },
                          [x](const GaussianMixtureParams& m) {
                              return m.p1 * gauss_pdf(m.comp1, x) + (1.0 - m.p1) * gauss_pdf(m.comp2, x);
                          },
                          [x](const GaussianWeibullMixtureParams& m) {
                              return m.p1 * gauss_pdf(m.gauss, x) + (1.0 - m.p1) * weib_pdf(m.weib, x);
                          },
                      },
                      params_);
}

double LossModel::cdf(double x) const
{
    return std::visit(overloaded{
                          [x](const GaussianParams& g) { return gauss_cdf(g, x); },
                          [x](const WeibullParams& w) { return weib_cdf(w, x); },
                          [x](const GaussianMixtureParams& m) {
                              return m.p1 * gauss_cdf(m.comp1, x) + (1.0 - m.p1) * gauss_cdf(m.comp2, x);
                          },
                          [x](const GaussianWeibullMixtureParams& m) {
                              return m.p1 * gauss_cdf(m.gauss, x) + (1.0 - m.p1) * weib_cdf(m.weib, x);
                          },
                      },
                      params_);
}

double LossModel::sample(Rng& rng) const
{
    return std::visit(overloaded{
                          [&rng](const GaussianParams& g) { return sample_gauss(g, rng); },
                          [&rng](const WeibullParams& w) { return sample_weib(w, rng); },
                          [&rng](const GaussianMixtureParams& m) {
                              return pick_first(m.p1, rng) ? sample_gauss(m.comp1, rng)
                                                           : sample_gauss(m.comp2, rng);
                          },
                          [&rng](const GaussianWeibullMixtureParams& m) {
                              return pick_first(m.p1, rng) ? sample_gauss(m.gauss, rng)
                                                           : sample_weib(m.weib, rng);
                          },
                      },
                      params_);
}

double LossModel::mean() const
{
    return std::visit(overloaded{
                          [](const GaussianParams& g) { return g.mu; },
                          [](const WeibullParams& w) { return weib_mean(w); },
                          [](const GaussianMixtureParams& m) {
                              return m.p1 * m.comp1.mu + (1.0 - m.p1) * m.comp2.mu;
                          },
                          [](const GaussianWeibullMixtureParams& m) {
                              return m.p1 * m.gauss.mu + (1.0 - m.p1) * weib_mean(m.weib);
                          },
                      },
                      params_);
}

double LossModel::stddev() const
{
    const double mu = mean();
    const double m2 = std::visit(
        overloaded{
            [](const GaussianParams& g) { return raw_m2(g.mu, g.sigma * g.sigma); },
            [](const WeibullParams& w) { return raw_m2(weib_mean(w), weib_var(w)); },
            [](const GaussianMixtureParams& m) {
                return m.p1 * raw_m2(m.comp1.mu, m.comp1.sigma * m.comp1.sigma)
                       + (1.0 - m.p1) * raw_m2(m.comp2.mu, m.comp2.sigma * m.comp2.sigma);
            },
            [](const GaussianWeibullMixtureParams& m) {
                return m.p1 * raw_m2(m.gauss.mu, m.gauss.sigma * m.gauss.sigma)
                       + (1.0 - m.p1) * raw_m2(weib_mean(m.weib), weib_var(m.weib));
            },
        },
        params_);
    return std::sqrt(std::max(m2 - mu * mu, 0.0));
}

double LossModel::quantile(double p) const
{
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("quantile: p must lie in (0, 1)");
    if (const auto* w = std::get_if<WeibullParams>(&params_))
        return w->alpha * std::pow(-std::log1p(-p), 1.0 / w->beta);

    const double mu = mean();
    const double sd = std::max(stddev(), 1e-12);
    double lo = mu - 10.0 * sd;
    double hi = mu + 10.0 * sd;
    while (cdf(lo) > p)
        lo -= 10.0 * sd;
    while (cdf(hi) < p)
        hi += 10.0 * sd;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(mu)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace mmblock::stats
