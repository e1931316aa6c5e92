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
#include <functional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mmblock/rng.hpp"

namespace mmblock::stats {

// All losses are in dB.

struct GaussianParams {
    double mu = 0.0;
    double sigma = 1.0;
};

/// Weibull with scale `alpha` (dB) and shape `beta`.
struct WeibullParams {
    double alpha = 1.0;
    double beta = 1.0;
};

/// p1 * N(comp1) + (1 - p1) * N(comp2)
struct GaussianMixtureParams {
    double p1 = 0.5;
    GaussianParams comp1;
    GaussianParams comp2;
};

/// p1 * N(gauss) + (1 - p1) * W(weib)
struct GaussianWeibullMixtureParams {
    double p1 = 0.5;
    GaussianParams gauss;
    WeibullParams weib;
};

/// One of the four blockage-loss families. Parameters are validated on
/// construction, so every LossModel in existence is well formed.
class LossModel {
public:
    using Params = std::variant<GaussianParams, WeibullParams, GaussianMixtureParams,
                                GaussianWeibullMixtureParams>;

    /// Throws std::invalid_argument on sigma <= 0, alpha <= 0, beta <= 0 or
    /// p1 outside [0, 1].
    explicit LossModel(Params params);

    static LossModel gaussian(double mu, double sigma);
    static LossModel weibull(double alpha, double beta);
    static LossModel gaussian_mixture(double p1, double mu1, double sigma1, double mu2, double sigma2);
    static LossModel gaussian_weibull(double p1, double mu, double sigma, double alpha, double beta);

    const Params& params() const noexcept { return params_; }

    /// Short family name: "gaussian", "weibull", "gmm" or "gw".
    std::string_view family() const noexcept;

    double pdf(double x) const;
    double cdf(double x) const;
    double sample(Rng& rng) const;

    double mean() const;
    double stddev() const;

    /// Inverse CDF by bracketed bisection; exact closed forms where available.
    double quantile(double p) const;

private:
    Params params_;
};

double normal_cdf(double z) noexcept;

/// Sorted, nonempty sample of loss values.
class EmpiricalSample {
public:
    /// Sorts `values`. Throws std::invalid_argument when empty or non-finite.
    explicit EmpiricalSample(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double min() const noexcept { return values_.front(); }
    double max() const noexcept { return values_.back(); }

    /// Right-continuous step CDF: (#values <= x) / N.
    double cdf(double x) const;

private:
    std::vector<double> values_;
};

double empirical_cdf(const EmpiricalSample& sample, double x);

/// Exact sup |F_data - F_model|, checking both sides of every jump.
double ks_distance(const EmpiricalSample& sample, const LossModel& model);

inline constexpr double kDefaultWksStep = 0.01;

/// Trapezoidal integral of |x| * |F_data(x) - F_model(x)| over
/// [min - 5 sd, max + 5 sd], sd being the model's standard deviation.
double wks_distance(const EmpiricalSample& sample, const LossModel& model,
                    double grid_step = kDefaultWksStep);

/// Trapezoidal integral of |x| * |f(x) - g(x)| on [lo, hi]; the step is
/// shrunk so it divides the interval evenly.
double weighted_cdf_gap(const std::function<double(double)>& f, const std::function<double(double)>& g,
                        double lo, double hi, double grid_step);

struct FitReport {
    LossModel model;
    double d_ks;
    double d_wks;
};

FitReport make_fit_report(const EmpiricalSample& sample, const LossModel& model,
                          double grid_step = kDefaultWksStep);

// -- fitting ---------------------------------------------------------------

enum class SdConvention { Population, Sample };

/// Empirical mean and standard deviation. Population convention (divisor N)
/// by default. Sigma is raised to `sigma_floor` for constant data.
GaussianParams fit_gaussian(const EmpiricalSample& sample,
                            SdConvention convention = SdConvention::Population,
                            double sigma_floor = 1e-6);

struct WeibullFit {
    WeibullParams params;
    bool beta_capped = false;
    int iterations = 0;
};

inline constexpr double kWeibullBetaCap = 500.0;

/// Maximum-likelihood Weibull fit. The shape solves the profile-likelihood
/// score equation; the scale follows in closed form.
WeibullFit fit_weibull(const EmpiricalSample& sample);

struct EmOptions {
    int k_max = 500;
    double variance_floor = 1e-6;
    /// Stop once the log-likelihood gain of an iteration falls below this.
    double tolerance = 1e-10;
};

struct EmResult {
    GaussianMixtureParams params;
    /// Log-likelihood of the initialization followed by one entry per update.
    std::vector<double> log_likelihood;
    int iterations = 0;
};

/// Two-component Gaussian mixture by expectation maximization, initialized
/// at p1 = 0.5, means at the sample extremes and the pooled variance.
EmResult fit_gaussian_mixture(const EmpiricalSample& sample, const EmOptions& options = {});

double gaussian_mixture_log_likelihood(const EmpiricalSample& sample, const GaussianMixtureParams& params);

struct GwSearchOptions {
    double grid_step = kDefaultWksStep;
    double p1_step = 0.05;
    double location_step = 0.1; // mu, sigma and alpha
    double shape_step = 0.05;   // beta
    double min_step = 1e-3;
    int max_rounds = 100000;
};

struct GwFit {
    GaussianWeibullMixtureParams params;
    double d_wks = 0.0;
    int evaluations = 0;
};

/// Pattern search for the Gaussian-Weibull mixture minimizing the WKS distance.
/// Starts from p1 = 0.5 with the given components; the result never has a
/// larger WKS distance than either pure initializer.
GwFit fit_gw_mixture(const EmpiricalSample& sample, const GaussianParams& init_gauss,
                     const WeibullParams& init_weib, const GwSearchOptions& options = {});

} // namespace mmblock::stats
