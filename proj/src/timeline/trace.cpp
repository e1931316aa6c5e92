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

#include "mmblock/timeline.hpp"

namespace mmblock::timeline {

namespace {

// Samples this close to the steady level count as steady.
constexpr double kLevelSlack = 1e-9;

double attenuation(const ScheduledEvent& e, double t, const TraceConfig& config)
{
    const double u = t - e.onset;
    if (u <= 0.0 || e.depth <= 0.0)
        return 0.0;
    const double ramp = e.degradation_time;
    if (u < ramp)
        return e.depth * u / ramp;
    const double held = ramp + config.hold_time;
    if (u < held)
        return e.depth;
    const double recovery = config.recovery_scale * ramp;
    if (u < held + recovery)
        return e.depth * (1.0 - (u - held) / recovery);
    return 0.0;
}

} // namespace

std::string_view to_string(BlockageType type)
{
    return type == BlockageType::Hand ? "hand" : "body";
}

std::string_view to_string(ChannelCondition condition)
{
    switch (condition) {
    case ChannelCondition::Good:
        return "good";
    case ChannelCondition::GoodToMedium:
        return "good-to-medium";
    case ChannelCondition::Medium:
        return "medium";
    case ChannelCondition::Poor:
        break;
    }
    return "poor";
}

double preset_degradation_median(BlockageType type, ChannelCondition condition)
{
    if (type == BlockageType::Hand)
        return 0.24;
    switch (condition) {
    case ChannelCondition::Good:
        return 0.48;
    case ChannelCondition::GoodToMedium:
        return 0.40;
    case ChannelCondition::Medium:
        return 0.30;
    case ChannelCondition::Poor:
        break;
    }
    return 0.20;
}

double LogNormalByMedian::sample(Rng& rng) const
{
    return std::lognormal_distribution<double>(std::log(median), log_sigma)(rng);
}

void TraceConfig::validate() const
{
    if (!(sample_period > 0.0))
        throw std::invalid_argument("trace config: sample_period must be > 0");
    if (!(duration > 0.0))
        throw std::invalid_argument("trace config: duration must be > 0");
    if (!(event_rate >= 0.0))
        throw std::invalid_argument("trace config: event_rate must be >= 0");
    if (!(hand_fraction >= 0.0 && hand_fraction <= 1.0))
        throw std::invalid_argument("trace config: hand_fraction must lie in [0, 1]");
    if (!(hold_time >= 0.0))
        throw std::invalid_argument("trace config: hold_time must be >= 0");
    if (!(recovery_scale > 0.0))
        throw std::invalid_argument("trace config: recovery_scale must be > 0");
    if (!(hand_degradation.median > 0.0 && body_degradation.median > 0.0))
        throw std::invalid_argument("trace config: degradation medians must be > 0");
    if (!(hand_degradation.log_sigma >= 0.0 && body_degradation.log_sigma >= 0.0))
        throw std::invalid_argument("trace config: degradation spreads must be >= 0");
}

std::size_t TraceConfig::sample_count() const
{
    return static_cast<std::size_t>(std::ceil(duration / sample_period - 1e-9));
}

std::vector<ScheduledEvent> draw_schedule(const TraceConfig& config, Rng& rng)
{
    config.validate();
    std::vector<ScheduledEvent> events;
    if (config.event_rate <= 0.0)
        return events;
    std::exponential_distribution<double> gap(config.event_rate);
    double t = 0.0;
    while (true) {
        t += gap(rng);
        if (t >= config.duration)
            break;
        ScheduledEvent e;
        e.onset = t;
        e.type = uniform01(rng) < config.hand_fraction ? BlockageType::Hand : BlockageType::Body;
        const bool hand = e.type == BlockageType::Hand;
        e.depth = std::max(0.0, (hand ? config.hand_loss : config.body_loss).sample(rng));
        e.degradation_time = (hand ? config.hand_degradation : config.body_degradation).sample(rng);
        events.push_back(e);
    }
    return events;
}

RssiTrace synthesize_trace(const TraceConfig& config, std::span<const ScheduledEvent> events)
{
    config.validate();
    RssiTrace trace;
    trace.config = config;
    const std::size_t n = config.sample_count();
    std::vector<double> total(n, 0.0);
    for (const auto& e : events) {
        if (!(e.degradation_time > 0.0) || !(e.depth >= 0.0))
            throw std::invalid_argument("synthesize_trace: events need degradation_time > 0 and depth >= 0");
        const double end = e.onset + e.degradation_time * (1.0 + config.recovery_scale) + config.hold_time;
        const double first = std::max(0.0, std::floor(e.onset / config.sample_period));
        const double last = std::min(static_cast<double>(n) - 1.0, std::ceil(end / config.sample_period));
        for (double k = first; k <= last; k += 1.0) {
            const auto i = static_cast<std::size_t>(k);
            const double a = attenuation(e, trace.time_at(i), config);
            total[i] = config.composition == Composition::SumDb ? total[i] + a : std::max(total[i], a);
        }
    }
    trace.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        trace.samples[i] = config.steady_rssi - total[i];
    return trace;
}

RssiTrace synthesize_trace(const TraceConfig& config, std::uint64_t seed)
{
    Rng rng(seed);
    const auto events = draw_schedule(config, rng);
    RssiTrace trace = synthesize_trace(config, events);
    trace.seed = seed;
    return trace;
}

std::vector<RfEvent> detect_rf_events(const RssiTrace& trace, double threshold)
{
    const auto& x = trace.samples;
    if (x.empty())
        throw std::invalid_argument("detect_rf_events: empty trace");
    const double steady = trace.config.steady_rssi;
    const double floor = steady - threshold + kLevelSlack;
    auto at_steady = [&](std::size_t i) { return x[i] >= steady - kLevelSlack; };

    std::vector<RfEvent> events;
    std::size_t i = 0;
    while (i < x.size()) {
        if (x[i] > floor) {
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end + 1 < x.size() && x[run_end + 1] <= floor)
            ++run_end;

        RfEvent ev;
        ev.minima_index = i;
        for (std::size_t k = i; k <= run_end; ++k)
            if (x[k] < x[ev.minima_index])
                ev.minima_index = k;

        ev.onset_index = 0;
        for (std::size_t k = ev.minima_index; k-- > 0;) {
            if (at_steady(k)) {
                ev.onset_index = k;
                break;
            }
        }
        ev.end_index = x.size() - 1;
        for (std::size_t k = ev.minima_index + 1; k < x.size(); ++k) {
            if (at_steady(k)) {
                ev.end_index = k - 1;
                break;
            }
        }
        ev.depth = steady - x[ev.minima_index];
        ev.degradation_time = static_cast<double>(ev.minima_index - ev.onset_index) * trace.config.sample_period;
        events.push_back(ev);
        i = run_end + 1;
    }
    return events;
}

double DegradationCdf::empirical(double t) const
{
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    return static_cast<double>(it - times.begin()) / static_cast<double>(times.size());
}

double DegradationCdf::interpolated(double t) const
{
    if (t < times.front())
        return 0.0;
    if (t >= times.back())
        return 1.0;
    const auto hi = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
    const std::size_t lo = hi - 1;
    const double span = times[hi] - times[lo];
    if (span <= 0.0)
        return cdf[hi];
    return cdf[lo] + (cdf[hi] - cdf[lo]) * (t - times[lo]) / span;
}

double DegradationCdf::quantile(double p) const
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("degradation cdf: p must lie in [0, 1]");
    if (p <= cdf.front())
        return times.front();
    const auto hi = static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), p) - cdf.begin());
    const std::size_t lo = hi - 1;
    return times[lo] + (times[hi] - times[lo]) * (p - cdf[lo]) / (cdf[hi] - cdf[lo]);
}

DegradationCdf degradation_time_cdf(std::vector<double> degradation_times)
{
    if (degradation_times.empty())
        throw std::invalid_argument("degradation_time_cdf: no RF events");
    std::sort(degradation_times.begin(), degradation_times.end());
    DegradationCdf out;
    out.times = std::move(degradation_times);
    const double n = static_cast<double>(out.times.size());
    out.cdf.resize(out.times.size());
    for (std::size_t i = 0; i < out.cdf.size(); ++i)
        out.cdf[i] = static_cast<double>(i + 1) / n;
    return out;
}

DegradationCdf degradation_time_cdf(std::span<const RssiTrace> traces, double threshold)
{
    std::vector<double> times;
    for (const auto& trace : traces)
        for (const auto& ev : detect_rf_events(trace, threshold))
            times.push_back(ev.degradation_time);
    return degradation_time_cdf(std::move(times));
}

} // namespace mmblock::timeline
