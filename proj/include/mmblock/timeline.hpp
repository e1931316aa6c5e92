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
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mmblock/rng.hpp"
#include "mmblock/stats.hpp"

namespace mmblock::timeline {

enum class BlockageType { Hand, Body };
enum class ChannelCondition { Good, GoodToMedium, Medium, Poor };

std::string_view to_string(BlockageType type);
std::string_view to_string(ChannelCondition condition);

/// Median link degradation time (s) used as the default for a blockage type
/// and channel condition. Body medians run from 0.48 s (good) to 0.2 s (poor);
/// hand blockage uses 0.24 s throughout.
double preset_degradation_median(BlockageType type, ChannelCondition condition);

/// Lognormal distribution parameterized by its median and log-space spread.
struct LogNormalByMedian {
    double median = 0.24;
    double log_sigma = 0.5;

    double sample(Rng& rng) const;
};

/// How simultaneous events combine.
enum class Composition {
    DeepestWins, // dB-min of the per-event RSSI
    SumDb,
};

struct TraceConfig {
    double steady_rssi = -60.0; // dB
    double sample_period = 1e-3;
    double duration = 10.0;
    double event_rate = 0.2; // events per second
    double hand_fraction = 0.5;
    stats::LossModel hand_loss = stats::LossModel::gaussian(15.3, 3.8);
    stats::LossModel body_loss = stats::LossModel::gaussian(8.5, 2.5);
    LogNormalByMedian hand_degradation{0.24, 0.5};
    LogNormalByMedian body_degradation{0.30, 0.5};
    double hold_time = 0.5;
    /// Recovery ramp duration as a multiple of the degradation time.
    double recovery_scale = 1.0;
    Composition composition = Composition::DeepestWins;

    void validate() const;
    std::size_t sample_count() const;
};

struct ScheduledEvent {
    double onset = 0.0;            // s
    double depth = 0.0;            // dB below steady state
    double degradation_time = 0.0; // s, onset to minimum
    BlockageType type = BlockageType::Body;
};

struct RssiTrace {
    std::vector<double> samples; // dB, sample i at t = i * sample_period
    TraceConfig config;
    std::uint64_t seed = 0;

    double time_at(std::size_t i) const { return static_cast<double>(i) * config.sample_period; }
};

/// Poisson arrivals over the trace duration. Negative loss draws are clipped to 0.
std::vector<ScheduledEvent> draw_schedule(const TraceConfig& config, Rng& rng);

/// Linear dB ramp down over the degradation time, hold, then linear recovery.
RssiTrace synthesize_trace(const TraceConfig& config, std::span<const ScheduledEvent> events);

/// Draws the schedule from `seed`, then synthesizes.
RssiTrace synthesize_trace(const TraceConfig& config, std::uint64_t seed);

struct RfEvent {
    std::size_t onset_index = 0;  // last steady-state sample before the minimum
    std::size_t minima_index = 0; // first sample at the excursion minimum
    std::size_t end_index = 0;    // last sample before the RSSI is back at steady state
    double depth = 0.0;           // dB
    double degradation_time = 0.0; // s
};

inline constexpr double kRfEventThreshold = 2.0;

/// Maximal excursions at least `threshold` dB below the steady state.
std::vector<RfEvent> detect_rf_events(const RssiTrace& trace, double threshold = kRfEventThreshold);

/// Empirical CDF of degradation times with the piecewise-linear interpolant
/// through its sample points.
struct DegradationCdf {
    std::vector<double> times; // ascending
    std::vector<double> cdf;   // i/N at times[i-1]

    double empirical(double t) const;
    double interpolated(double t) const;
    /// Inverse of the piecewise-linear interpolant.
    double quantile(double p) const;
};

/// Throws std::invalid_argument when no degradation times are given.
DegradationCdf degradation_time_cdf(std::vector<double> degradation_times);

DegradationCdf degradation_time_cdf(std::span<const RssiTrace> traces, double threshold = kRfEventThreshold);

struct MitigationPolicy {
    double scan_period = 0.040;
    double switch_latency = 0.001;
    double alt_beam_offset = 3.0; // dB below steady state on the alternative beam
    /// When true the alternative beam is known only after one full scan
    /// period following the onset; otherwise immediately.
    bool scan_discovery = true;

    void validate() const;
};

struct EventOutcome {
    double depth_unmitigated = 0.0; // dB below steady state
    double depth_mitigated = 0.0;
    double switch_time = 0.0;       // s
    bool switched = false;          // switch landed before the event ended
};

struct MitigationResult {
    RssiTrace trace;
    std::vector<EventOutcome> events;
    /// Share of events whose experienced depth stays below threshold + alt_beam_offset.
    double contained_fraction = 1.0;
};

/// Effective switch instant for an event starting at `onset`: the first scan
/// boundary at or after onset + switch_latency (+ one scan period with
/// scan discovery).
double switch_instant(double onset, const MitigationPolicy& policy);

/// Samples after the switch instant, up to the event end, are raised to the
/// alternative beam level.
MitigationResult apply_mitigation(const RssiTrace& trace, std::span<const RfEvent> events,
                                  const MitigationPolicy& policy, double threshold = kRfEventThreshold);

} // namespace mmblock::timeline
