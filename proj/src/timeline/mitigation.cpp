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

void MitigationPolicy::validate() const
{
    if (!(scan_period > 0.0))
        throw std::invalid_argument("mitigation policy: scan_period must be > 0");
    if (!(switch_latency >= 0.0))
        throw std::invalid_argument("mitigation policy: switch_latency must be >= 0");
    if (!(alt_beam_offset >= 0.0))
        throw std::invalid_argument("mitigation policy: alt_beam_offset must be >= 0");
}

double switch_instant(double onset, const MitigationPolicy& policy)
{
    policy.validate();
    const double ready = onset + policy.switch_latency + (policy.scan_discovery ? policy.scan_period : 0.0);
    return std::ceil(ready / policy.scan_period - 1e-9) * policy.scan_period;
}

MitigationResult apply_mitigation(const RssiTrace& trace, std::span<const RfEvent> events,
                                  const MitigationPolicy& policy, double threshold)
{
    policy.validate();
    const double steady = trace.config.steady_rssi;
    const double alt_level = steady - policy.alt_beam_offset;
    const auto& original = trace.samples;

    MitigationResult result;
    result.trace = trace;
    auto& mitigated = result.trace.samples;

    std::size_t contained = 0;
    for (const auto& ev : events) {
        if (ev.end_index >= original.size() || ev.onset_index > ev.minima_index)
            throw std::invalid_argument("apply_mitigation: event does not belong to this trace");

        EventOutcome out;
        out.switch_time = switch_instant(trace.time_at(ev.onset_index), policy);
        // The sample at the switch instant is still measured on the old beam.
        const auto first = static_cast<std::size_t>(
            std::max(0.0, std::floor(out.switch_time / trace.config.sample_period + 1e-9) + 1.0));
        out.switched = first <= ev.end_index;
        for (std::size_t i = first; i <= ev.end_index && i < mitigated.size(); ++i)
            mitigated[i] = std::max(mitigated[i], alt_level);

        double low_orig = steady;
        double low_mit = steady;
        for (std::size_t i = ev.onset_index; i <= ev.end_index; ++i) {
            low_orig = std::min(low_orig, original[i]);
            low_mit = std::min(low_mit, mitigated[i]);
        }
        out.depth_unmitigated = steady - low_orig;
        out.depth_mitigated = steady - low_mit;
        if (out.depth_mitigated < threshold + policy.alt_beam_offset)
            ++contained;
        result.events.push_back(out);
    }
    if (!events.empty())
        result.contained_fraction = static_cast<double>(contained) / static_cast<double>(events.size());
    return result;
}

} // namespace mmblock::timeline
