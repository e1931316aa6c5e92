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
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mmblock/blockage_model.hpp"
#include "mmblock/geometry.hpp"
#include "mmblock/stats.hpp"
#include "mmblock/timeline.hpp"

namespace mmblock::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitConvergence = 3;

/// Invalid scenario file, flag or dataset. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GeometryCell {
    double lambda = 4.0;
    double d_min = 3.0;
    double d_max = 10.0;
};

struct GeometrySection {
    geometry::BlockerSpec spec;
    std::vector<GeometryCell> cells;
    double theta_o = 90.0;
    geometry::OverlapRule overlap = geometry::OverlapRule::Merge;

    geometry::DropConfig drop_config(const GeometryCell& cell) const;
};

struct ModelSection {
    model::BlockageScenario scenario;
    double grid_step = 5.0; // degrees, attenuation grid of `map`
};

struct DkedSection {
    double tr_distance = 20.5;
    double tx_height = 1.0;
    double rx_height = 1.0;
    double wavelength = model::kSpeedOfLight / 28e9;
    bool ground_anchored = true;
};

struct TimelineSection {
    timeline::TraceConfig config;
    std::size_t n_traces = 1;
    double threshold = timeline::kRfEventThreshold;
    std::optional<timeline::MitigationPolicy> mitigation;
};

struct SampleSection {
    stats::LossModel model = model::hand_loss(model::LossComplexity::Low);
    std::size_t n = 1000;
};

struct FitSection {
    std::string dataset;
    std::string model = "gaussian";
    stats::SdConvention sd = stats::SdConvention::Population;
    double wks_step = stats::kDefaultWksStep;
};

struct RunSection {
    std::uint64_t seed = 1;
    std::size_t n_drops = 10000;
    std::vector<double> percentiles{50.0, 90.0, 95.0};
    std::vector<int> top_k{2, 3, 4, 5, 6};
    std::string out;
    int workers = 1;
};

/// Validated scenario. `document` is the JSON the sections were read from,
/// after command-line and environment overrides.
struct Scenario {
    nlohmann::json document;
    RunSection run;
    std::optional<GeometrySection> geometry;
    std::optional<ModelSection> model;
    std::optional<DkedSection> dked;
    std::optional<TimelineSection> timeline;
    std::optional<SampleSection> sample;
    std::optional<FitSection> fit;
};

/// Parses JSON text; syntax errors name `origin` with line and column.
nlohmann::json parse_json_text(std::string_view text, std::string_view origin);

/// Schema validation. Errors name the offending field path.
Scenario parse_scenario(const nlohmann::json& document);

/// Reads a scenario or a run manifest (its `resolved_scenario` is used).
nlohmann::json load_scenario_document(const std::string& path);

/// Preset name (`hand-low`, `hand-high`, `body-low`, `body-high`,
/// `vehicular`) or an object with a `family` key.
stats::LossModel parse_loss_model(const nlohmann::json& j, const std::string& path);
nlohmann::json loss_model_json(const stats::LossModel& model);

/// In-memory command output: file name and contents.
using OutputFile = std::pair<std::string, std::string>;
using Outputs = std::vector<OutputFile>;

Outputs cmd_density(const Scenario& scenario);
Outputs cmd_drop(const Scenario& scenario);
Outputs cmd_fit(const Scenario& scenario);
Outputs cmd_sample(const Scenario& scenario);
Outputs cmd_map(const Scenario& scenario);
Outputs cmd_loss_cdf(const Scenario& scenario);
Outputs cmd_trace(const Scenario& scenario);

std::uint64_t fnv1a64(std::string_view data) noexcept;

/// Manifest text written next to the outputs of `command`.
std::string manifest_json(std::string_view command, const Scenario& scenario, const Outputs& outputs);

std::string_view version() noexcept;

int run_cli(int argc, char** argv);

} // namespace mmblock::cli
