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
#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "mmblock/cli.hpp"
#include "mmblock/csv.hpp"
#include "mmblock/errors.hpp"

#ifndef MMBLOCK_VERSION
#define MMBLOCK_VERSION "0.0.0"
#endif

namespace mmblock::cli {

using nlohmann::json;
using io::format_number;

namespace {

template <typename T>
const T& require(const std::optional<T>& section, std::string_view name, std::string_view command)
{
    if (!section)
        throw ConfigError(std::string(command) + ": scenario has no '" + std::string(name) + "' section");
    return *section;
}

std::string percentile_label(double p)
{
    return "p" + format_number(p);
}

std::vector<std::string> table_header(const RunSection& run)
{
    std::vector<std::string> h{"lambda", "d_min", "d_max", "metric"};
    for (double p : run.percentiles)
        h.push_back(percentile_label(p));
    return h;
}

std::vector<std::string> cell_prefix(const GeometryCell& c, std::string metric)
{
    return {format_number(c.lambda), format_number(c.d_min), format_number(c.d_max), std::move(metric)};
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json params_only(const stats::LossModel& m)
{
    json j = loss_model_json(m);
    j.erase("family");
    return j;
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

} // namespace

std::string_view version() noexcept
{
    return MMBLOCK_VERSION;
}

std::uint64_t fnv1a64(std::string_view data) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Outputs cmd_density(const Scenario& s)
{
    const auto& g = require(s.geometry, "geometry", "density");
    io::CsvWriter csv({"lambda", "d_min", "d_max", "density"});
    for (const auto& c : g.cells)
        csv.add_row(std::vector<double>{c.lambda, c.d_min, c.d_max, geometry::average_density(c.lambda, c.d_min, c.d_max)});
    return {{"density.csv", csv.str()}};
}

Outputs cmd_drop(const Scenario& s)
{
    const auto& g = require(s.geometry, "geometry", "drop");
    const auto& run = s.run;
    if (run.n_drops < 1000)
        std::cerr << "warning: n_drops=" << run.n_drops << " is too small for reliable percentile estimates\n";

    io::CsvWriter angular(table_header(run));
    io::CsvWriter topk(table_header(run));
    for (const auto& cell : g.cells) {
        const auto stats = geometry::run_drops(g.drop_config(cell), run.n_drops, run.seed, run.top_k, run.workers);
        if (stats.mean_phi.empty())
            throw std::invalid_argument("drop: every drop was empty for lambda=" + format_number(cell.lambda));
        const auto rows = geometry::percentile_table(stats, run.percentiles);
        auto az = cell_prefix(cell, "azimuth");
        auto el = cell_prefix(cell, "elevation");
        for (const auto& r : rows) {
            az.push_back(format_number(r.azimuth));
            el.push_back(format_number(r.elevation));
        }
        angular.add_row(std::move(az));
        angular.add_row(std::move(el));

        for (std::size_t j = 0; j < stats.top_k.size(); ++j) {
            auto sorted = stats.top_k_power[j];
            std::sort(sorted.begin(), sorted.end());
            auto row = cell_prefix(cell, "top" + std::to_string(stats.top_k[j]));
            for (double p : run.percentiles)
                row.push_back(format_number(geometry::exceedance_percentile(sorted, p)));
            topk.add_row(std::move(row));
        }
    }
    return {{"drop_angular.csv", angular.str()}, {"drop_topk.csv", topk.str()}};
}

Outputs cmd_fit(const Scenario& s)
{
    const auto& f = require(s.fit, "fit", "fit");
    if (f.dataset.empty())
        throw ConfigError("fit: no dataset given (fit.dataset or --dataset)");
    std::string text;
    try {
        text = io::read_text_file(f.dataset);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("fit: ") + e.what());
    }
    const stats::EmpiricalSample sample(io::parse_loss_dataset(text));

    json diagnostics = json::object();
    std::optional<stats::LossModel> model;
    if (f.model == "gaussian") {
        const auto p = stats::fit_gaussian(sample, f.sd);
        model = stats::LossModel::gaussian(p.mu, p.sigma);
    } else if (f.model == "weibull") {
        const auto w = stats::fit_weibull(sample);
        model = stats::LossModel(w.params);
        diagnostics["beta_capped"] = w.beta_capped;
        diagnostics["iterations"] = w.iterations;
    } else if (f.model == "gmm") {
        const auto em = stats::fit_gaussian_mixture(sample);
        model = stats::LossModel(em.params);
        diagnostics["iterations"] = em.iterations;
        diagnostics["log_likelihood"] = em.log_likelihood.back();
    } else if (f.model == "gw") {
        const auto g0 = stats::fit_gaussian(sample, f.sd);
        const auto w0 = stats::fit_weibull(sample);
        stats::GwSearchOptions options;
        options.grid_step = f.wks_step;
        const auto gw = stats::fit_gw_mixture(sample, g0, w0.params, options);
        model = stats::LossModel(gw.params);
        diagnostics["evaluations"] = gw.evaluations;
    } else {
        throw ConfigError("fit: unknown model '" + f.model + "'");
    }

    const auto report = stats::make_fit_report(sample, *model, f.wks_step);
    json j;
    j["model"] = std::string(report.model.family());
    j["params"] = params_only(report.model);
    j["d_ks"] = report.d_ks;
    j["d_wks"] = report.d_wks;
    j["n"] = sample.size();
    j["diagnostics"] = diagnostics;
    return {{"fit.json", dump(j)}};
}

Outputs cmd_sample(const Scenario& s)
{
    const auto& smp = require(s.sample, "sample", "sample");
    Rng rng = make_stream(s.run.seed, 0);
    std::string out = "loss_db\n";
    for (std::size_t i = 0; i < smp.n; ++i) {
        out += format_number(smp.model.sample(rng));
        out += '\n';
    }
    return {{"sample.csv", out}};
}

Outputs cmd_map(const Scenario& s)
{
    const auto& m = require(s.model, "model", "map");
    const auto map = model::realize_map(m.scenario, s.run.seed);

    io::CsvWriter regions({"kind", "phi_c", "x_spread", "theta_c", "y_spread", "loss_db", "sphere_fraction"});
    for (std::size_t i = 0; i < map.regions.size(); ++i) {
        const auto& r = map.regions[i];
        regions.add_row({std::string(model::to_string(r.kind)), format_number(r.phi_c), format_number(r.x_spread),
                         format_number(r.theta_c), format_number(r.y_spread), format_number(map.sampled_losses[i]),
                         format_number(model::blocked_sphere_fraction(r))});
    }

    io::CsvWriter grid({"phi", "theta", "attenuation_db"});
    const auto n_phi = static_cast<std::size_t>(std::ceil(360.0 / m.grid_step - 1e-9));
    const auto n_theta = static_cast<std::size_t>(std::floor(180.0 / m.grid_step + 1e-9));
    for (std::size_t t = 0; t <= n_theta; ++t) {
        const double theta = static_cast<double>(t) * m.grid_step;
        for (std::size_t p = 0; p < n_phi; ++p) {
            const double phi = static_cast<double>(p) * m.grid_step;
            grid.add_row(std::vector<double>{phi, theta, model::attenuation_at(map, phi, theta)});
        }
    }
    return {{"map_regions.csv", regions.str()}, {"map_grid.csv", grid.str()}};
}

Outputs cmd_loss_cdf(const Scenario& s)
{
    const auto& g = require(s.geometry, "geometry", "loss-cdf");
    const auto& d = require(s.dked, "dked", "loss-cdf");
    if (g.cells.size() != 1)
        throw ConfigError("loss-cdf: geometry must describe a single (lambda, d_min, d_max) cell");

    model::DkedScenario sc;
    sc.drop = g.drop_config(g.cells.front());
    sc.tr_distance = d.tr_distance;
    sc.tx_height = d.tx_height;
    sc.rx_height = d.rx_height;
    sc.wavelength = d.wavelength;
    sc.ground_anchored = d.ground_anchored;
    const auto cdf = model::dynamic_loss_cdf(sc, s.run.n_drops, s.run.seed, s.run.workers);

    io::CsvWriter csv({"loss_db", "cdf"});
    const double n = static_cast<double>(cdf.losses.size());
    for (std::size_t i = 0; i < cdf.losses.size(); ++i)
        csv.add_row(std::vector<double>{cdf.losses[i], static_cast<double>(i + 1) / n});

    json summary;
    summary["n_drops"] = cdf.n_drops;
    summary["n_shadowed"] = cdf.losses.size();
    if (!cdf.losses.empty()) {
        summary["median_db"] = cdf.median();
        if (cdf.losses.size() >= 2) {
            const auto gfit = stats::fit_gaussian(stats::EmpiricalSample(cdf.losses));
            summary["gaussian"] = {{"mu", gfit.mu}, {"sigma", gfit.sigma}};
        }
    }
    return {{"loss_cdf.csv", csv.str()}, {"loss_cdf_summary.json", dump(summary)}};
}

Outputs cmd_trace(const Scenario& s)
{
    const auto& t = require(s.timeline, "timeline", "trace");
    t.config.validate();

    std::vector<timeline::RssiTrace> traces(t.n_traces);
    parallel_for(t.n_traces, s.run.workers,
                 [&](std::size_t i) { traces[i] = timeline::synthesize_trace(t.config, derive_seed(s.run.seed, i)); });

    auto trace_csv = [](const timeline::RssiTrace& tr) {
        io::CsvWriter csv({"t_s", "rssi_db"});
        for (std::size_t i = 0; i < tr.samples.size(); ++i)
            csv.add_row(std::vector<double>{tr.time_at(i), tr.samples[i]});
        return csv.str();
    };

    Outputs out;
    out.emplace_back("trace.csv", trace_csv(traces.front()));

    json events = json::array();
    std::vector<double> times;
    std::optional<timeline::MitigationResult> first_mitigated;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const auto& tr = traces[i];
        const auto detected = timeline::detect_rf_events(tr, t.threshold);
        std::optional<timeline::MitigationResult> mit;
        if (t.mitigation)
            mit = timeline::apply_mitigation(tr, detected, *t.mitigation, t.threshold);
        for (std::size_t k = 0; k < detected.size(); ++k) {
            const auto& ev = detected[k];
            json e = {{"trace", i},
                      {"onset_s", tr.time_at(ev.onset_index)},
                      {"minima_s", tr.time_at(ev.minima_index)},
                      {"end_s", tr.time_at(ev.end_index)},
                      {"depth_db", ev.depth},
                      {"degradation_time_s", ev.degradation_time}};
            if (mit) {
                const auto& o = mit->events[k];
                e["mitigated_depth_db"] = o.depth_mitigated;
                e["switch_time_s"] = o.switch_time;
                e["switched"] = o.switched;
            }
            events.push_back(std::move(e));
            times.push_back(ev.degradation_time);
        }
        if (i == 0 && mit)
            first_mitigated = std::move(mit);
    }
    out.emplace_back("events.json", dump(events));

    io::CsvWriter cdf_csv({"t_s", "cdf"});
    if (!times.empty()) {
        const auto cdf = timeline::degradation_time_cdf(times);
        for (std::size_t i = 0; i < cdf.times.size(); ++i)
            cdf_csv.add_row(std::vector<double>{cdf.times[i], cdf.cdf[i]});
    }
    out.emplace_back("degradation_cdf.csv", cdf_csv.str());
    if (first_mitigated)
        out.emplace_back("trace_mitigated.csv", trace_csv(first_mitigated->trace));
    return out;
}

std::string manifest_json(std::string_view command, const Scenario& scenario, const Outputs& outputs)
{
    json m;
    m["artifact"] = "mmblock";
    m["version"] = std::string(version());
    m["command"] = std::string(command);
    m["seed"] = scenario.run.seed;
    m["resolved_scenario"] = scenario.document;
    json files = json::array();
    for (const auto& [name, content] : outputs)
        files.push_back({{"file", name}, {"bytes", content.size()}, {"fnv1a64", hex64(fnv1a64(content))}});
    m["outputs"] = files;
    if (scenario.fit && !scenario.fit->dataset.empty()) {
        try {
            const auto data = io::read_text_file(scenario.fit->dataset);
            m["inputs"] = json::array({{{"file", scenario.fit->dataset}, {"fnv1a64", hex64(fnv1a64(data))}}});
        } catch (const std::exception&) {
        }
    }
    return dump(m);
}

namespace {

struct Globals {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<int> workers;
    std::optional<std::uint64_t> n_drops;
    std::string dataset;
    std::string model;
};

using Command = Outputs (*)(const Scenario&);

int execute(const std::string& name, Command command, const Globals& g)
{
    json doc;
    if (!g.scenario.empty())
        doc = load_scenario_document(g.scenario);
    else if (name == "fit")
        doc = {{"run", json::object()}};
    else
        throw ConfigError(name + ": no scenario given (use --scenario or MMBLOCK_SCENARIO)");

    if (doc.is_object() && doc.contains("run") && doc["run"].is_object()) {
        if (g.seed)
            doc["run"]["seed"] = *g.seed;
        if (g.n_drops)
            doc["run"]["n_drops"] = *g.n_drops;
    }
    if (name == "fit" && doc.is_object()) {
        if (!doc.contains("fit"))
            doc["fit"] = json::object();
        if (doc["fit"].is_object()) {
            if (!g.dataset.empty())
                doc["fit"]["dataset"] = g.dataset;
            if (!g.model.empty())
                doc["fit"]["model"] = g.model;
        }
    }

    Scenario scenario = parse_scenario(doc);
    if (g.workers)
        scenario.run.workers = *g.workers;
    if (scenario.run.workers < 1)
        throw ConfigError("--workers must be >= 1");

    const Outputs outputs = command(scenario);

    std::string dir = !g.out.empty() ? g.out : (!scenario.run.out.empty() ? scenario.run.out : ".");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    const std::filesystem::path base(dir);
    for (const auto& [file, content] : outputs)
        io::write_text_file((base / file).string(), content);
    io::write_text_file((base / (name + ".manifest.json")).string(), manifest_json(name, scenario, outputs));
    for (const auto& [file, content] : outputs)
        std::cout << (base / file).string() << "\n";
    return kExitOk;
}

} // namespace

int run_cli(int argc, char** argv)
{
    CLI::App app{"Statistical blockage simulation and loss-model fitting for mmWave links", "mmblock"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    Globals g;
    app.add_option("--scenario", g.scenario, "Scenario JSON file or run manifest")->envname("MMBLOCK_SCENARIO");
    app.add_option("--seed", g.seed, "Master seed (overrides run.seed)")->envname("MMBLOCK_SEED");
    app.add_option("--out", g.out, "Output directory (overrides run.out)")->envname("MMBLOCK_OUT");
    app.add_option("--workers", g.workers, "Worker threads")->envname("MMBLOCK_WORKERS");
    app.add_option("--n-drops", g.n_drops, "Monte Carlo drops (overrides run.n_drops)")->envname("MMBLOCK_N_DROPS");

    struct Sub {
        const char* name;
        const char* help;
        Command command;
    };
    const Sub subs[] = {
        {"density", "Average blocker density table", cmd_density},
        {"drop", "Mean angular blockage percentiles and top-K explanatory power", cmd_drop},
        {"topk", "Alias of drop", cmd_drop},
        {"fit", "Fit a loss model to a loss_db dataset", cmd_fit},
        {"sample", "Draw losses from a loss model", cmd_sample},
        {"map", "Realize an angular blockage map", cmd_map},
        {"loss-cdf", "Dynamic blockage loss CDF from knife-edge diffraction", cmd_loss_cdf},
        {"trace", "Synthesize RSSI traces, detect RF events and apply beam switching", cmd_trace},
    };
    for (const auto& sub : subs) {
        auto* cmd = app.add_subcommand(sub.name, sub.help);
        cmd->fallthrough();
        if (std::string_view(sub.name) == "fit") {
            cmd->add_option("--dataset", g.dataset, "Single-column CSV with header loss_db");
            cmd->add_option("--model", g.model, "gaussian, weibull, gmm or gw");
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    for (const auto& sub : subs) {
        if (!app.got_subcommand(sub.name))
            continue;
        try {
            return execute(sub.name, sub.command, g);
        } catch (const ConvergenceError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConvergence;
        } catch (const ConfigError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfig;
        } catch (const io::DatasetError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfig;
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfig;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitFailure;
        }
    }
    return kExitFailure;
}

} // namespace mmblock::cli
