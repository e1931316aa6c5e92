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
#include <set>

#include "mmblock/cli.hpp"
#include "mmblock/csv.hpp"

namespace mmblock::cli {

using nlohmann::json;

namespace {

// Typed access to one JSON object. Every key read is recorded so that
// leftovers can be reported as unknown fields.
class Fields {
public:
    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            fail(path_, "expected an object");
    }

    [[noreturn]] static void fail(const std::string& field, const std::string& what)
    {
        throw ConfigError("field '" + field + "': " + what);
    }

    std::string at(std::string_view key) const { return path_ + "." + std::string(key); }

    const json* find(std::string_view key)
    {
        seen_.insert(std::string(key));
        const auto it = obj_.find(std::string(key));
        return it == obj_.end() ? nullptr : &*it;
    }

    double number(std::string_view key, double fallback)
    {
        const json* v = find(key);
        return v ? as_number(*v, at(key)) : fallback;
    }

    double required(std::string_view key)
    {
        const json* v = find(key);
        if (!v)
            fail(at(key), "required");
        return as_number(*v, at(key));
    }

    double positive(std::string_view key, double fallback)
    {
        const double v = number(key, fallback);
        if (!(v > 0.0))
            fail(at(key), "must be > 0");
        return v;
    }

    double non_negative(std::string_view key, double fallback)
    {
        const double v = number(key, fallback);
        if (!(v >= 0.0))
            fail(at(key), "must be >= 0");
        return v;
    }

    std::uint64_t count(std::string_view key, std::uint64_t fallback)
    {
        const json* v = find(key);
        if (!v)
            return fallback;
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
            fail(at(key), "expected a non-negative integer");
        return v->get<std::uint64_t>();
    }

    bool flag(std::string_view key, bool fallback)
    {
        const json* v = find(key);
        if (!v)
            return fallback;
        if (!v->is_boolean())
            fail(at(key), "expected true or false");
        return v->get<bool>();
    }

    std::string text(std::string_view key, std::string fallback)
    {
        const json* v = find(key);
        if (!v)
            return fallback;
        if (!v->is_string())
            fail(at(key), "expected a string");
        return v->get<std::string>();
    }

    std::vector<double> numbers(std::string_view key, std::vector<double> fallback)
    {
        const json* v = find(key);
        if (!v)
            return fallback;
        std::vector<double> out;
        if (v->is_array()) {
            if (v->empty())
                fail(at(key), "expected a non-empty list");
            for (std::size_t i = 0; i < v->size(); ++i)
                out.push_back(as_number((*v)[i], at(key) + "[" + std::to_string(i) + "]"));
        } else {
            out.push_back(as_number(*v, at(key)));
        }
        return out;
    }

    void finish() const
    {
        for (const auto& item : obj_.items())
            if (!seen_.count(item.key()))
                fail(at(item.key()), "unknown field");
    }

    static double as_number(const json& v, const std::string& field)
    {
        if (!v.is_number())
            fail(field, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x))
            fail(field, "must be finite");
        return x;
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

template <typename Enum>
Enum pick(const std::string& field, const std::string& value, std::initializer_list<std::pair<const char*, Enum>> options)
{
    std::string names;
    for (const auto& [name, e] : options) {
        if (value == name)
            return e;
        names += names.empty() ? "" : ", ";
        names += name;
    }
    Fields::fail(field, "unknown value '" + value + "' (expected one of " + names + ")");
}

geometry::BlockerSpec parse_blocker(const json* v, const std::string& field)
{
    if (!v)
        return geometry::BlockerSpec::human();
    if (v->is_string()) {
        const auto name = v->get<std::string>();
        if (name == "human")
            return geometry::BlockerSpec::human();
        if (name == "vehicular")
            return geometry::BlockerSpec::vehicular();
        Fields::fail(field, "unknown blocker '" + name + "' (expected human, vehicular or an object)");
    }
    Fields f(*v, field);
    geometry::BlockerSpec spec;
    spec.h_bar = f.number("h_bar", spec.h_bar);
    spec.w_bar = f.number("w_bar", spec.w_bar);
    spec.h_dev = f.number("h_dev", spec.h_dev);
    spec.w_dev = f.number("w_dev", spec.w_dev);
    f.finish();
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        Fields::fail(field, e.what());
    }
    return spec;
}

GeometrySection parse_geometry(const json& v)
{
    Fields f(v, "geometry");
    GeometrySection g;
    g.spec = parse_blocker(f.find("blocker"), f.at("blocker"));
    g.theta_o = f.number("theta_o", g.theta_o);
    g.overlap = pick<geometry::OverlapRule>(f.at("overlap"), f.text("overlap", "merge"),
                                            {{"merge", geometry::OverlapRule::Merge},
                                             {"independent", geometry::OverlapRule::Independent}});
    const auto lambdas = f.numbers("lambda", {4.0});

    std::vector<std::pair<double, double>> ranges;
    if (const json* cases = f.find("cases")) {
        if (f.find("d_min") || f.find("d_max"))
            Fields::fail(f.at("cases"), "give either cases or d_min/d_max, not both");
        if (!cases->is_array() || cases->empty())
            Fields::fail(f.at("cases"), "expected a non-empty list of {d_min, d_max}");
        for (std::size_t i = 0; i < cases->size(); ++i) {
            Fields c((*cases)[i], f.at("cases") + "[" + std::to_string(i) + "]");
            const double lo = c.number("d_min", 3.0);
            const double hi = c.number("d_max", 10.0);
            c.finish();
            ranges.emplace_back(lo, hi);
        }
    } else {
        for (double lo : f.numbers("d_min", {3.0}))
            for (double hi : f.numbers("d_max", {10.0}))
                ranges.emplace_back(lo, hi);
    }
    f.finish();

    for (double lambda : lambdas)
        for (const auto& [lo, hi] : ranges)
            g.cells.push_back({lambda, lo, hi});
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        try {
            g.drop_config(g.cells[i]).validate();
        } catch (const std::invalid_argument& e) {
            Fields::fail("geometry", e.what());
        }
    }
    return g;
}

ModelSection parse_model(const json& v)
{
    Fields f(v, "model");
    ModelSection m;
    auto& s = m.scenario;
    s.self_mode = pick<model::SelfMode>(f.at("self_mode"), f.text("self_mode", "none"),
                                        {{"none", model::SelfMode::None},
                                         {"portrait", model::SelfMode::Portrait},
                                         {"landscape", model::SelfMode::Landscape}});
    s.loss_complexity = pick<model::LossComplexity>(f.at("loss_complexity"), f.text("loss_complexity", "low"),
                                                    {{"low", model::LossComplexity::Low},
                                                     {"high", model::LossComplexity::High}});
    const auto humans = f.count("human_count", 0);
    const auto vehicles = f.count("vehicular_count", 0);
    if (humans > 4)
        Fields::fail(f.at("human_count"), "must lie in [0, 4]");
    if (vehicles > 3)
        Fields::fail(f.at("vehicular_count"), "must lie in [0, 3]");
    s.human_count = static_cast<int>(humans);
    s.vehicular_count = static_cast<int>(vehicles);
    m.grid_step = f.positive("grid_step", m.grid_step);
    // Tolerated so that a bare model document from elsewhere can be pasted in.
    f.find("seed");
    f.finish();
    return m;
}

DkedSection parse_dked(const json& v)
{
    Fields f(v, "dked");
    DkedSection d;
    d.tr_distance = f.positive("R", d.tr_distance);
    d.tx_height = f.non_negative("tx_height", d.tx_height);
    d.rx_height = f.non_negative("rx_height", d.rx_height);
    if (f.find("wavelength") && f.find("carrier_hz"))
        Fields::fail(f.at("wavelength"), "give either wavelength or carrier_hz, not both");
    d.wavelength = f.positive("wavelength", d.wavelength);
    if (f.find("carrier_hz"))
        d.wavelength = model::kSpeedOfLight / f.positive("carrier_hz", 28e9);
    d.ground_anchored = f.flag("ground_anchored", d.ground_anchored);
    f.finish();
    return d;
}

timeline::LogNormalByMedian parse_lognormal(const json* v, const std::string& field, timeline::LogNormalByMedian d)
{
    if (!v)
        return d;
    Fields f(*v, field);
    d.median = f.positive("median", d.median);
    d.log_sigma = f.non_negative("log_sigma", d.log_sigma);
    f.finish();
    return d;
}

TimelineSection parse_timeline(const json& v)
{
    Fields f(v, "timeline");
    TimelineSection t;
    auto& c = t.config;
    c.steady_rssi = f.number("steady_rssi", c.steady_rssi);
    c.sample_period = f.positive("sample_period", c.sample_period);
    c.duration = f.positive("duration", c.duration);
    c.event_rate = f.non_negative("event_rate", c.event_rate);
    c.hand_fraction = f.number("hand_fraction", c.hand_fraction);
    if (!(c.hand_fraction >= 0.0 && c.hand_fraction <= 1.0))
        Fields::fail(f.at("hand_fraction"), "must lie in [0, 1]");
    c.hold_time = f.non_negative("hold_time", c.hold_time);
    c.recovery_scale = f.positive("recovery_scale", c.recovery_scale);
    c.composition = pick<timeline::Composition>(f.at("composition"), f.text("composition", "deepest"),
                                                {{"deepest", timeline::Composition::DeepestWins},
                                                 {"sum", timeline::Composition::SumDb}});
    if (const json* m = f.find("hand_loss"))
        c.hand_loss = parse_loss_model(*m, f.at("hand_loss"));
    if (const json* m = f.find("body_loss"))
        c.body_loss = parse_loss_model(*m, f.at("body_loss"));

    const auto condition = pick<timeline::ChannelCondition>(
        f.at("channel"), f.text("channel", "medium"),
        {{"good", timeline::ChannelCondition::Good},
         {"good-to-medium", timeline::ChannelCondition::GoodToMedium},
         {"medium", timeline::ChannelCondition::Medium},
         {"poor", timeline::ChannelCondition::Poor}});
    c.body_degradation.median = timeline::preset_degradation_median(timeline::BlockageType::Body, condition);
    c.hand_degradation.median = timeline::preset_degradation_median(timeline::BlockageType::Hand, condition);
    c.hand_degradation = parse_lognormal(f.find("hand_degradation"), f.at("hand_degradation"), c.hand_degradation);
    c.body_degradation = parse_lognormal(f.find("body_degradation"), f.at("body_degradation"), c.body_degradation);

    t.n_traces = f.count("n_traces", t.n_traces);
    if (t.n_traces < 1)
        Fields::fail(f.at("n_traces"), "must be >= 1");
    t.threshold = f.positive("threshold", t.threshold);
    if (const json* m = f.find("mitigation")) {
        Fields g(*m, f.at("mitigation"));
        timeline::MitigationPolicy p;
        p.scan_period = g.positive("scan_period", p.scan_period);
        p.switch_latency = g.non_negative("switch_latency", p.switch_latency);
        p.alt_beam_offset = g.non_negative("alt_beam_offset", p.alt_beam_offset);
        p.scan_discovery = g.flag("scan_discovery", p.scan_discovery);
        g.finish();
        t.mitigation = p;
    }
    f.finish();
    return t;
}

SampleSection parse_sample(const json& v)
{
    Fields f(v, "sample");
    SampleSection s;
    if (const json* m = f.find("model"))
        s.model = parse_loss_model(*m, f.at("model"));
    s.n = f.count("n", s.n);
    if (s.n < 1)
        Fields::fail(f.at("n"), "must be >= 1");
    f.finish();
    return s;
}

FitSection parse_fit(const json& v)
{
    Fields f(v, "fit");
    FitSection s;
    s.dataset = f.text("dataset", "");
    s.model = f.text("model", s.model);
    pick<int>(f.at("model"), s.model, {{"gaussian", 0}, {"weibull", 1}, {"gmm", 2}, {"gw", 3}});
    s.sd = pick<stats::SdConvention>(f.at("sd"), f.text("sd", "population"),
                                     {{"population", stats::SdConvention::Population},
                                      {"sample", stats::SdConvention::Sample}});
    s.wks_step = f.positive("wks_step", s.wks_step);
    f.finish();
    return s;
}

RunSection parse_run(const json& v)
{
    Fields f(v, "run");
    RunSection r;
    r.seed = f.count("seed", r.seed);
    r.n_drops = f.count("n_drops", r.n_drops);
    if (r.n_drops < 1)
        Fields::fail(f.at("n_drops"), "must be >= 1");
    r.percentiles = f.numbers("percentiles", r.percentiles);
    for (double p : r.percentiles)
        if (!(p >= 0.0 && p <= 100.0))
            Fields::fail(f.at("percentiles"), "values must lie in [0, 100]");
    if (const json* k = f.find("top_k")) {
        r.top_k.clear();
        if (!k->is_array())
            Fields::fail(f.at("top_k"), "expected a list of integers");
        for (const auto& e : *k) {
            if (!e.is_number_integer() || e.get<std::int64_t>() < 1)
                Fields::fail(f.at("top_k"), "values must be integers >= 1");
            r.top_k.push_back(e.get<int>());
        }
    }
    r.out = f.text("out", "");
    const auto workers = f.count("workers", 1);
    if (workers < 1 || workers > 1024)
        Fields::fail(f.at("workers"), "must lie in [1, 1024]");
    r.workers = static_cast<int>(workers);
    f.finish();
    return r;
}

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace

geometry::DropConfig GeometrySection::drop_config(const GeometryCell& cell) const
{
    geometry::DropConfig c;
    c.lambda = cell.lambda;
    c.d_min = cell.d_min;
    c.d_max = cell.d_max;
    c.spec = spec;
    c.theta_o = theta_o;
    c.overlap = overlap;
    return c;
}

stats::LossModel parse_loss_model(const json& j, const std::string& path)
{
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "hand-low")
            return model::hand_loss(model::LossComplexity::Low);
        if (name == "hand-high")
            return model::hand_loss(model::LossComplexity::High);
        if (name == "body-low")
            return model::human_body_loss(model::LossComplexity::Low);
        if (name == "body-high")
            return model::human_body_loss(model::LossComplexity::High);
        if (name == "vehicular")
            return model::vehicular_loss();
        Fields::fail(path, "unknown loss preset '" + name
                               + "' (expected hand-low, hand-high, body-low, body-high, vehicular)");
    }
    Fields f(j, path);
    const json* fam = f.find("family");
    if (!fam || !fam->is_string())
        Fields::fail(f.at("family"), "expected one of gaussian, weibull, gmm, gw");
    const auto family = fam->get<std::string>();
    try {
        if (family == "gaussian") {
            const double mu = f.required("mu");
            const double sigma = f.required("sigma");
            f.finish();
            return stats::LossModel::gaussian(mu, sigma);
        }
        if (family == "weibull") {
            const double alpha = f.required("alpha");
            const double beta = f.required("beta");
            f.finish();
            return stats::LossModel::weibull(alpha, beta);
        }
        if (family == "gmm") {
            const double p1 = f.required("p1");
            const double mu1 = f.required("mu1");
            const double s1 = f.required("sigma1");
            const double mu2 = f.required("mu2");
            const double s2 = f.required("sigma2");
            f.finish();
            return stats::LossModel::gaussian_mixture(p1, mu1, s1, mu2, s2);
        }
        if (family == "gw") {
            const double p1 = f.required("p1");
            const double mu = f.required("mu");
            const double sigma = f.required("sigma");
            const double alpha = f.required("alpha");
            const double beta = f.required("beta");
            f.finish();
            return stats::LossModel::gaussian_weibull(p1, mu, sigma, alpha, beta);
        }
    } catch (const std::invalid_argument& e) {
        Fields::fail(path, e.what());
    }
    Fields::fail(f.at("family"), "unknown family '" + family + "' (expected gaussian, weibull, gmm, gw)");
}

json loss_model_json(const stats::LossModel& m)
{
    return std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, stats::GaussianParams>)
                return {{"family", "gaussian"}, {"mu", p.mu}, {"sigma", p.sigma}};
            else if constexpr (std::is_same_v<P, stats::WeibullParams>)
                return {{"family", "weibull"}, {"alpha", p.alpha}, {"beta", p.beta}};
            else if constexpr (std::is_same_v<P, stats::GaussianMixtureParams>)
                return {{"family", "gmm"},          {"p1", p.p1},
                        {"mu1", p.comp1.mu},        {"sigma1", p.comp1.sigma},
                        {"mu2", p.comp2.mu},        {"sigma2", p.comp2.sigma}};
            else
                return {{"family", "gw"},           {"p1", p.p1},
                        {"mu", p.gauss.mu},         {"sigma", p.gauss.sigma},
                        {"alpha", p.weib.alpha},    {"beta", p.weib.beta}};
        },
        m.params());
}

json parse_json_text(std::string_view text, std::string_view origin)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, col] = line_col(text, offset);
        std::string what = e.what();
        const auto colon = what.find(": ", what.find("parse error"));
        throw ConfigError(std::string(origin) + ":" + std::to_string(line) + ":" + std::to_string(col)
                          + ": invalid JSON" + (colon == std::string::npos ? "" : what.substr(colon)));
    }
}

json load_scenario_document(const std::string& path)
{
    std::string text;
    try {
        text = io::read_text_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    json doc = parse_json_text(text, path);
    if (doc.is_object() && doc.contains("resolved_scenario") && doc.contains("artifact"))
        return doc["resolved_scenario"];
    return doc;
}

Scenario parse_scenario(const json& document)
{
    if (!document.is_object())
        throw ConfigError("scenario: top level must be a JSON object");
    Scenario s;
    s.document = document;
    static const std::set<std::string> known{"geometry", "model", "dked", "timeline", "sample", "fit", "run"};
    for (const auto& item : document.items())
        if (!known.count(item.key()))
            throw ConfigError("field '" + item.key() + "': unknown section");
    if (!document.contains("run"))
        throw ConfigError("scenario: missing required section 'run'");
    s.run = parse_run(document["run"]);
    if (document.contains("geometry"))
        s.geometry = parse_geometry(document["geometry"]);
    if (document.contains("model"))
        s.model = parse_model(document["model"]);
    if (document.contains("dked"))
        s.dked = parse_dked(document["dked"]);
    if (document.contains("timeline"))
        s.timeline = parse_timeline(document["timeline"]);
    if (document.contains("sample"))
        s.sample = parse_sample(document["sample"]);
    if (document.contains("fit"))
        s.fit = parse_fit(document["fit"]);
    return s;
}

} // namespace mmblock::cli
