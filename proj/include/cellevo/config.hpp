#pragma once

// Scenario configuration: a flat "[section] key = value" text format, its
// printer, and the registry of named scenarios.
//
//   # comment
//   [scenario]
//   name  = fig1-healthy          # start from a registered scenario (optional)
//   model = healthy-homeostasis   # or cancer-linear, combined, dose-analysis
//   [grid]
//   m = 2000
//
// Keys may also be written fully qualified outside any section ("grid.m = 2000").

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "cellevo/combo.hpp"
#include "cellevo/errors.hpp"
#include "cellevo/mono.hpp"
#include "cellevo/rates.hpp"

namespace cellevo {

/// Parameters of the constant-dose fitness landscape analysis.
struct DoseSpec {
    double r0 = 1.0;
    double d = 0.245;
    double a = 0.5;
    std::vector<double> c_grid;
    bool operator==(const DoseSpec&) const = default;
};

using ModelSpec = std::variant<MonoModelSpec, ComboModelSpec, DoseSpec>;

struct GridConfig {
    int m = 2000;
    double x_max = 1.0;
    bool operator==(const GridConfig&) const = default;
};

struct TimeConfig {
    std::optional<double> dt;       ///< explicit step
    std::optional<double> dt_coef;  ///< dt = dt_coef * dx^2 / eps (single-population models)
    long steps = 0;
    long save_every = 0;  ///< 0: derived from output.frames
    RunMode mode = RunMode::Imex;
    bool operator==(const TimeConfig&) const = default;
};

struct InitConfig {
    double center = 0.5;
    double width = 0.01;  ///< eps in exp(-(x - center)^2 / eps)
    double mass_H = 1.0;  ///< single-population models use this mass
    double mass_C = 0.5;
    bool operator==(const InitConfig&) const = default;
};

struct OutputConfig {
    long frames = 10;
    bool normalize = false;
    bool operator==(const OutputConfig&) const = default;
};

struct ScenarioConfig {
    std::string name;  ///< registered scenario this config derives from, may be empty
    ModelSpec model;
    GridConfig grid;
    TimeConfig time;
    InitConfig init;
    OutputConfig output;
    bool operator==(const ScenarioConfig&) const = default;

    bool is_mono() const { return std::holds_alternative<MonoModelSpec>(model); }
    bool is_combo() const { return std::holds_alternative<ComboModelSpec>(model); }
    bool is_dose() const { return std::holds_alternative<DoseSpec>(model); }

    std::string model_name() const {
        if (is_combo()) return "combined";
        if (is_dose()) return "dose-analysis";
        return to_string(std::get<MonoModelSpec>(model).kind);
    }

    Grid make_grid() const { return cellevo::make_grid(grid.m, grid.x_max); }

    double resolved_dt() const {
        if (time.dt) return *time.dt;
        if (time.dt_coef && is_mono()) {
            const double dx = grid.x_max / grid.m;
            return *time.dt_coef * dx * dx / std::get<MonoModelSpec>(model).eps;
        }
        throw ConfigError("time: no step size (set time.dt" + std::string(is_mono() ? " or time.dt_coef)" : ")"));
    }

    long resolved_save_every() const {
        if (time.save_every > 0) return time.save_every;
        return std::max(1L, time.steps / std::max(1L, output.frames));
    }
};

// ---------------------------------------------------------------------------
// Registry

namespace detail {

inline std::string dose_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline ScenarioConfig healthy_fig1() {
    ScenarioConfig c;
    c.name = "fig1-healthy";
    MonoModelSpec m;
    m.kind = MonoKind::HealthyHomeostasis;
    m.r = RationalDecay{2.0, 5.0};
    m.d = Constant{0.4};
    m.mu = Constant{0.0};
    m.beta = 1.0;
    m.theta = 0.0;
    m.eps = 0.01;
    m.c = 0.0;
    c.model = m;
    c.grid = {4000, 1.0};
    c.time.dt_coef = 25.0;
    c.time.steps = 15000;
    c.time.mode = RunMode::Imex;
    c.init = {0.7, 0.01, 1.0, 0.5};
    return c;
}

inline ScenarioConfig resistance(const std::string& name, RunMode mode, long steps) {
    ScenarioConfig c;
    c.name = name;
    MonoModelSpec m;
    m.kind = MonoKind::CancerLinear;
    m.r = RationalDecay{1.0, 1.0};
    m.d = Constant{0.245};
    m.mu = InverseQuadratic{0.3025, 0.5};
    m.theta = 0.0;
    m.eps = 0.01;
    m.c = 1.0;
    c.model = m;
    c.grid = {4000, 1.0};
    c.time.dt_coef = 4500.0;
    c.time.steps = steps;
    c.time.mode = mode;
    c.init = {0.5, 0.01, 1.0, 0.5};
    c.output.normalize = true;
    return c;
}

inline ScenarioConfig combined(const std::string& name, double c1, double c2) {
    ScenarioConfig c;
    c.name = name;
    ComboModelSpec m;
    m.c1 = c1;
    m.c2 = c2;
    c.model = m;
    c.grid = {2000, 1.0};
    c.time.dt = 0.1;
    c.time.steps = 2000;
    c.init = {0.5, 0.01, 0.5, 0.5};
    return c;
}

inline std::vector<ScenarioConfig> registry() {
    std::vector<ScenarioConfig> out;
    out.push_back(healthy_fig1());
    out.push_back(resistance("fig2-resistance-raw", RunMode::ExactLinear, 1000));
    out.push_back(resistance("fig3-resistance-renormalized", RunMode::Renormalized, 5000));
    for (double c1 : {0.0, 1.75, 3.5}) out.push_back(combined("fig-f1-cytotoxic-" + dose_label(c1), c1, 0.0));
    for (double c2 : {1.0, 3.0, 7.0}) out.push_back(combined("fig-f2-cytostatic-" + dose_label(c2), 0.0, c2));
    for (double c : {0.0, 1.0, 1.5, 2.0}) out.push_back(combined("fig-f3f4-combo-" + dose_label(c), c, c));

    ScenarioConfig dose;
    dose.name = "dose-analysis-sec4";
    DoseSpec ds;
    for (int k = 1; k <= 15; ++k) ds.c_grid.push_back(k / 10.0);
    dose.model = ds;
    out.push_back(dose);
    return out;
}

}  // namespace detail

inline std::vector<std::string> list_scenarios() {
    std::vector<std::string> names;
    for (const auto& s : detail::registry()) names.push_back(s.name);
    return names;
}

inline std::optional<ScenarioConfig> find_scenario(const std::string& name) {
    for (auto& s : detail::registry())
        if (s.name == name) return s;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parser

namespace detail {

struct Entry {
    std::string value;
    int line;
};

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class KeyReader {
public:
    explicit KeyReader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<std::string> text(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        last_line_ = it->second.line;
        std::string v = it->second.value;
        entries_.erase(it);
        return v;
    }

    void real(const std::string& key, double& out) {
        if (auto v = text(key)) out = to_real(key, *v);
    }
    void real(const std::string& key, std::optional<double>& out) {
        if (auto v = text(key)) out = to_real(key, *v);
    }
    void integer(const std::string& key, long& out) {
        if (auto v = text(key)) out = to_integer(key, *v);
    }
    void integer(const std::string& key, int& out) {
        if (auto v = text(key)) out = static_cast<int>(to_integer(key, *v));
    }
    void boolean(const std::string& key, bool& out) {
        if (auto v = text(key)) {
            if (*v == "true" || *v == "1") out = true;
            else if (*v == "false" || *v == "0") out = false;
            else fail(key, "expects true or false, got '" + *v + "'");
        }
    }
    void rate(const std::string& key, RateSpec& out) {
        if (auto v = text(key)) {
            try {
                out = parse_rate(*v);
            } catch (const ConfigError& e) {
                fail(key, e.what());
            }
        }
    }
    void real_list(const std::string& key, std::vector<double>& out) {
        if (auto v = text(key)) {
            std::string s = *v;
            for (char& ch : s)
                if (ch == ',') ch = ' ';
            std::istringstream in(s);
            std::string tok;
            out.clear();
            while (in >> tok) out.push_back(to_real(key, tok));
        }
    }

    /// Reject whatever was not consumed.
    void finish() const {
        if (entries_.empty()) return;
        const auto& [key, e] = *std::min_element(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
            return a.second.line < b.second.line;
        });
        throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + key + "'");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigError("line " + std::to_string(last_line_) + ": key '" + key + "' " + msg);
    }

private:
    double to_real(const std::string& key, const std::string& v) const {
        std::size_t used = 0;
        double out = 0.0;
        try {
            out = std::stod(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size()) fail(key, "expects a number, got '" + v + "'");
        return out;
    }
    long to_integer(const std::string& key, const std::string& v) const {
        std::size_t used = 0;
        long out = 0;
        try {
            out = std::stol(v, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != v.size()) fail(key, "expects an integer, got '" + v + "'");
        return out;
    }

    std::map<std::string, Entry> entries_;
    int last_line_ = 0;
};

inline std::optional<RunMode> parse_mode(const std::string& s) {
    if (s == "imex") return RunMode::Imex;
    if (s == "exact-linear") return RunMode::ExactLinear;
    if (s == "renormalized") return RunMode::Renormalized;
    return std::nullopt;
}

inline ScenarioConfig default_for_model(const std::string& model) {
    if (model == "healthy-homeostasis") {
        ScenarioConfig c = healthy_fig1();
        c.name.clear();
        return c;
    }
    if (model == "cancer-linear") {
        ScenarioConfig c = resistance("", RunMode::Imex, 0);
        c.output.normalize = false;
        return c;
    }
    if (model == "combined") return combined("", 0.0, 0.0);
    if (model == "dose-analysis") {
        ScenarioConfig c;
        c.model = DoseSpec{};
        return c;
    }
    throw ConfigError("unknown model '" + model + "'");
}

}  // namespace detail

inline ScenarioConfig parse_config(const std::string& text) {
    using detail::Entry;
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string raw, section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (entries.count(full))
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + full + "'");
        entries[full] = {value, line_no};
    }

    detail::KeyReader rd(std::move(entries));
    ScenarioConfig cfg;
    const auto name = rd.text("scenario.name");
    const auto model = rd.text("scenario.model");
    if (name) {
        auto preset = find_scenario(*name);
        if (!preset) throw ConfigError("unknown scenario '" + *name + "'");
        cfg = *preset;
        if (model && *model != cfg.model_name())
            throw ConfigError("scenario '" + *name + "' is a " + cfg.model_name() + " model, not " + *model);
    } else {
        if (!model) throw ConfigError("missing required key 'scenario.model' (or 'scenario.name')");
        cfg = detail::default_for_model(*model);
        if (!cfg.is_dose()) {
            for (const char* req : {"grid.m", "time.steps"})
                if (!rd.has(req)) throw ConfigError(std::string("missing required key '") + req + "'");
            if (!rd.has("time.dt") && !rd.has("time.dt_coef"))
                throw ConfigError("missing required key 'time.dt'");
        }
    }
    // Defaults carry a step rule; an explicit one replaces it.
    if (rd.has("time.dt") || rd.has("time.dt_coef")) {
        cfg.time.dt.reset();
        cfg.time.dt_coef.reset();
    }

    if (cfg.is_dose()) {
        auto& m = std::get<DoseSpec>(cfg.model);
        rd.real("dose.r0", m.r0);
        rd.real("dose.d", m.d);
        rd.real("dose.a", m.a);
        rd.real_list("dose.c_grid", m.c_grid);
        rd.finish();
        return cfg;
    }

    rd.integer("grid.m", cfg.grid.m);
    rd.real("grid.x_max", cfg.grid.x_max);
    rd.real("time.dt", cfg.time.dt);
    rd.real("time.dt_coef", cfg.time.dt_coef);
    rd.integer("time.steps", cfg.time.steps);
    rd.integer("time.save_every", cfg.time.save_every);
    rd.integer("output.frames", cfg.output.frames);
    rd.boolean("output.normalize", cfg.output.normalize);
    rd.real("init.center", cfg.init.center);
    rd.real("init.width", cfg.init.width);

    if (cfg.is_mono()) {
        auto& m = std::get<MonoModelSpec>(cfg.model);
        if (auto mode = rd.text("time.mode")) {
            auto parsed = detail::parse_mode(*mode);
            if (!parsed) rd.fail("time.mode", "expects imex, exact-linear or renormalized, got '" + *mode + "'");
            cfg.time.mode = *parsed;
        }
        rd.rate("model.r", m.r);
        rd.rate("model.d", m.d);
        rd.rate("model.mu", m.mu);
        rd.real("model.beta", m.beta);
        rd.real("model.theta", m.theta);
        rd.real("model.eps", m.eps);
        rd.real("model.c", m.c);
        rd.real("kernel.sigma", m.kernel.sigma);
        rd.real("kernel.trunc", m.kernel.trunc);
        rd.real("init.mass", cfg.init.mass_H);
    } else {
        auto& m = std::get<ComboModelSpec>(cfg.model);
        rd.rate("model.rH", m.rH);
        rd.rate("model.rC", m.rC);
        rd.rate("model.dH", m.dH);
        rd.rate("model.dC", m.dC);
        rd.rate("model.muH", m.muH);
        rd.rate("model.muC", m.muC);
        rd.real("model.theta_H", m.theta_H);
        rd.real("model.theta_C", m.theta_C);
        rd.real("model.alphaH", m.alphaH);
        rd.real("model.alphaC", m.alphaC);
        rd.real("model.aHH", m.aHH);
        rd.real("model.aHC", m.aHC);
        rd.real("model.aCH", m.aCH);
        rd.real("model.aCC", m.aCC);
        rd.real("model.c1", m.c1);
        rd.real("model.c2", m.c2);
        rd.real("kernel.sigma_H", m.kernel_H.sigma);
        rd.real("kernel.sigma_C", m.kernel_C.sigma);
        rd.real("kernel.trunc_H", m.kernel_H.trunc);
        rd.real("kernel.trunc_C", m.kernel_C.trunc);
        rd.real("init.mass_H", cfg.init.mass_H);
        rd.real("init.mass_C", cfg.init.mass_C);
    }
    rd.finish();

    // Structural checks that do not need a run.
    (void)cfg.make_grid();
    if (cfg.time.steps < 0) throw ConfigError("time.steps must be nonnegative");
    if (cfg.time.dt && cfg.time.dt_coef) throw ConfigError("set only one of time.dt and time.dt_coef");
    if (cfg.is_combo() && cfg.time.dt_coef) throw ConfigError("time.dt_coef applies to single-population models only");
    std::visit([](const auto& m) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(m)>, DoseSpec>) m.validate();
    }, cfg.model);
    return cfg;
}

/// Full text form with every field spelled out; parse_config inverts it.
inline std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    auto kv = [&](const std::string& k, const std::string& v) { out << k << " = " << v << "\n"; };
    auto real = [&](const std::string& k, double v) { kv(k, format_real(v)); };

    out << "[scenario]\n";
    if (!cfg.name.empty()) kv("name", cfg.name);
    kv("model", cfg.model_name());

    if (cfg.is_dose()) {
        const auto& m = std::get<DoseSpec>(cfg.model);
        out << "\n[dose]\n";
        real("r0", m.r0);
        real("d", m.d);
        real("a", m.a);
        std::string list;
        for (std::size_t i = 0; i < m.c_grid.size(); ++i) list += (i ? ", " : "") + format_real(m.c_grid[i]);
        kv("c_grid", list);
        return out.str();
    }

    out << "\n[grid]\n";
    kv("m", std::to_string(cfg.grid.m));
    real("x_max", cfg.grid.x_max);

    out << "\n[time]\n";
    if (cfg.time.dt) real("dt", *cfg.time.dt);
    if (cfg.time.dt_coef) real("dt_coef", *cfg.time.dt_coef);
    kv("steps", std::to_string(cfg.time.steps));
    kv("save_every", std::to_string(cfg.time.save_every));
    if (cfg.is_mono()) kv("mode", to_string(cfg.time.mode));

    out << "\n[model]\n";
    if (cfg.is_mono()) {
        const auto& m = std::get<MonoModelSpec>(cfg.model);
        kv("r", to_string(m.r));
        kv("d", to_string(m.d));
        kv("mu", to_string(m.mu));
        real("beta", m.beta);
        real("theta", m.theta);
        real("eps", m.eps);
        real("c", m.c);
        out << "\n[kernel]\n";
        real("sigma", m.kernel.sigma);
        real("trunc", m.kernel.trunc);
        out << "\n[init]\n";
        real("center", cfg.init.center);
        real("width", cfg.init.width);
        real("mass", cfg.init.mass_H);
    } else {
        const auto& m = std::get<ComboModelSpec>(cfg.model);
        kv("rH", to_string(m.rH));
        kv("rC", to_string(m.rC));
        kv("dH", to_string(m.dH));
        kv("dC", to_string(m.dC));
        kv("muH", to_string(m.muH));
        kv("muC", to_string(m.muC));
        real("theta_H", m.theta_H);
        real("theta_C", m.theta_C);
        real("alphaH", m.alphaH);
        real("alphaC", m.alphaC);
        real("aHH", m.aHH);
        real("aHC", m.aHC);
        real("aCH", m.aCH);
        real("aCC", m.aCC);
        real("c1", m.c1);
        real("c2", m.c2);
        out << "\n[kernel]\n";
        real("sigma_H", m.kernel_H.sigma);
        real("sigma_C", m.kernel_C.sigma);
        real("trunc_H", m.kernel_H.trunc);
        real("trunc_C", m.kernel_C.trunc);
        out << "\n[init]\n";
        real("center", cfg.init.center);
        real("width", cfg.init.width);
        real("mass_H", cfg.init.mass_H);
        real("mass_C", cfg.init.mass_C);
    }

    out << "\n[output]\n";
    kv("frames", std::to_string(cfg.output.frames));
    kv("normalize", cfg.output.normalize ? "true" : "false");
    return out.str();
}

}  // namespace cellevo
