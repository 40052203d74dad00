#pragma once

// Scenario execution and CSV/meta emission.
//
// Files written by run_scenario into the output directory:
//   timeseries.csv  t,rho_H,rho_C,xbar_H,xbar_C,I_H_or_I,I_C   (one row per step)
//   snapshots.csv   t,population,x,n                            (long format)
//   oracle.csv      t,x_oracle       (single-population models only)
//   meta.ini        echoed configuration plus [oracle] and [assumptions]
// Dose analyses write dose_table.csv and meta.ini instead.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cellevo/assumptions.hpp"
#include "cellevo/combo.hpp"
#include "cellevo/config.hpp"
#include "cellevo/errors.hpp"
#include "cellevo/mono.hpp"
#include "cellevo/theory.hpp"

namespace cellevo {

/// 17 significant digits, scientific notation; "nan" for NaN.
inline std::string csv_real(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

/// Closed-form fitness parameters when a cancer model uses the
/// r0^2/(1+x^2), constant d, B/(a^2+x^2) families.
struct DoseForm {
    double r0 = 0.0;
    double d = 0.0;
    double a = 0.0;
    double alpha = 0.0;
};

inline std::optional<DoseForm> dose_form(const MonoModelSpec& m) {
    const auto* r = std::get_if<RationalDecay>(&m.r);
    const auto* d = std::get_if<Constant>(&m.d);
    const auto* mu = std::get_if<InverseQuadratic>(&m.mu);
    if (!r || !d || !mu || r->k != 1.0 || r->amplitude <= 0.0 || m.c <= 0.0 || mu->numerator <= 0.0)
        return std::nullopt;
    return DoseForm{std::sqrt(r->amplitude), d->value, std::abs(mu->b), std::sqrt(m.c * mu->numerator)};
}

struct ScenarioResult {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
    /// Final diagnostics, NaN where not applicable.
    double rhoH = std::numeric_limits<double>::quiet_NaN();
    double rhoC = std::numeric_limits<double>::quiet_NaN();
    double xbarH = std::numeric_limits<double>::quiet_NaN();
    double xbarC = std::numeric_limits<double>::quiet_NaN();
    double I = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

/// Collects file contents and writes them all at the end; on failure nothing
/// that was written survives.
class OutputSet {
public:
    explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

    std::ostringstream& file(const std::string& name) {
        names_.push_back(name);
        bodies_.emplace_back();
        return bodies_.back();
    }

    std::vector<std::filesystem::path> commit() {
        std::vector<std::filesystem::path> written;
        try {
            std::filesystem::create_directories(dir_);
            for (std::size_t i = 0; i < names_.size(); ++i) {
                const auto path = dir_ / names_[i];
                std::ofstream out(path, std::ios::binary);
                if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
                written.push_back(path);
                out << bodies_[i].str();
                if (!out) throw std::runtime_error("failed writing " + path.string());
            }
        } catch (...) {
            std::error_code ec;
            for (const auto& p : written) std::filesystem::remove(p, ec);
            throw;
        }
        return written;
    }

private:
    std::filesystem::path dir_;
    std::vector<std::string> names_;
    std::vector<std::ostringstream> bodies_;
};

inline void write_assumptions(std::ostream& meta, const AssumptionReport& rep) {
    meta << "\n[assumptions]\n";
    for (const auto& c : rep.checks) meta << c.name << " = " << (c.passed ? "pass" : "fail") << "\n";
}

inline void write_snapshots(std::ostream& out, const Trajectory& tr, const char* pop, bool normalize) {
    for (const auto& s : tr.snapshots) {
        const double scale = normalize ? 1.0 / integrate(s.n) : 1.0;
        for (std::size_t i = 0; i < s.n.size(); ++i)
            out << csv_real(s.t) << ',' << pop << ',' << csv_real(s.n.grid.x(i)) << ',' << csv_real(s.n[i] * scale)
                << '\n';
    }
}

inline constexpr const char* kTimeseriesHeader = "t,rho_H,rho_C,xbar_H,xbar_C,I_H_or_I,I_C\n";

inline ScenarioResult run_dose(const ScenarioConfig& cfg, OutputSet& files) {
    const auto& m = std::get<DoseSpec>(cfg.model);
    if (m.c_grid.empty()) throw ConfigError("dose.c_grid must not be empty");
    const OptimalDose opt = optimal_dose(m.r0, m.d, m.a, m.c_grid);

    auto& table = files.file("dose_table.csv");
    table << "c,alpha,regime,y_c,x_c,R_bar\n";
    for (double c : m.c_grid) {
        const DoseAnalysis da = dose_analysis(m.r0, m.d, m.a, c);
        table << csv_real(c) << ',' << csv_real(da.alpha) << ',' << to_string(da.regime) << ','
              << csv_real(da.y_c.value_or(std::nan(""))) << ',' << csv_real(da.x_c.value_or(std::nan(""))) << ','
              << csv_real(da.R_bar) << '\n';
    }
    auto& meta = files.file("meta.ini");
    meta << serialize_config(cfg) << "\n[oracle]\n"
         << "c_star = " << format_real(opt.c_star) << "\n"
         << "threshold_c = " << format_real(opt.threshold) << "\n";
    return {};
}

inline ScenarioResult run_mono(const ScenarioConfig& cfg, OutputSet& files) {
    const auto& m = std::get<MonoModelSpec>(cfg.model);
    const Grid grid = cfg.make_grid();
    const double dt = cfg.resolved_dt();
    const DensityField init = gaussian_bump(grid, cfg.init.center, cfg.init.width, cfg.init.mass_H);
    const AssumptionReport rep = validate_assumptions(m, grid);

    const Trajectory tr = run(m, init, dt, dt * static_cast<double>(cfg.time.steps), cfg.resolved_save_every(),
                              cfg.time.mode);

    ScenarioResult res;
    res.warnings = tr.warnings;
    for (const auto& f : rep.failures()) res.warnings.push_back("assumption not satisfied: " + f);

    const bool healthy = m.kind == MonoKind::HealthyHomeostasis;
    const auto form_opt = healthy ? std::nullopt : dose_form(m);
    const bool has_form = form_opt.has_value();
    const DoseForm form = form_opt.value_or(DoseForm{});
    const auto nan = std::numeric_limits<double>::quiet_NaN();

    auto& ts = files.file("timeseries.csv");
    ts << kTimeseriesHeader;
    for (const auto& r : tr.records) {
        if (healthy)
            ts << csv_real(r.t) << ',' << csv_real(r.rho) << ",nan," << csv_real(r.xbar) << ",nan,nan,nan\n";
        else
            ts << csv_real(r.t) << ",nan," << csv_real(r.rho) << ",nan," << csv_real(r.xbar) << ',' << csv_real(r.I)
               << ",nan\n";
    }

    auto& snaps = files.file("snapshots.csv");
    snaps << "t,population,x,n\n";
    write_snapshots(snaps, tr, healthy ? "H" : "C", cfg.output.normalize);

    auto& oracle = files.file("oracle.csv");
    oracle << "t,x_oracle\n";
    for (const auto& r : tr.records) {
        double x = nan;
        try {
            if (healthy) x = fittest_trait_from_rho(m, r.rho, grid.x_max());
            else if (has_form) x = concentration_from_I(form.r0, form.d, form.a, form.alpha, r.I).value_or(nan);
        } catch (const NumericalError&) {
        }
        oracle << csv_real(r.t) << ',' << csv_real(x) << '\n';
    }

    auto& meta = files.file("meta.ini");
    meta << serialize_config(cfg) << "\n[resolved]\n"
         << "dt = " << format_real(dt) << "\n"
         << "save_every = " << cfg.resolved_save_every() << "\n"
         << "\n[oracle]\n";
    if (healthy) {
        const double r0 = eval_rate(m.r, 0.0), d0 = eval_rate(m.d, 0.0);
        if (r0 >= d0 && d0 > 0.0) meta << "homeostasis_rho = " << format_real(homeostasis_rho(r0, d0, m.beta)) << "\n";
    } else {
        if (has_form) {
            const DoseAnalysis da = dose_analysis(form.r0, form.d, form.a, form.alpha * form.alpha);
            meta << "regime = " << to_string(da.regime) << "\n";
            if (da.x_c) meta << "x_c = " << format_real(*da.x_c) << "\n";
            meta << "R_bar = " << format_real(da.R_bar) << "\n";
        }
        MonoSolver solver(m, grid);
        const auto fit = solver.cancer_fitness();
        meta << "grid_fitness_argmax = " << format_real(grid.x(argmax_node(fit))) << "\n";
    }
    write_assumptions(meta, rep);

    const auto& last = tr.records.back();
    (healthy ? res.rhoH : res.rhoC) = last.rho;
    (healthy ? res.xbarH : res.xbarC) = last.xbar;
    res.I = last.I;
    return res;
}

inline ScenarioResult run_combo(const ScenarioConfig& cfg, OutputSet& files) {
    const auto& m = std::get<ComboModelSpec>(cfg.model);
    const Grid grid = cfg.make_grid();
    const double dt = cfg.resolved_dt();
    const std::pair init{gaussian_bump(grid, cfg.init.center, cfg.init.width, cfg.init.mass_H),
                         gaussian_bump(grid, cfg.init.center, cfg.init.width, cfg.init.mass_C)};
    const AssumptionReport rep = validate_assumptions(m, grid);
    const ComboTrajectory tr = run_combined(m, init, dt, cfg.time.steps, cfg.resolved_save_every());

    ScenarioResult res;
    res.warnings = tr.healthy.warnings;
    res.warnings.insert(res.warnings.end(), tr.cancer.warnings.begin(), tr.cancer.warnings.end());
    for (const auto& f : rep.failures()) res.warnings.push_back("assumption not satisfied: " + f);

    auto& ts = files.file("timeseries.csv");
    ts << kTimeseriesHeader;
    for (std::size_t k = 0; k < tr.healthy.records.size(); ++k) {
        const auto& h = tr.healthy.records[k];
        const auto& c = tr.cancer.records[k];
        ts << csv_real(h.t) << ',' << csv_real(h.rho) << ',' << csv_real(c.rho) << ',' << csv_real(h.xbar) << ','
           << csv_real(c.xbar) << ',' << csv_real(h.I) << ',' << csv_real(c.I) << '\n';
    }
    auto& snaps = files.file("snapshots.csv");
    snaps << "t,population,x,n\n";
    write_snapshots(snaps, tr.healthy, "H", cfg.output.normalize);
    write_snapshots(snaps, tr.cancer, "C", cfg.output.normalize);

    auto& meta = files.file("meta.ini");
    meta << serialize_config(cfg) << "\n[resolved]\n"
         << "dt = " << format_real(dt) << "\n"
         << "save_every = " << cfg.resolved_save_every() << "\n";
    write_assumptions(meta, rep);

    res.rhoH = tr.healthy.records.back().rho;
    res.rhoC = tr.cancer.records.back().rho;
    res.xbarH = tr.healthy.records.back().xbar;
    res.xbarC = tr.cancer.records.back().xbar;
    return res;
}

}  // namespace detail

/// Run a configured scenario and write its outputs into `out_dir`. Nothing is
/// left behind when the run fails.
inline ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    detail::OutputSet files(out_dir);
    ScenarioResult res;
    if (cfg.is_dose()) res = detail::run_dose(cfg, files);
    else if (cfg.is_mono()) res = detail::run_mono(cfg, files);
    else res = detail::run_combo(cfg, files);
    res.files = files.commit();
    return res;
}

inline ScenarioResult run_scenario(const std::string& name, const std::filesystem::path& out_dir) {
    auto cfg = find_scenario(name);
    if (!cfg) throw ConfigError("unknown scenario '" + name + "'");
    return run_scenario(*cfg, out_dir);
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "c1,c2,rho_H_final,rho_C_final,xbar_C_final,eradicated\n";
    for (const auto& r : rows)
        out << csv_real(r.c1) << ',' << csv_real(r.c2) << ',' << csv_real(r.rhoH_final) << ','
            << csv_real(r.rhoC_final) << ',' << csv_real(r.xbarC_final) << ','
            << (r.error.empty() ? (r.eradicated ? "true" : "false") : "error") << '\n';
}

}  // namespace cellevo
