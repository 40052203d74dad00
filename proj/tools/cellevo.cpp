// cellevo command-line interface: run, sweep, analyze-dose, list.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cellevo/cellevo.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
    std::string config_path;
    std::string scenario;
    std::string out = "out";
    std::optional<int> grid_points;
    std::optional<double> dt;
    std::optional<long> steps;
    std::optional<long> save_every;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Scenario configuration file");
    cmd->add_option("--scenario", o.scenario, "Registered scenario name (see `list`)");
    cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
    cmd->add_option("--grid-points", o.grid_points, "Override grid.m (intervals on the trait axis)");
    cmd->add_option("--dt", o.dt, "Override the time step");
    cmd->add_option("--steps", o.steps, "Override the number of steps");
    cmd->add_option("--save-every", o.save_every, "Snapshot stride in steps");
    cmd->add_flag("--quiet", o.quiet, "Suppress warnings and progress output");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cellevo::ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

cellevo::ScenarioConfig load(const CommonOptions& o) {
    if (o.config_path.empty() == o.scenario.empty())
        throw cellevo::ConfigError("give exactly one of --config and --scenario");
    cellevo::ScenarioConfig cfg;
    if (!o.config_path.empty()) {
        cfg = cellevo::parse_config(read_file(o.config_path));
    } else {
        auto found = cellevo::find_scenario(o.scenario);
        if (!found) throw cellevo::ConfigError("unknown scenario '" + o.scenario + "'");
        cfg = *found;
    }
    if (o.grid_points) {
        cfg.grid.m = *o.grid_points;
        (void)cfg.make_grid();
    }
    if (o.dt) {
        cfg.time.dt = *o.dt;
        cfg.time.dt_coef.reset();
    }
    if (o.steps) cfg.time.steps = *o.steps;
    if (o.save_every) cfg.time.save_every = *o.save_every;
    return cfg;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string s = text;
    for (char& ch : s)
        if (ch == ',') ch = ' ';
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        std::size_t used = 0;
        try {
            out.push_back(std::stod(tok, &used));
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw cellevo::ConfigError("'" + tok + "' is not a number");
    }
    if (out.empty()) throw cellevo::ConfigError("empty dose list");
    return out;
}

int cmd_run(const CommonOptions& o) {
    const auto cfg = load(o);
    const auto res = cellevo::run_scenario(cfg, o.out);
    if (!o.quiet) {
        for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& f : res.files) std::cout << f.string() << "\n";
    }
    return 0;
}

int cmd_sweep(const CommonOptions& o, const std::string& c1s, const std::string& c2s, double threshold,
              unsigned threads) {
    const auto cfg = load(o);
    if (!cfg.is_combo()) throw cellevo::ConfigError("sweep requires a combined model");
    const auto& spec = std::get<cellevo::ComboModelSpec>(cfg.model);
    const auto grid = cfg.make_grid();
    const std::pair init{cellevo::gaussian_bump(grid, cfg.init.center, cfg.init.width, cfg.init.mass_H),
                         cellevo::gaussian_bump(grid, cfg.init.center, cfg.init.width, cfg.init.mass_C)};
    cellevo::SweepOptions opts;
    opts.eradication_threshold = threshold;
    opts.threads = threads;
    const auto rows = cellevo::dose_grid_sweep(spec, init, parse_list(c1s), parse_list(c2s), cfg.resolved_dt(),
                                               cfg.time.steps, opts);
    std::filesystem::create_directories(o.out);
    const auto path = std::filesystem::path(o.out) / "sweep.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cellevo::ConfigError("cannot write " + path.string());
    cellevo::write_sweep_csv(out, rows);
    bool failed = false;
    for (const auto& r : rows) {
        if (r.error.empty()) continue;
        failed = true;
        if (!o.quiet) std::cerr << "row c1=" << r.c1 << " c2=" << r.c2 << " failed: " << r.error << "\n";
    }
    if (!o.quiet) std::cout << path.string() << "\n";
    return failed ? kExitNumerical : 0;
}

int cmd_analyze(double r0, double d, double a, const std::optional<double>& c, const std::string& grid,
                const std::string& out_path) {
    std::ostringstream csv;
    if (c) {
        const auto da = cellevo::dose_analysis(r0, d, a, *c);
        std::cout << "alpha = " << cellevo::format_real(da.alpha) << "\n"
                  << "regime = " << cellevo::to_string(da.regime) << "\n";
        if (da.y_c) std::cout << "y_c = " << cellevo::format_real(*da.y_c) << "\n";
        if (da.x_c) std::cout << "x_c = " << cellevo::format_real(*da.x_c) << "\n";
        std::cout << "R_bar = " << cellevo::format_real(da.R_bar) << "\n"
                  << "resistance = " << (da.resistance() ? "yes" : "no") << "\n";
    }
    if (!grid.empty()) {
        const auto opt = cellevo::optimal_dose(r0, d, a, parse_list(grid));
        csv << "c,regime,R_bar\n";
        for (const auto& row : opt.table)
            csv << cellevo::csv_real(row.c) << ',' << cellevo::to_string(row.regime) << ','
                << cellevo::csv_real(row.R_bar) << '\n';
        if (out_path.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f) throw cellevo::ConfigError("cannot write " + out_path);
            f << csv.str();
        }
        std::cout << "c_star = " << cellevo::format_real(opt.c_star) << "\n"
                  << "threshold_c = " << cellevo::format_real(opt.threshold) << "\n";
    }
    if (!c && grid.empty()) throw cellevo::ConfigError("analyze-dose needs --c or --c-grid");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trait-structured healthy/cancer cell dynamics under therapy"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    auto* run = app.add_subcommand("run", "Run a scenario and write CSV outputs");
    add_common(run, run_opts);

    CommonOptions sweep_opts;
    std::string c1s, c2s;
    double threshold = 1e-3;
    unsigned threads = 0;
    auto* sweep = app.add_subcommand("sweep", "Sweep (c1, c2) doses of a combined model");
    add_common(sweep, sweep_opts);
    sweep->add_option("--c1", c1s, "Cytotoxic doses, comma separated")->required();
    sweep->add_option("--c2", c2s, "Cytostatic doses, comma separated")->required();
    sweep->add_option("--threshold", threshold, "Eradication threshold relative to rho_C(0)")->capture_default_str();
    sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");

    double r0 = 1.0, d = 0.245, a = 0.5;
    std::optional<double> c;
    std::string c_grid, table_out;
    auto* analyze = app.add_subcommand("analyze-dose", "Constant-dose fitness landscape analysis");
    analyze->add_option("--r0", r0, "Square root of the birth rate at x = 0")->capture_default_str();
    analyze->add_option("--d", d, "Death rate")->capture_default_str();
    analyze->add_option("--a", a, "Drug response width")->capture_default_str();
    analyze->add_option("--c", c, "Single dose to analyze");
    analyze->add_option("--c-grid", c_grid, "Dose grid, comma separated");
    analyze->add_option("--out", table_out, "Write the dose table CSV here instead of stdout");

    bool list_quiet = false;
    auto* list = app.add_subcommand("list", "List registered scenarios");
    list->add_flag("--quiet", list_quiet);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return cmd_run(run_opts);
        if (*sweep) return cmd_sweep(sweep_opts, c1s, c2s, threshold, threads);
        if (*analyze) return cmd_analyze(r0, d, a, c, c_grid, table_out);
        if (*list) {
            for (const auto& name : cellevo::list_scenarios()) std::cout << name << "\n";
            return 0;
        }
    } catch (const cellevo::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cellevo::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
