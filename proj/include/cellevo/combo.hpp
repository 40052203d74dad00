#pragma once

// Coupled healthy/cancer populations under a cytotoxic dose c1 and a
// cytostatic dose c2:
//
//   dn/dt = theta/(1 + alpha c2) ( int r(y) M(y,x) n(y) dy - r(x) n(x) )
//         + ( r(x)/(1 + alpha c2) - d(x) I(t) - c1 mu(x) ) n(x)
//
// with I_H = aHH rho_H + aHC rho_C and I_C = aCH rho_H + aCC rho_C.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cellevo/errors.hpp"
#include "cellevo/grid.hpp"
#include "cellevo/mono.hpp"
#include "cellevo/rates.hpp"

namespace cellevo {

struct ComboModelSpec {
    RateSpec rH = RationalDecay{1.5, 1.0};
    RateSpec rC = RationalDecay{3.0, 1.0};
    RateSpec dH = Affine{0.5, 0.1};
    RateSpec dC = Affine{0.5, 0.3};
    RateSpec muH = InverseQuadratic{0.2, 0.7};
    RateSpec muC = InverseQuadratic{0.4, 0.7};
    double theta_H = 0.1;
    double theta_C = 0.1;
    double alphaH = 0.01;
    double alphaC = 1.0;
    double aHH = 1.0;
    double aHC = 0.07;
    double aCH = 0.01;
    double aCC = 1.0;
    KernelSpec kernel_H{0.01, 5.0};
    KernelSpec kernel_C{0.01, 5.0};
    double c1 = 0.0;
    double c2 = 0.0;

    bool operator==(const ComboModelSpec&) const = default;

    void validate() const {
        for (double th : {theta_H, theta_C})
            if (!(th >= 0.0 && th < 1.0)) throw ConfigError("model: theta must lie in [0, 1)");
        if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw ConfigError("model: doses must be nonnegative");
        if (!(alphaH >= 0.0) || !(alphaC >= 0.0))
            throw ConfigError("model: cytostatic sensitivities must be nonnegative");
        for (double a : {aHH, aHC, aCH, aCC})
            if (!(a >= 0.0)) throw ConfigError("model: interaction rates must be nonnegative");
    }
};

/// 1 / (1 + alpha c2)
inline double cytostatic_factor(double alpha, double c2) { return 1.0 / (1.0 + alpha * c2); }

struct GrowthPair {
    double RH;
    double RC;
};

inline GrowthPair net_growth_pair(const ComboModelSpec& s, double x, double IH, double IC) {
    const double fH = cytostatic_factor(s.alphaH, s.c2);
    const double fC = cytostatic_factor(s.alphaC, s.c2);
    return {eval_rate(s.rH, x) * (1.0 - s.theta_H) * fH - eval_rate(s.dH, x) * IH - eval_rate(s.muH, x) * s.c1,
            eval_rate(s.rC, x) * (1.0 - s.theta_C) * fC - eval_rate(s.dC, x) * IC - eval_rate(s.muC, x) * s.c1};
}

struct ComboState {
    double t = 0.0;
    DensityField nH;
    DensityField nC;
    double rhoH = 0.0;
    double rhoC = 0.0;
    double IH = 0.0;
    double IC = 0.0;
};

/// Bound on dt * |R-| above which a step is rejected.
inline constexpr double kMaxStiffness = 50.0;

class ComboSolver {
public:
    ComboSolver(const ComboModelSpec& spec, const Grid& grid)
        : spec_(spec),
          grid_(grid),
          pops_{Population::make(spec.rH, spec.dH, spec.muH, spec.theta_H, spec.alphaH, spec.kernel_H, spec, grid),
                Population::make(spec.rC, spec.dC, spec.muC, spec.theta_C, spec.alphaC, spec.kernel_C, spec, grid)} {
        spec_.validate();
    }

    const ComboModelSpec& spec() const { return spec_; }
    const Grid& grid() const { return grid_; }

    ComboState make_state(DensityField nH, DensityField nC, double t = 0.0) const {
        ComboState s{t, std::move(nH), std::move(nC)};
        refresh(s);
        return s;
    }

    void refresh(ComboState& s) const {
        s.rhoH = integrate(s.nH);
        s.rhoC = integrate(s.nC);
        s.IH = spec_.aHH * s.rhoH + spec_.aHC * s.rhoC;
        s.IC = spec_.aCH * s.rhoH + spec_.aCC * s.rhoC;
    }

    /// Per-node net growth (mutation loss included) for population 0 (H) or 1 (C).
    std::vector<double> rates(const ComboState& s, int pop) const {
        const Population& p = pops_[pop];
        const double I = pop == 0 ? s.IH : s.IC;
        std::vector<double> out(grid_.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = p.r[i] * (1.0 - p.theta) * p.factor - p.d[i] * I - p.mu[i] * spec_.c1;
        return out;
    }

    /// Mutation gain theta/(1+alpha c2) int r(y) M(y,x) n(y) dy on every node.
    std::vector<double> mutation_gain(const ComboState& s, int pop) const {
        const Population& p = pops_[pop];
        std::vector<double> gain(grid_.size(), 0.0);
        if (!p.kernel) return gain;
        const DensityField& n = pop == 0 ? s.nH : s.nC;
        std::vector<double> source(grid_.size());
        for (std::size_t i = 0; i < source.size(); ++i) source[i] = p.r[i] * n[i];
        p.kernel->apply(source, gain);
        for (double& g : gain) g *= p.theta * p.factor;
        return gain;
    }

    ComboState step(const ComboState& s, double dt) const {
        if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
        ComboState out{s.t + dt, DensityField(grid_), DensityField(grid_)};
        for (int pop = 0; pop < 2; ++pop) {
            const auto R = rates(s, pop);
            const auto gain = mutation_gain(s, pop);
            const DensityField& n = pop == 0 ? s.nH : s.nC;
            DensityField& next = pop == 0 ? out.nH : out.nC;
            const char* name = pop == 0 ? "healthy" : "cancer";
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                const double down = std::min(R[i], 0.0);
                if (-dt * down >= kMaxStiffness)
                    throw NumericalError(std::string("step too stiff for the ") + name +
                                         " population at node " + std::to_string(i) + ": dt*|R-| = " +
                                         format_real(-dt * down));
                const double v = ((1.0 + dt * std::max(R[i], 0.0)) * n[i] + dt * gain[i]) / (1.0 - dt * down);
                if (!std::isfinite(v))
                    throw NumericalError(std::string("non-finite value in the ") + name + " population at node " +
                                         std::to_string(i));
                next[i] = v;
            }
        }
        refresh(out);
        return out;
    }

private:
    struct Population {
        std::vector<double> r, d, mu;
        double theta;
        double factor;
        std::optional<KernelMatrix> kernel;

        static Population make(const RateSpec& r, const RateSpec& d, const RateSpec& mu, double theta,
                               double alpha, const KernelSpec& ks, const ComboModelSpec& spec,
                               const Grid& grid) {
            Population p{sample_rate(r, grid), sample_rate(d, grid), sample_rate(mu, grid), theta,
                         cytostatic_factor(alpha, spec.c2), std::nullopt};
            if (theta > 0.0) p.kernel.emplace(build_kernel(grid, ks));
            return p;
        }
    };

    ComboModelSpec spec_;
    Grid grid_;
    Population pops_[2];
};

inline ComboState step(const ComboState& state, const ComboModelSpec& spec, double dt) {
    return ComboSolver(spec, state.nH.grid).step(state, dt);
}

struct ComboTrajectory {
    Trajectory healthy;  ///< records carry I_H in the I slot
    Trajectory cancer;   ///< records carry I_C in the I slot
};

namespace detail {

inline TrajectoryRecord combo_record(double t, const DensityField& n, double rho, double I) {
    double lo = n[0];
    for (double v : n.values) lo = std::min(lo, v);
    return {t, rho, argmax_trait(n), mean_trait(n), I, std::numeric_limits<double>::quiet_NaN(), lo};
}

inline void push_records(ComboTrajectory& tr, const ComboState& s) {
    tr.healthy.records.push_back(combo_record(s.t, s.nH, s.rhoH, s.IH));
    tr.cancer.records.push_back(combo_record(s.t, s.nC, s.rhoC, s.IC));
}

inline void push_snapshots(ComboTrajectory& tr, const ComboState& s) {
    tr.healthy.snapshots.push_back({s.t, s.nH});
    tr.cancer.snapshots.push_back({s.t, s.nC});
}

}  // namespace detail

inline ComboTrajectory run_combined(const ComboModelSpec& spec, const std::pair<DensityField, DensityField>& init,
                                    double dt, long steps, long save_every) {
    if (steps < 0) throw ConfigError("run_combined: steps must be nonnegative");
    if (save_every < 1) throw ConfigError("run_combined: save_every must be >= 1");
    const ComboSolver solver(spec, init.first.grid);
    ComboTrajectory tr;
    ComboState s = solver.make_state(init.first, init.second);
    detail::push_records(tr, s);
    detail::push_snapshots(tr, s);
    for (long k = 1; k <= steps; ++k) {
        s = solver.step(s, dt);
        detail::push_records(tr, s);
        if (k % save_every == 0 || k == steps) detail::push_snapshots(tr, s);
    }
    for (auto* part : {&tr.healthy, &tr.cancer}) {
        const DensityField& last = part->snapshots.back().n;
        if (upper_tail_mass_fraction(last) > 1e-3)
            part->warnings.push_back("more than 0.1% of the mass sits in the top 2% of the trait domain");
    }
    return tr;
}

struct SweepRow {
    double c1 = 0.0;
    double c2 = 0.0;
    double rhoH_final = std::numeric_limits<double>::quiet_NaN();
    double rhoC_final = std::numeric_limits<double>::quiet_NaN();
    double xbarC_final = std::numeric_limits<double>::quiet_NaN();
    bool eradicated = false;
    std::string error;  ///< empty on success
};

struct SweepOptions {
    double eradication_threshold = 1e-3;  ///< relative to rho_C(0)
    unsigned threads = 0;                 ///< 0 = hardware concurrency
};

/// Every (c1, c2) pair, c1 outer. Row order is independent of scheduling.
inline std::vector<SweepRow> dose_grid_sweep(const ComboModelSpec& spec,
                                             const std::pair<DensityField, DensityField>& init,
                                             const std::vector<double>& c1_list, const std::vector<double>& c2_list,
                                             double dt, long steps, const SweepOptions& opts = {}) {
    if (c1_list.empty() || c2_list.empty()) throw ConfigError("dose_grid_sweep: empty dose list");
    std::vector<SweepRow> rows;
    for (double c1 : c1_list)
        for (double c2 : c2_list) {
            SweepRow row;
            row.c1 = c1;
            row.c2 = c2;
            rows.push_back(std::move(row));
        }

    const double rhoC0 = integrate(init.second);
    auto work = [&](SweepRow& row) {
        try {
            ComboModelSpec s = spec;
            s.c1 = row.c1;
            s.c2 = row.c2;
            const ComboSolver solver(s, init.first.grid);
            ComboState st = solver.make_state(init.first, init.second);
            for (long k = 0; k < steps; ++k) st = solver.step(st, dt);
            row.rhoH_final = st.rhoH;
            row.rhoC_final = st.rhoC;
            row.xbarC_final = argmax_trait(st.nC);
            row.eradicated = st.rhoC < opts.eradication_threshold * rhoC0;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(rows.size()));
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < rows.size(); i = next++) work(rows[i]);
            });
    }
    return rows;
}

}  // namespace cellevo
