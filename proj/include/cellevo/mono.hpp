#pragma once

// Single-population selection/mutation dynamics, time-rescaled by eps:
//
//   eps dn/dt = [ (1-theta) r(x) F - d(x) - c mu(x) ] n + theta F int r(y) M(y,x) n(y) dy
//
// with F = (1 + rho)^-beta for healthy cells and F = 1 for cancer cells.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cellevo/errors.hpp"
#include "cellevo/grid.hpp"
#include "cellevo/rates.hpp"

namespace cellevo {

enum class MonoKind { HealthyHomeostasis, CancerLinear };

inline const char* to_string(MonoKind k) {
    return k == MonoKind::HealthyHomeostasis ? "healthy-homeostasis" : "cancer-linear";
}

struct MonoModelSpec {
    MonoKind kind = MonoKind::HealthyHomeostasis;
    RateSpec r = RationalDecay{2.0, 5.0};
    RateSpec d = Constant{0.4};
    RateSpec mu = Constant{0.0};
    double beta = 1.0;
    double theta = 0.0;
    KernelSpec kernel{};
    double eps = 0.01;
    double c = 0.0;

    bool operator==(const MonoModelSpec&) const = default;

    void validate() const {
        if (!(theta >= 0.0 && theta < 1.0)) throw ConfigError("model: theta must lie in [0, 1)");
        if (!(eps > 0.0)) throw ConfigError("model: eps must be positive");
        if (kind == MonoKind::HealthyHomeostasis && !(beta > 0.0))
            throw ConfigError("model: beta must be positive for healthy-homeostasis");
        if (!(c >= 0.0)) throw ConfigError("model: dose c must be nonnegative");
    }
};

/// Net growth rate. Healthy cells see the homeostasis factor (1+rho)^-beta;
/// cancer cells ignore rho.
inline double net_growth(const MonoModelSpec& spec, double x, double rho, double c) {
    const double birth = eval_rate(spec.r, x);
    const double factor = spec.kind == MonoKind::HealthyHomeostasis ? std::pow(1.0 + rho, -spec.beta) : 1.0;
    return birth * factor - eval_rate(spec.d, x) - c * eval_rate(spec.mu, x);
}

struct SolverState {
    double t = 0.0;
    DensityField n;
    double rho = 0.0;
    /// Fitness average int p (r - d - c mu); NaN for healthy cells.
    double I = std::numeric_limits<double>::quiet_NaN();
    /// Same average without the dose term.
    double I_nodose = std::numeric_limits<double>::quiet_NaN();
};

struct TrajectoryRecord {
    double t;
    double rho;
    double xbar;   ///< argmax node, lowest index on ties
    double xmean;  ///< mass-weighted mean trait
    double I;
    double I_nodose;
    double min_n;
};

struct Snapshot {
    double t;
    DensityField n;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    std::vector<Snapshot> snapshots;
    std::vector<std::string> warnings;
};

enum class RunMode { Imex, ExactLinear, Renormalized };

inline const char* to_string(RunMode m) {
    switch (m) {
        case RunMode::Imex: return "imex";
        case RunMode::ExactLinear: return "exact-linear";
        case RunMode::Renormalized: return "renormalized";
    }
    return "?";
}

inline constexpr double kOverflowThreshold = 1e250;

/// Precomputed rates and kernel for repeated stepping of one model.
class MonoSolver {
public:
    MonoSolver(const MonoModelSpec& spec, const Grid& grid)
        : spec_(spec),
          grid_(grid),
          r_(sample_rate(spec.r, grid)),
          d_(sample_rate(spec.d, grid)),
          mu_(sample_rate(spec.mu, grid)) {
        spec_.validate();
        if (spec_.theta > 0.0) kernel_.emplace(build_kernel(grid, spec_.kernel));
    }

    const MonoModelSpec& spec() const { return spec_; }
    const Grid& grid() const { return grid_; }
    const std::vector<double>& r() const { return r_; }
    const std::vector<double>& d() const { return d_; }
    const std::vector<double>& mu() const { return mu_; }

    /// Net growth r - d - c mu on every node (cancer form, no homeostasis factor).
    std::vector<double> cancer_fitness() const {
        std::vector<double> out(grid_.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = r_[i] - d_[i] - spec_.c * mu_[i];
        return out;
    }

    SolverState make_state(DensityField n, double t = 0.0) const {
        SolverState s{t, std::move(n)};
        refresh(s);
        return s;
    }

    /// Recompute rho and the fitness averages from the density.
    void refresh(SolverState& s) const {
        s.rho = integrate(s.n);
        if (spec_.kind != MonoKind::CancerLinear) return;
        if (!(s.rho > 0.0)) throw NumericalError("state has zero mass");
        double with_dose = 0.0, without = 0.0;
        for (std::size_t i = 0; i < s.n.size(); ++i) {
            const double w = grid_.weight(i) * s.n[i];
            without += w * (r_[i] - d_[i]);
            with_dose += w * (r_[i] - d_[i] - spec_.c * mu_[i]);
        }
        s.I = with_dose / s.rho;
        s.I_nodose = without / s.rho;
    }

    /// One sign-split IMEX step. With `renormalized` the density is a
    /// probability density p, the rate is shifted by -I and p is rescaled to
    /// unit mass afterwards.
    SolverState step(const SolverState& s, double dt, bool renormalized = false) const {
        if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
        const double inv_eps = 1.0 / spec_.eps;
        const double factor =
            spec_.kind == MonoKind::HealthyHomeostasis ? std::pow(1.0 + s.rho, -spec_.beta) : 1.0;
        const double shift = renormalized ? s.I : 0.0;

        const bool mutate = kernel_.has_value();
        std::vector<double> gain;
        if (mutate) {
            std::vector<double> source(grid_.size());
            for (std::size_t i = 0; i < source.size(); ++i) source[i] = r_[i] * s.n[i];
            gain.resize(grid_.size());
            kernel_->apply(source, gain);
        }

        SolverState out{s.t + dt, DensityField(grid_)};
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double rate =
                ((1.0 - spec_.theta) * r_[i] * factor - d_[i] - spec_.c * mu_[i] - shift) * inv_eps;
            const double up = std::max(rate, 0.0);
            const double down = std::min(rate, 0.0);
            double numer = (1.0 + dt * up) * s.n[i];
            if (mutate) numer += dt * spec_.theta * factor * gain[i] * inv_eps;
            const double v = numer / (1.0 - dt * down);
            if (!std::isfinite(v))
                throw NumericalError("IMEX step produced a non-finite value at node " + std::to_string(i) +
                                     " (x = " + format_real(grid_.x(i)) + ")");
            out.n[i] = v;
        }
        if (renormalized) {
            const double mass = integrate(out.n);
            for (double& v : out.n.values) v /= mass;
        }
        refresh(out);
        return out;
    }

    /// Exact solution n0 exp(R t / eps) of the mutation-free cancer model.
    DensityField exact_linear(const DensityField& n0, double t) const {
        if (spec_.kind != MonoKind::CancerLinear)
            throw ConfigError("exact-linear solution requires the cancer-linear model");
        if (spec_.theta != 0.0) throw ConfigError("exact-linear solution requires theta = 0");
        DensityField out(grid_);
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double rate = r_[i] - d_[i] - spec_.c * mu_[i];
            out[i] = std::exp(rate * t / spec_.eps) * n0[i];
        }
        return out;
    }

private:
    MonoModelSpec spec_;
    Grid grid_;
    std::vector<double> r_, d_, mu_;
    std::optional<KernelMatrix> kernel_;
};

inline SolverState step_imex(const SolverState& state, const MonoModelSpec& spec, double dt) {
    return MonoSolver(spec, state.n.grid).step(state, dt);
}

inline DensityField step_exact_linear(const DensityField& n0, const MonoModelSpec& spec, double t) {
    return MonoSolver(spec, n0.grid).exact_linear(n0, t);
}

struct Renormalized {
    DensityField p;
    double I;
};

/// p = n / rho together with I = int p (r - d - c mu).
inline Renormalized renormalize(const SolverState& state, const MonoModelSpec& spec) {
    if (!(state.rho > 0.0)) throw NumericalError("renormalize: rho must be positive");
    DensityField p = state.n;
    for (double& v : p.values) v /= state.rho;
    double I = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double x = p.grid.x(i);
        I += p.grid.weight(i) * p[i] *
             (eval_rate(spec.r, x) - eval_rate(spec.d, x) - spec.c * eval_rate(spec.mu, x));
    }
    return {std::move(p), I};
}

namespace detail {

inline TrajectoryRecord make_record(const SolverState& s) {
    double lo = s.n[0];
    for (double v : s.n.values) lo = std::min(lo, v);
    return {s.t, s.rho, argmax_trait(s.n), mean_trait(s.n), s.I, s.I_nodose, lo};
}

/// Number of steps of size dt needed to reach t_final; the last one may be shorter.
inline long step_count(double dt, double t_final) {
    const double ratio = t_final / dt;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) return static_cast<long>(nearest);
    return static_cast<long>(std::ceil(ratio));
}

}  // namespace detail

/// Integrate from `init` to `t_final`. Records every step; snapshots every
/// `save_every` steps plus the initial and final states.
inline Trajectory run(const MonoModelSpec& spec, const DensityField& init, double dt, double t_final,
                      long save_every, RunMode mode) {
    if (!(dt > 0.0)) throw ConfigError("run: dt must be positive");
    if (!(t_final >= 0.0)) throw ConfigError("run: t_final must be nonnegative");
    if (save_every < 1) throw ConfigError("run: save_every must be >= 1");
    if (mode != RunMode::Imex && spec.kind != MonoKind::CancerLinear)
        throw ConfigError(std::string("run: mode ") + to_string(mode) + " requires the cancer-linear model");

    const MonoSolver solver(spec, init.grid);
    const long steps = detail::step_count(dt, t_final);
    Trajectory traj;

    SolverState state = solver.make_state(init);
    if (mode == RunMode::Renormalized) {
        for (double& v : state.n.values) v /= state.rho;
        solver.refresh(state);
    }
    traj.records.push_back(detail::make_record(state));
    traj.snapshots.push_back({state.t, state.n});

    for (long k = 1; k <= steps; ++k) {
        if (mode == RunMode::ExactLinear) {
            const double t = k == steps ? t_final : static_cast<double>(k) * dt;
            state = solver.make_state(solver.exact_linear(init, t), t);
        } else {
            const double h = std::min(dt, t_final - state.t);
            state = solver.step(state, h, mode == RunMode::Renormalized);
            if (k == steps) state.t = t_final;
        }
        if (mode != RunMode::Renormalized) {
            const double peak = state.n[argmax_node(state.n.values)];
            if (peak > kOverflowThreshold)
                throw NumericalError("density exceeded " + format_real(kOverflowThreshold) + " at t = " +
                                     format_real(state.t) + "; use the renormalized mode for this run");
        }
        traj.records.push_back(detail::make_record(state));
        if (k % save_every == 0 || k == steps) traj.snapshots.push_back({state.t, state.n});
    }

    if (upper_tail_mass_fraction(state.n) > 1e-3)
        traj.warnings.push_back("more than 0.1% of the mass sits in the top 2% of the trait domain; "
                                "consider a larger x_max");
    return traj;
}

}  // namespace cellevo
