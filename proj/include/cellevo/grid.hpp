#pragma once

// Uniform trait grids, trapezoid quadrature and the Hopf-Cole transform.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cellevo/errors.hpp"

namespace cellevo {

/// Uniform grid on [0, x_max] with m+1 nodes x_i = i*dx.
class Grid {
public:
    Grid(int m, double x_max) : m_(m), x_max_(x_max), dx_(x_max / m) {}

    int m() const { return m_; }
    double x_max() const { return x_max_; }
    double dx() const { return dx_; }
    std::size_t size() const { return static_cast<std::size_t>(m_) + 1; }

    double x(std::size_t i) const {
        return i == static_cast<std::size_t>(m_) ? x_max_ : static_cast<double>(i) * dx_;
    }

    /// Trapezoid weight of node i (half weight at both endpoints).
    double weight(std::size_t i) const {
        return (i == 0 || i == static_cast<std::size_t>(m_)) ? 0.5 * dx_ : dx_;
    }

    std::vector<double> nodes() const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = x(i);
        return out;
    }

    /// Index of the node nearest to `x`, clamped to the grid.
    std::size_t nearest(double x) const {
        const double k = std::round(x / dx_);
        if (k <= 0.0) return 0;
        if (k >= m_) return static_cast<std::size_t>(m_);
        return static_cast<std::size_t>(k);
    }

    bool operator==(const Grid&) const = default;

private:
    int m_;
    double x_max_;
    double dx_;
};

inline Grid make_grid(int m, double x_max) {
    if (m < 2) throw ConfigError("grid: m must be >= 2, got " + std::to_string(m));
    if (!(x_max > 0.0) || !std::isfinite(x_max))
        throw ConfigError("grid: x_max must be positive and finite");
    return Grid(m, x_max);
}

/// Nonnegative per-node density on a grid.
struct DensityField {
    Grid grid;
    std::vector<double> values;

    DensityField(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size())
            throw ConfigError("density: value count does not match grid size");
    }
    explicit DensityField(Grid g) : grid(g), values(g.size(), 0.0) {}

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

/// u = eps * ln(n) on a grid.
struct LogField {
    Grid grid;
    std::vector<double> values;
};

inline double integrate(const Grid& grid, std::span<const double> f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!std::isfinite(f[i])) throw NumericalError("integrate: non-finite value at node " + std::to_string(i));
        sum += grid.weight(i) * f[i];
    }
    return sum;
}

inline double integrate(const DensityField& f) { return integrate(f.grid, f.values); }

/// Mass of exp(-(x-center)^2/eps), rescaled to `target_mass`.
inline DensityField gaussian_bump(const Grid& grid, double center, double eps, double target_mass) {
    if (!(eps > 0.0)) throw ConfigError("gaussian_bump: eps must be positive");
    if (!(target_mass > 0.0)) throw ConfigError("gaussian_bump: target_mass must be positive");
    if (center < 0.0 || center > grid.x_max())
        throw ConfigError("gaussian_bump: center outside [0, x_max]");
    DensityField out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double z = grid.x(i) - center;
        out[i] = std::exp(-z * z / eps);
    }
    const double scale = target_mass / integrate(out);
    for (double& v : out.values) v *= scale;
    return out;
}

inline constexpr double kDefaultLogFloor = 1e-300;

inline LogField hopf_cole(const DensityField& n, double eps, double floor = kDefaultLogFloor) {
    LogField u{n.grid, std::vector<double>(n.size())};
    for (std::size_t i = 0; i < n.size(); ++i) u.values[i] = eps * std::log(std::max(n[i], floor));
    return u;
}

inline DensityField inverse_hopf_cole(const LogField& u, double eps) {
    DensityField n(u.grid);
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = std::exp(u.values[i] / eps);
    return n;
}

// Diagnostics shared by the solvers.

/// Index of the largest value; the lowest index wins ties.
inline std::size_t argmax_node(std::span<const double> v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

inline double argmax_trait(const DensityField& f) { return f.grid.x(argmax_node(f.values)); }

/// Mass-weighted mean trait.
inline double mean_trait(const DensityField& f) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num += f.grid.weight(i) * f.grid.x(i) * f[i];
        den += f.grid.weight(i) * f[i];
    }
    return den > 0.0 ? num / den : 0.0;
}

/// Trait below which a fraction q of the mass lies (piecewise-linear cumulative).
inline double mass_quantile(const DensityField& f, double q) {
    const double total = integrate(f);
    if (!(total > 0.0)) throw NumericalError("mass_quantile: zero mass");
    const double target = q * total;
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double cell = 0.5 * f.grid.dx() * (f[i] + f[i + 1]);
        if (cum + cell >= target && cell > 0.0) {
            return f.grid.x(i) + f.grid.dx() * (target - cum) / cell;
        }
        cum += cell;
    }
    return f.grid.x_max();
}

/// Fraction of mass held by the top `fraction` of the trait domain.
inline double upper_tail_mass_fraction(const DensityField& f, double fraction = 0.02) {
    const double total = integrate(f);
    if (!(total > 0.0)) return 0.0;
    const double cut = (1.0 - fraction) * f.grid.x_max();
    double tail = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.grid.x(i) >= cut) tail += f.grid.weight(i) * f[i];
    return tail / total;
}

}  // namespace cellevo
