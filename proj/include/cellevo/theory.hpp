#pragma once

// Closed-form predictions: homeostasis mass, fittest traits, the constant-dose
// fitness landscape and the effective Hamiltonian of the mutation operator.
//
// The dose analysis uses the rational family
//
//   R_c(x) = r0^2 / (1 + x^2) - d - alpha^2 / (a^2 + x^2),   alpha^2 = c,
//
// which is maximized in y = x^2.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cellevo/errors.hpp"
#include "cellevo/mono.hpp"
#include "cellevo/rates.hpp"

namespace cellevo {

/// Total mass at which r0 / (1 + rho)^beta = d0.
inline double homeostasis_rho(double r0, double d0, double beta) {
    if (!(d0 > 0.0) || !(beta > 0.0)) throw ConfigError("homeostasis_rho: need d0 > 0 and beta > 0");
    if (r0 < d0) throw ConfigError("homeostasis_rho: no positive homeostasis when r0 < d0");
    return std::pow(r0 / d0, 1.0 / beta) - 1.0;
}

inline constexpr double kBisectionTol = 1e-12;

/// Root in [0, x_max] of the net growth at total mass `rho`.
inline double fittest_trait_from_rho(const MonoModelSpec& spec, double rho, double x_max = 1.0) {
    auto f = [&](double x) { return net_growth(spec, x, rho, spec.c); };
    double lo = 0.0, hi = x_max;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NumericalError("fittest_trait_from_rho: no sign change of the net growth on [0, " +
                             format_real(x_max) + "] at rho = " + format_real(rho));
    while (hi - lo > kBisectionTol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// R_c at trait x for dose alpha^2.
inline double dose_fitness(double r0, double d, double a, double alpha, double x) {
    const double y = x * x;
    return r0 * r0 / (1.0 + y) - d - alpha * alpha / (a * a + y);
}

/// Smaller nonnegative trait where R_c(x) = I, or nothing when R_c < I everywhere.
inline std::optional<double> concentration_from_I(double r0, double d, double a, double alpha, double I) {
    // R_c(y) = I  <=>  qa y^2 + qb y + qc = 0 after clearing (1+y)(a^2+y).
    const double s = I + d;
    const double a2 = a * a;
    const double qa = s;
    const double qb = -r0 * r0 + alpha * alpha + s * (1.0 + a2);
    const double qc = -r0 * r0 * a2 + alpha * alpha + s * a2;

    std::vector<double> roots;
    if (qa == 0.0) {
        if (qb == 0.0) return std::nullopt;
        roots.push_back(-qc / qb);
    } else {
        double disc = qb * qb - 4.0 * qa * qc;
        // A double root can come out a few ulps negative.
        const double scale = qb * qb + std::abs(4.0 * qa * qc);
        if (disc < 0.0 && disc > -1e-14 * scale) disc = 0.0;
        if (disc < 0.0) return std::nullopt;
        const double sq = std::sqrt(disc);
        roots.push_back((-qb - sq) / (2.0 * qa));
        roots.push_back((-qb + sq) / (2.0 * qa));
        if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);
    }
    for (double y : roots)
        if (y >= 0.0) return std::sqrt(y);
    return std::nullopt;
}

enum class DoseRegime { StrongDoseNoResistance, WeakDoseNoResistance, InteriorMaximum };

inline const char* to_string(DoseRegime r) {
    switch (r) {
        case DoseRegime::StrongDoseNoResistance: return "strong-dose-no-resistance";
        case DoseRegime::WeakDoseNoResistance: return "weak-dose-no-resistance";
        case DoseRegime::InteriorMaximum: return "interior-maximum";
    }
    return "?";
}

struct DoseAnalysis {
    double alpha;
    DoseRegime regime;
    std::optional<double> y_c;
    std::optional<double> x_c;
    double R_bar;  ///< sup over x >= 0 of R_c

    /// The selected trait has positive fitness.
    bool resistance() const { return regime == DoseRegime::InteriorMaximum && R_bar > 0.0; }
};

/// Shape of the fitness landscape for a constant dose c.
///
/// alpha >= r0             : R_c increases towards -d, never reached.
/// alpha <= a^2 r0         : R_c decreases from R_c(0).
/// a^2 r0 < alpha < r0     : interior maximum at y_c = (alpha - a^2 r0) / (r0 - alpha).
inline DoseAnalysis dose_analysis(double r0, double d, double a, double c) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("dose_analysis: requires 0 < a < 1");
    if (!(r0 > 0.0) || !(d > 0.0) || !(c > 0.0))
        throw ConfigError("dose_analysis: requires r0 > 0, d > 0 and c > 0");
    const double alpha = std::sqrt(c);
    const double a2 = a * a;
    if (alpha >= r0) return {alpha, DoseRegime::StrongDoseNoResistance, std::nullopt, std::nullopt, -d};
    if (alpha <= a2 * r0)
        return {alpha, DoseRegime::WeakDoseNoResistance, std::nullopt, std::nullopt,
                dose_fitness(r0, d, a, alpha, 0.0)};
    const double y = (alpha - a2 * r0) / (r0 - alpha);
    const double gap = alpha - r0;
    return {alpha, DoseRegime::InteriorMaximum, y, std::sqrt(y), gap * gap / (1.0 - a2) - d};
}

struct DoseTableRow {
    double c;
    DoseRegime regime;
    double R_bar;
};

struct OptimalDose {
    double c_star;
    std::vector<DoseTableRow> table;
    /// Dose r0^2 from which on R_bar = -d.
    double threshold;
};

/// Minimize R_bar over a dose grid; ties go to the smallest dose.
inline OptimalDose optimal_dose(double r0, double d, double a, const std::vector<double>& c_grid) {
    if (c_grid.empty()) throw ConfigError("optimal_dose: empty dose grid");
    OptimalDose out{0.0, {}, r0 * r0};
    double best = 0.0;
    for (double c : c_grid) {
        const DoseAnalysis da = dose_analysis(r0, d, a, c);
        out.table.push_back({c, da.regime, da.R_bar});
        if (out.table.size() == 1 || da.R_bar < best || (da.R_bar == best && c < out.c_star)) {
            best = da.R_bar;
            out.c_star = c;
        }
    }
    return out;
}

/// H(x, p) = r(x) int M~(x, z) e^{p z} dz with z = (y - x) / eps, evaluated with
/// the discrete kernel row at the grid node nearest to x.
inline double hamiltonian(const MonoModelSpec& spec, const KernelMatrix& kernel, double x, double p) {
    const Grid& grid = kernel.grid();
    const std::size_t j = grid.nearest(x);
    const double xj = grid.x(j);
    const auto& row = kernel.row(j);
    double sum = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        const std::size_t i = kernel.first(j) + k;
        const double z = (grid.x(i) - xj) / spec.eps;
        sum += grid.weight(i) * row[k] * std::exp(p * z);
    }
    return eval_rate(spec.r, xj) * sum;
}

}  // namespace cellevo
