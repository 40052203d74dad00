#pragma once

// Parametric rate families and the discrete Gaussian mutation kernel.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cellevo/errors.hpp"
#include "cellevo/grid.hpp"

namespace cellevo {

/// A / (1 + k x^2)
struct RationalDecay {
    double amplitude;
    double k;
    bool operator==(const RationalDecay&) const = default;
};

/// B / (b^2 + x^2)
struct InverseQuadratic {
    double numerator;
    double b;
    bool operator==(const InverseQuadratic&) const = default;
};

/// d0 (1 - s x)
struct Affine {
    double d0;
    double slope;
    bool operator==(const Affine&) const = default;
};

struct Constant {
    double value;
    bool operator==(const Constant&) const = default;
};

using RateSpec = std::variant<RationalDecay, InverseQuadratic, Affine, Constant>;

inline double eval_rate(const RateSpec& spec, double x) {
    struct Visitor {
        double x;
        double operator()(const RationalDecay& f) const { return f.amplitude / (1.0 + f.k * x * x); }
        double operator()(const InverseQuadratic& f) const { return f.numerator / (f.b * f.b + x * x); }
        double operator()(const Affine& f) const { return f.d0 * (1.0 - f.slope * x); }
        double operator()(const Constant& f) const { return f.value; }
    };
    return std::visit(Visitor{x}, spec);
}

/// Rate sampled on every grid node.
inline std::vector<double> sample_rate(const RateSpec& spec, const Grid& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval_rate(spec, grid.x(i));
    return out;
}

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Text form used by the configuration format, e.g. "rational-decay 2 5".
inline std::string to_string(const RateSpec& spec) {
    struct Visitor {
        std::string operator()(const RationalDecay& f) const {
            return "rational-decay " + format_real(f.amplitude) + " " + format_real(f.k);
        }
        std::string operator()(const InverseQuadratic& f) const {
            return "inverse-quadratic " + format_real(f.numerator) + " " + format_real(f.b);
        }
        std::string operator()(const Affine& f) const {
            return "affine " + format_real(f.d0) + " " + format_real(f.slope);
        }
        std::string operator()(const Constant& f) const { return "constant " + format_real(f.value); }
    };
    return std::visit(Visitor{}, spec);
}

inline RateSpec parse_rate(const std::string& text) {
    std::istringstream in(text);
    std::string family;
    in >> family;
    std::vector<double> coef;
    std::string tok;
    while (in >> tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != tok.size()) throw ConfigError("rate '" + text + "': '" + tok + "' is not a number");
        coef.push_back(v);
    }
    auto expect = [&](std::size_t count) {
        if (coef.size() != count)
            throw ConfigError("rate family '" + family + "' takes " + std::to_string(count) +
                              " coefficient(s), got " + std::to_string(coef.size()));
    };
    if (family == "rational-decay") {
        expect(2);
        return RationalDecay{coef[0], coef[1]};
    }
    if (family == "inverse-quadratic") {
        expect(2);
        return InverseQuadratic{coef[0], coef[1]};
    }
    if (family == "affine") {
        expect(2);
        return Affine{coef[0], coef[1]};
    }
    if (family == "constant") {
        expect(1);
        return Constant{coef[0]};
    }
    throw ConfigError("unknown rate family '" + family + "'");
}

struct KernelSpec {
    double sigma = 0.01;  ///< width of exp(-(y-x)^2 / sigma^2)
    double trunc = 5.0;   ///< support radius in units of sigma
    bool operator==(const KernelSpec&) const = default;
};

/// Row-normalized discrete kernel. Row j holds weights from source node y_j onto
/// target nodes first[j] .. first[j] + rows[j].size() - 1.
class KernelMatrix {
public:
    KernelMatrix(Grid grid, std::vector<std::size_t> first, std::vector<std::vector<double>> rows)
        : grid_(grid), first_(std::move(first)), rows_(std::move(rows)) {}

    const Grid& grid() const { return grid_; }
    std::size_t first(std::size_t j) const { return first_[j]; }
    const std::vector<double>& row(std::size_t j) const { return rows_[j]; }

    /// Kernel value M(y_j, x_i), zero outside the stored support.
    double weight(std::size_t j, std::size_t i) const {
        if (i < first_[j] || i >= first_[j] + rows_[j].size()) return 0.0;
        return rows_[j][i - first_[j]];
    }

    /// Trapezoid integral of row j over the targets.
    double row_integral(std::size_t j) const {
        double s = 0.0;
        for (std::size_t k = 0; k < rows_[j].size(); ++k) s += grid_.weight(first_[j] + k) * rows_[j][k];
        return s;
    }

    /// out(x_i) = sum_j w_j source(y_j) M(y_j, x_i), i.e. the trapezoid of
    /// the integral of source(y) M(y, x) dy.
    void apply(std::span<const double> source, std::span<double> out) const {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            const double s = grid_.weight(j) * source[j];
            if (s == 0.0) continue;
            const auto& r = rows_[j];
            double* dst = out.data() + first_[j];
            for (std::size_t k = 0; k < r.size(); ++k) dst[k] += s * r[k];
        }
    }

private:
    Grid grid_;
    std::vector<std::size_t> first_;
    std::vector<std::vector<double>> rows_;
};

inline KernelMatrix build_kernel(const Grid& grid, const KernelSpec& spec) {
    if (!(spec.sigma > 0.0)) throw ConfigError("kernel: sigma must be positive");
    if (!(spec.trunc >= 3.0)) throw ConfigError("kernel: trunc must be >= 3");
    if (spec.sigma < 2.0 * grid.dx())
        throw ConfigError("kernel: sigma " + format_real(spec.sigma) + " is under-resolved (needs >= 2*dx = " +
                          format_real(2.0 * grid.dx()) + ")");

    // Profile over integer offsets so interior rows are exact mirror images.
    // Strict support |y - x| < trunc*sigma, so a row never reaches a half-weight
    // endpoint unless it is closer than trunc*sigma to it.
    const auto reach = static_cast<std::size_t>(std::ceil(spec.trunc * spec.sigma / grid.dx() - 1e-9)) - 1;
    std::vector<double> profile(reach + 1);
    for (std::size_t k = 0; k <= reach; ++k) {
        const double z = static_cast<double>(k) * grid.dx() / spec.sigma;
        profile[k] = std::exp(-z * z);
    }

    const std::size_t n = grid.size();
    std::vector<std::size_t> first(n);
    std::vector<std::vector<double>> rows(n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t lo = j > reach ? j - reach : 0;
        const std::size_t hi = std::min(n - 1, j + reach);
        std::vector<double> row(hi - lo + 1);
        double mass = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) {
            const std::size_t off = i > j ? i - j : j - i;
            row[i - lo] = profile[off];
            mass += grid.weight(i) * profile[off];
        }
        for (double& w : row) w /= mass;
        first[j] = lo;
        rows[j] = std::move(row);
    }
    return KernelMatrix(grid, std::move(first), std::move(rows));
}

}  // namespace cellevo
