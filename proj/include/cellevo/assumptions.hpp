#pragma once

// Structural assumptions on the rate functions, checked by sampling on a grid.

#include <string>
#include <vector>

#include "cellevo/combo.hpp"
#include "cellevo/grid.hpp"
#include "cellevo/mono.hpp"
#include "cellevo/rates.hpp"

namespace cellevo {

struct AssumptionCheck {
    std::string name;  ///< short tag, e.g. "as1.monotone-r"
    std::string description;
    bool passed;
    std::string detail;
};

struct AssumptionReport {
    std::vector<AssumptionCheck> checks;

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }

    const AssumptionCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return &c;
        return nullptr;
    }

    std::vector<std::string> failures() const {
        std::vector<std::string> out;
        for (const auto& c : checks)
            if (!c.passed) out.push_back(c.name + ": " + c.description + (c.detail.empty() ? "" : " (" + c.detail + ")"));
        return out;
    }
};

namespace detail {

inline bool nonincreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1]) return false;
    return true;
}

inline bool nondecreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1]) return false;
    return true;
}

inline bool all_positive(const std::vector<double>& v) {
    for (double x : v)
        if (!(x > 0.0)) return false;
    return true;
}

}  // namespace detail

inline AssumptionReport validate_assumptions(const MonoModelSpec& m, const Grid& grid) {
    using namespace detail;
    AssumptionReport rep;
    const auto r = sample_rate(m.r, grid);
    const auto d = sample_rate(m.d, grid);
    const auto mu = sample_rate(m.mu, grid);

    rep.checks.push_back({"as1.origin", "r(0) > d(0) > 0", r[0] > d[0] && d[0] > 0.0,
                          "r(0) = " + format_real(r[0]) + ", d(0) = " + format_real(d[0])});
    rep.checks.push_back({"as1.monotone-r", "r is nonincreasing", nonincreasing(r), ""});
    rep.checks.push_back({"as1.monotone-d", "d is nondecreasing", nondecreasing(d), ""});
    rep.checks.push_back({"theta", "0 <= theta < 1", m.theta >= 0.0 && m.theta < 1.0, ""});
    if (m.c > 0.0) {
        rep.checks.push_back({"as2.positive-mu", "mu > 0", all_positive(mu), ""});
        rep.checks.push_back({"as2.monotone-mu", "mu is nonincreasing", nonincreasing(mu), ""});
        if (m.kind == MonoKind::CancerLinear) {
            const double at0 = r[0] - d[0] - m.c * mu[0];
            rep.checks.push_back({"as3", "r(0) - d(0) - c mu(0) < 0", at0 < 0.0, "value " + format_real(at0)});
        }
    }
    return rep;
}

inline AssumptionReport validate_assumptions(const ComboModelSpec& m, const Grid& grid) {
    using namespace detail;
    AssumptionReport rep;
    const bool a2 = m.aHH > 0.0 && m.aCC > 0.0 && m.aHC >= 0.0 && m.aCH >= 0.0 && m.aHH > m.aHC && m.aCC > m.aCH;
    rep.checks.push_back({"A2", "aHH, aCC > 0; aHC, aCH >= 0; aHH > aHC; aCC > aCH", a2, ""});

    const auto rH = sample_rate(m.rH, grid), rC = sample_rate(m.rC, grid);
    const auto dH = sample_rate(m.dH, grid), dC = sample_rate(m.dC, grid);
    const auto muH = sample_rate(m.muH, grid), muC = sample_rate(m.muC, grid);

    rep.checks.push_back({"A3", "r_H, r_C > 0 and nonincreasing",
                          all_positive(rH) && all_positive(rC) && nonincreasing(rH) && nonincreasing(rC), ""});
    rep.checks.push_back({"A4", "d_H, d_C > 0 and nonincreasing",
                          all_positive(dH) && all_positive(dC) && nonincreasing(dH) && nonincreasing(dC), ""});
    bool below = true;
    for (std::size_t i = 0; i < muH.size(); ++i) below = below && muH[i] < muC[i];
    rep.checks.push_back({"as2", "mu_H, mu_C > 0, nonincreasing, mu_H < mu_C",
                          all_positive(muH) && all_positive(muC) && nonincreasing(muH) && nonincreasing(muC) && below,
                          ""});
    rep.checks.push_back({"A6", "alpha_H < alpha_C", m.alphaH < m.alphaC, ""});
    rep.checks.push_back({"theta", "0 <= theta_H, theta_C < 1",
                          m.theta_H >= 0.0 && m.theta_H < 1.0 && m.theta_C >= 0.0 && m.theta_C < 1.0, ""});
    return rep;
}

}  // namespace cellevo
