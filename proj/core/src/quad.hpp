// Internal adaptive quadrature for the bath-rate frequency integrals.
// Splits [0, omega_max] into panels no wider than a quarter oscillation of
// sin(w t) and runs recursive Simpson refinement on each panel.

#pragma once

#include "trideph/bath.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace trideph::detail {

struct PanelBudget {
    double abs_tol = 1e-13;
    int max_depth = 48;
    std::int64_t max_panels = 4'000'000;
};

template <class F>
double simpson_recurse(const F& f, double a, double fa, double b, double fb, double m,
                       double fm, double whole, double tol, int depth, double& err_acc) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = b - a;
    const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        if (depth <= 0)
            err_acc += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, err_acc) +
           simpson_recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, err_acc);
}

/// Integrates f over [lo, hi] with panels of width <= max_panel.  Throws
/// QuadratureError if the accumulated error estimate exceeds the budget or
/// the panel count is absurd.
template <class F>
double integrate_panels(const F& f, double lo, double hi, double max_panel,
                        const PanelBudget& budget = {}) {
    if (hi <= lo)
        return 0.0;
    const double span = hi - lo;
    // Compare in floating point: the requested count can overflow int64.
    const double n_panels_d = std::ceil(span / max_panel);
    if (!(n_panels_d <= static_cast<double>(budget.max_panels)))
        throw QuadratureError("quadrature: panel count " + std::to_string(n_panels_d) +
                                  " exceeds budget (achieved error estimate: n/a)",
                              std::numeric_limits<double>::infinity());
    const std::int64_t n_panels = std::max<std::int64_t>(1, static_cast<std::int64_t>(n_panels_d));
    const double h = span / static_cast<double>(n_panels);
    const double panel_tol = budget.abs_tol / static_cast<double>(n_panels);

    double total = 0.0;
    double err_acc = 0.0;
    double fa = f(lo);
    for (std::int64_t i = 0; i < n_panels; ++i) {
        const double a = lo + static_cast<double>(i) * h;
        const double b = a + h;
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        const double fb = f(b);
        const double whole = (h / 6.0) * (fa + 4.0 * fm + fb);
        total += simpson_recurse(f, a, fa, b, fb, m, fm, whole, panel_tol, budget.max_depth,
                                 err_acc);
        fa = fb;
    }
    if (err_acc > 64.0 * budget.abs_tol)
        throw QuadratureError("quadrature: tolerance not met, achieved error estimate " +
                                  std::to_string(err_acc),
                              err_acc);
    return total;
}

/// coth(x) for x > 0, series near zero, stable tail for large x.
inline double coth_stable(double x) {
    if (x < 1e-4) {
        const double x2 = x * x;
        return 1.0 / x + x / 3.0 - x * x2 / 45.0;
    }
    if (x > 20.0)
        return 1.0;
    return 1.0 + 2.0 / std::expm1(2.0 * x);
}

} // namespace trideph::detail
