#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <type_traits>
#include <vector>

#include "dampedbar/error.hpp"

namespace dampedbar {

// Composite Gauss-Legendre settings. Panels are doubled until two successive
// estimates agree to rel_tol.
struct QuadratureSpec {
    int points_per_panel = 16;
    int min_panels = 8;
    int max_panels = 1 << 15;
    double rel_tol = 1e-10;
};

// Panel count that resolves a mode of index n on the whole bar.
inline int panels_for_mode(int n, const QuadratureSpec& spec = {}) {
    return std::max(spec.min_panels, 8 * (std::abs(n) + 2));
}

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Newton iteration on P_n starting from the Chebyshev-like guess.
inline GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw InvalidInput("gauss_legendre: order must be positive");
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0;
        double p1 = 0.0;
        for (int j = 0; j < n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -z;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = z;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

template <class T>
struct QuadratureResult {
    T value{};
    double error_estimate = 0.0;
    int panels = 0;
};

namespace detail {

template <class F>
using integrand_t = std::invoke_result_t<F&, double>;

// One pass of the composite rule; also accumulates the L1 magnitude of the
// integrand, which sets the floor for cancellation-dominated integrals.
template <class F>
integrand_t<F> composite_pass(F& f, std::span<const double> breaks, int panels,
                              const GaussLegendreRule& rule, double& magnitude) {
    using T = integrand_t<F>;
    T sum{};
    magnitude = 0.0;
    const double total = breaks.back() - breaks.front();
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a = breaks[s];
        const double b = breaks[s + 1];
        if (!(b > a)) continue;
        const int m = std::max(1, static_cast<int>(std::ceil(panels * (b - a) / total)));
        const double h = (b - a) / m;
        for (int p = 0; p < m; ++p) {
            const double lo = a + p * h;
            const double mid = lo + 0.5 * h;
            T panel{};
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const T v = f(mid + 0.5 * h * rule.nodes[q]);
                panel += rule.weights[q] * v;
                magnitude += 0.5 * h * rule.weights[q] * std::abs(v);
            }
            sum += 0.5 * h * panel;
        }
    }
    return sum;
}

}  // namespace detail

// Integrates f over the union of [breaks[i], breaks[i+1]]. Integrands with
// kinks should list them as breakpoints so each panel sees a smooth function.
template <class F>
QuadratureResult<detail::integrand_t<F>> integrate_adaptive(F&& f, std::span<const double> breaks,
                                                            const QuadratureSpec& spec = {},
                                                            int panels_hint = 0) {
    if (breaks.size() < 2) throw InvalidInput("integrate: need at least two breakpoints");
    if (!(breaks.back() > breaks.front()))
        throw InvalidInput("integrate: empty or reversed interval");
    const GaussLegendreRule rule = gauss_legendre(spec.points_per_panel);
    int panels = std::max({1, spec.min_panels, panels_hint});
    double magnitude = 0.0;
    auto previous = detail::composite_pass(f, breaks, panels, rule, magnitude);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (;;) {
        panels *= 2;
        auto current = detail::composite_pass(f, breaks, panels, rule, magnitude);
        const double diff = std::abs(current - previous);
        const double tol = std::max(spec.rel_tol * std::abs(current), 64.0 * eps * magnitude);
        if (diff <= tol || !std::isfinite(diff)) {
            if (!std::isfinite(diff)) throw AccuracyError("integrate: non-finite integrand", diff);
            return {current, diff, panels};
        }
        if (panels >= spec.max_panels)
            throw AccuracyError("integrate: panel limit reached before convergence", diff);
        previous = current;
    }
}

template <class F>
detail::integrand_t<F> integrate(F&& f, double a, double b, const QuadratureSpec& spec = {},
                                 int panels_hint = 0) {
    const double breaks[2] = {a, b};
    return integrate_adaptive(std::forward<F>(f), std::span<const double>(breaks, 2), spec,
                              panels_hint)
        .value;
}

}  // namespace dampedbar
