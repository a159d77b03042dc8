#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <variant>
#include <vector>

#include "dampedbar/config.hpp"
#include "dampedbar/error.hpp"
#include "dampedbar/excitation.hpp"
#include "dampedbar/modal_response.hpp"
#include "dampedbar/quadrature.hpp"
#include "dampedbar/spectrum.hpp"

namespace dampedbar {

// Closed-form field u_e(x,t) = x^2 [1 - (h2 L - 2c) x / (L (h2 L - 3c))] e^{-t}
// together with the forcing that makes it an exact solution. It satisfies
// both damper conditions, and u_e(0, t) = 0 so the left damper is idle.
class ManufacturedCase {
public:
    explicit ManufacturedCase(const BarConfig& cfg) : cfg_(cfg) {
        validate(cfg);
        const double denom = cfg.h2 * cfg.L - 3.0 * cfg.c;
        if (std::abs(denom) <= 1e-12 * (std::abs(cfg.h2 * cfg.L) + 3.0 * cfg.c))
            throw InvalidInput("manufactured case: h2 L = 3c makes the profile singular");
        cubic_ = (cfg.h2 * cfg.L - 2.0 * cfg.c) / (cfg.L * denom);
    }

    const BarConfig& config() const noexcept { return cfg_; }

    // u_e = (x^2 - a x^3) e^{-t}
    double displacement(double x, double t) const { return x * x * (1.0 - cubic_ * x) * std::exp(-t); }
    double velocity(double x, double t) const { return -displacement(x, t); }

    // Forcing exactly as printed in closed form.
    double forcing(double x, double t) const {
        const double c = cfg_.c;
        const double h2 = cfg_.h2;
        const double L = cfg_.L;
        const double bracket = (c * c - 0.5 * x * x) * h2 * L * L +
                               (1.5 * x * x * c + 0.5 * x * x * x * h2 - 3.0 * c * c * c - 3.0 * c * c * x * h2) * L -
                               x * x * x * c + 6.0 * c * c * c * x;
        return 2.0 * std::exp(-t) / (L * (3.0 * c - h2 * L)) * bracket;
    }

    Profile initial_displacement() const { return profile::Polynomial{{0.0, 0.0, 1.0, -cubic_}}; }
    Profile initial_velocity() const { return profile::Polynomial{{0.0, 0.0, -1.0, cubic_}}; }

    // p_e = u_e - c^2 u_e,xx written as a polynomial times e^{-t}.
    ForcingTerm forcing_term() const {
        const double c2 = cfg_.c * cfg_.c;
        return forcing::Separable{profile::Polynomial{{-2.0 * c2, 6.0 * cubic_ * c2, 1.0, -cubic_}},
                                  temporal::Exponential{1.0, -1.0}};
    }

    ExcitationSpec excitation() const { return {initial_displacement(), initial_velocity(), forcing_term()}; }

private:
    BarConfig cfg_;
    double cubic_ = 0.0;
};

inline ManufacturedCase manufactured_pair(const BarConfig& cfg) { return ManufacturedCase(cfg); }

// max over the grid of |u_e - u| at time t for the manufactured excitation.
inline double series_error(const BarConfig& cfg, int k, double t, const std::vector<double>& grid,
                           ResponseOptions opts = {ResponseMethod::Simplified}) {
    const ManufacturedCase mc(cfg);
    const FieldResult u = response(cfg, mc.excitation(), k, grid, {t}, opts);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        err = std::max(err, std::abs(mc.displacement(grid[i], t) - u.value(0, i)));
    return err;
}

namespace limit {

struct FreeFree {};
struct FixedDamper {
    double h2 = 0.0;
};
struct FixedFixed {};
struct FixedFree {};

}  // namespace limit

using LimitCase = std::variant<limit::FreeFree, limit::FixedDamper, limit::FixedFixed, limit::FixedFree>;

// Limit-case eigenvalues: free-free i c r pi / L, fixed-free i c (2r+1) pi / 2L,
// fixed-damper from the clamped-left formula, fixed-fixed i c r pi / L.
inline cplx limit_case_spectrum(const LimitCase& lc, const BarConfig& cfg, int r) {
    validate(cfg);
    const double pi = std::numbers::pi;
    return std::visit(
        [&](const auto& c) -> cplx {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, limit::FreeFree> || std::is_same_v<C, limit::FixedFixed>) {
                return {0.0, cfg.c * r * pi / cfg.L};
            } else if constexpr (std::is_same_v<C, limit::FixedFree>) {
                return {0.0, cfg.c * (2.0 * r + 1.0) * pi / (2.0 * cfg.L)};
            } else {
                return fixed_damper_eigenvalue(c.h2, cfg.c, cfg.L, r);
            }
        },
        lc);
}

// Limit eigenfunctions: cos(r pi x / L), i sin((2r+1) pi x / 2L), sinh(lambda_r x / c)
// and i sin(r pi x / L).
inline cplx limit_case_mode(const LimitCase& lc, const BarConfig& cfg, int r, double x) {
    const double pi = std::numbers::pi;
    return std::visit(
        [&](const auto& c) -> cplx {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, limit::FreeFree>) {
                return std::cos(r * pi * x / cfg.L);
            } else if constexpr (std::is_same_v<C, limit::FixedFixed>) {
                return {0.0, std::sin(r * pi * x / cfg.L)};
            } else if constexpr (std::is_same_v<C, limit::FixedFree>) {
                return {0.0, std::sin((2.0 * r + 1.0) * pi * x / (2.0 * cfg.L))};
            } else {
                return std::sinh(limit_case_spectrum(lc, cfg, r) * x / cfg.c);
            }
        },
        lc);
}

// Finite damper configuration standing in for a limit case: "infinite"
// coefficients become `large`, vanishing ones 1 / large.
inline BarConfig limit_surrogate(const LimitCase& lc, const BarConfig& base, double large) {
    BarConfig cfg = base;
    std::visit(
        [&](const auto& c) {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, limit::FreeFree>) {
                cfg.h1 = 1.0 / large;
                cfg.h2 = 1.0 / large;
            } else if constexpr (std::is_same_v<C, limit::FixedFixed>) {
                cfg.h1 = large;
                cfg.h2 = large;
            } else if constexpr (std::is_same_v<C, limit::FixedFree>) {
                cfg.h1 = large;
                cfg.h2 = 1.0 / large;
            } else {
                cfg.h1 = large;
                cfg.h2 = c.h2;
            }
        },
        lc);
    return cfg;
}

enum class PartialSums {
    Plain,   // S_k
    Cesaro,  // mean of S_j over the last quarter j in [k - k/4, k]
};

// |1/(c(h1 + h2)) + sum_{r=-k}^{k} u_1r(xi) u_1r(x) / (lambda_r (1 - h1^2) L)|.
// Setting xi = L gives the boundary-restricted form of the identity.
inline double summation_identity_residual(const BarConfig& cfg, double x, double xi, int k,
                                          PartialSums mode = PartialSums::Cesaro) {
    detail::require_generic(cfg, "summation_identity_residual");
    if (k < 0) throw InvalidInput("summation_identity_residual: k must be non-negative");
    detail::check_domain(cfg, x);
    detail::check_domain(cfg, xi);
    const double norm = normalization(cfg);
    const auto term = [&](int r) {
        const cplx lambda = eigenvalue(cfg, r);
        return mode_unchecked(cfg, lambda, xi).first * mode_unchecked(cfg, lambda, x).first / (lambda * norm);
    };
    cplx partial = 1.0 / (cfg.c * (cfg.h1 + cfg.h2)) + term(0);
    const int from = mode == PartialSums::Cesaro ? k - k / 4 : k;
    cplx acc{0.0, 0.0};
    int count = 0;
    if (from == 0) {
        acc += partial;
        ++count;
    }
    for (int j = 1; j <= k; ++j) {
        partial += term(j) + term(-j);
        if (j >= from) {
            acc += partial;
            ++count;
        }
    }
    return std::abs(acc / static_cast<double>(count));
}

// |int f^2 - sum_{r=-k}^{k} (int f u_1r)^2 / (L (1 - h1^2))|.
inline double parseval_residual(const BarConfig& cfg, const Profile& f, int k, const QuadratureSpec& quad = {}) {
    validate(cfg);
    if (k < 0) throw InvalidInput("parseval_residual: k must be non-negative");
    f.check_covers(cfg.L);
    const double norm = normalization(cfg);
    const std::vector<double> breaks = f.breakpoints(cfg.L);
    const double energy =
        f.is_zero() ? 0.0
                    : integrate_adaptive([&](double x) { return f(x) * f(x); }, std::span<const double>(breaks), quad)
                          .value;
    cplx sum{0.0, 0.0};
    for (int r = -k; r <= k; ++r) {
        const cplx lambda = eigenvalue(cfg, r);
        const cplx proj = detail::project_profile(
            f, [&](double x) { return mode_unchecked(cfg, lambda, x).first; }, cfg.L, quad, panels_for_mode(r, quad));
        sum += proj * proj / norm;
    }
    return std::abs(energy - sum);
}

}  // namespace dampedbar
