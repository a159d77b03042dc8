#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dampedbar/config.hpp"
#include "dampedbar/error.hpp"
#include "dampedbar/quadrature.hpp"

namespace dampedbar {

using cplx = std::complex<double>;

// Integer mode label, or the rigid-body marker (lambda = 0, constant mode).
struct ModeIndex {
    bool rigid = false;
    int n = 0;

    static constexpr ModeIndex rigid_body() { return {true, 0}; }
    static constexpr ModeIndex of(int n) { return {false, n}; }

    friend constexpr bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

inline std::string to_string(const ModeIndex& idx) {
    return idx.rigid ? std::string("rigid") : std::to_string(idx.n);
}

struct EigenPair {
    ModeIndex index;
    cplx lambda;
};

// Pointwise value of a two-component state vector.
struct StateValue {
    cplx first;
    cplx second;
};

// A two-component vector of functions on [0, L].
struct StateVector {
    std::function<cplx(double)> first;
    std::function<cplx(double)> second;
};

// R = (1 - h1)(1 - h2) / ((1 + h1)(1 + h2)); eigenvalues satisfy exp(2 lambda L / c) = R.
inline double characteristic_ratio(const BarConfig& cfg) {
    return (1.0 - cfg.h1) * (1.0 - cfg.h2) / ((1.0 + cfg.h1) * (1.0 + cfg.h2));
}

// lambda_n = (c / 2L) [ln|R| + i (Arg R + 2 n pi)], Arg in (-pi, pi].
inline cplx eigenvalue(const BarConfig& cfg, int n) {
    validate(cfg);
    const ConfigClass cls = classify(cfg);
    if (cls == ConfigClass::AbsorbingH1 || cls == ConfigClass::AbsorbingH2)
        throw DegenerateSpectrum("eigenvalue: ln|R| diverges for class " +
                                 std::string(to_string(cls)));
    const double ratio = characteristic_ratio(cfg);
    // odd multiples of pi for R < 0, so lambda_{-n-1} = conj(lambda_n) holds exactly
    const int turns = 2 * n + (ratio < 0.0 ? 1 : 0);
    const double scale = cfg.c / (2.0 * cfg.L);
    return {scale * std::log(std::abs(ratio)), scale * std::numbers::pi * turns};
}

// Clamped-left limit (h1 -> +inf):
// lambda_r = (c / 2L) [ln|(1 - h2)/(1 + h2)| + i (Arg(-(1 - h2)/(1 + h2)) + 2 r pi)].
inline cplx fixed_damper_eigenvalue(double h2, double c, double L, int r) {
    if (std::abs(std::abs(h2) - 1.0) <= kDefaultClassTolerance)
        throw DegenerateSpectrum("fixed_damper_eigenvalue: h2 = +-1");
    if (!(c > 0.0) || !(L > 0.0)) throw InvalidInput("fixed_damper_eigenvalue: c, L must be positive");
    const double ratio = (1.0 - h2) / (1.0 + h2);
    const int turns = 2 * r + (-ratio < 0.0 ? 1 : 0);
    const double scale = c / (2.0 * L);
    return {scale * std::log(std::abs(ratio)), scale * std::numbers::pi * turns};
}

// Rigid body first, then n = -k..k.
inline std::vector<EigenPair> spectrum(const BarConfig& cfg, int k) {
    if (k < 0) throw InvalidInput("spectrum: truncation k must be non-negative");
    std::vector<EigenPair> out;
    out.reserve(static_cast<std::size_t>(2 * k + 2));
    out.push_back({ModeIndex::rigid_body(), cplx{0.0, 0.0}});
    for (int n = -k; n <= k; ++n) out.push_back({ModeIndex::of(n), eigenvalue(cfg, n)});
    return out;
}

// L (1 - h1^2): the value of <v_n, u_n> for every non-rigid mode.
inline double normalization(const BarConfig& cfg) {
    if (classify(cfg) == ConfigClass::AbsorbingH1)
        throw NormalizationSingular("normalization: L(1 - h1^2) vanishes for h1 = +-1");
    return cfg.L * (1.0 - cfg.h1 * cfg.h1);
}

namespace detail {

inline void check_domain(const BarConfig& cfg, double x) {
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * cfg.L;
    if (!(x >= -slack && x <= cfg.L + slack))
        throw InvalidInput("mode: x = " + std::to_string(x) + " outside [0, L]");
}

}  // namespace detail

// u1 = cosh(z) + h1 sinh(z), u2 = (sinh(z) + h1 cosh(z)) / c with z = lambda x / c,
// evaluated through exp(+-z) so large imaginary arguments stay well scaled.
// No domain check; the hot loops call this directly.
inline StateValue mode_unchecked(const BarConfig& cfg, cplx lambda, double x) {
    const cplx z = lambda * (x / cfg.c);
    const cplx ep = std::exp(z);
    const cplx em = std::exp(-z);
    const cplx u1 = 0.5 * ((1.0 + cfg.h1) * ep + (1.0 - cfg.h1) * em);
    const cplx u2 = 0.5 * ((1.0 + cfg.h1) * ep - (1.0 - cfg.h1) * em) / cfg.c;
    return {u1, u2};
}

inline StateValue mode(const BarConfig& cfg, const EigenPair& pair, double x) {
    detail::check_domain(cfg, x);
    if (pair.index.rigid) return {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
    return mode_unchecked(cfg, pair.lambda, x);
}

// v1 = conj(u1), v2 = -c^2 conj(u2).
inline StateValue adjoint_mode(const BarConfig& cfg, const EigenPair& pair, double x) {
    const StateValue u = mode(cfg, pair, x);
    return {std::conj(u.first), -cfg.c * cfg.c * std::conj(u.second)};
}

inline StateVector mode_vector(const BarConfig& cfg, const EigenPair& pair) {
    return {[cfg, pair](double x) { return mode(cfg, pair, x).first; },
            [cfg, pair](double x) { return mode(cfg, pair, x).second; }};
}

inline StateVector adjoint_vector(const BarConfig& cfg, const EigenPair& pair) {
    return {[cfg, pair](double x) { return adjoint_mode(cfg, pair, x).first; },
            [cfg, pair](double x) { return adjoint_mode(cfg, pair, x).second; }};
}

// <a, b> = int_0^L [conj(a1) b1 + conj(a2) b2] dx.
inline cplx inner_product(const StateVector& a, const StateVector& b, double length,
                          const QuadratureSpec& quad = {}, int panels_hint = 0) {
    auto integrand = [&](double x) {
        return std::conj(a.first(x)) * b.first(x) + std::conj(a.second(x)) * b.second(x);
    };
    return integrate(integrand, 0.0, length, quad, panels_hint);
}

// Generalized Fourier coefficients alpha_n = <v_n, F> / (L (1 - h1^2)), n = -k..k
// stored at position n + k.
inline std::vector<cplx> expand(const BarConfig& cfg, const StateVector& F, int k,
                                const QuadratureSpec& quad = {}) {
    if (k < 0) throw InvalidInput("expand: truncation k must be non-negative");
    const double norm = normalization(cfg);
    std::vector<cplx> alpha;
    alpha.reserve(static_cast<std::size_t>(2 * k + 1));
    for (int n = -k; n <= k; ++n) {
        const EigenPair pair{ModeIndex::of(n), eigenvalue(cfg, n)};
        // conj(v1) = u1 and conj(v2) = -c^2 u2, so the projection needs no conjugation
        auto integrand = [&](double x) {
            const StateValue u = mode_unchecked(cfg, pair.lambda, x);
            return u.first * F.first(x) - cfg.c * cfg.c * u.second * F.second(x);
        };
        alpha.push_back(integrate(integrand, 0.0, cfg.L, quad, panels_for_mode(n, quad)) / norm);
    }
    return alpha;
}

}  // namespace dampedbar
