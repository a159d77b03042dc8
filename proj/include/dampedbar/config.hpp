#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "dampedbar/error.hpp"

namespace dampedbar {

// Dimensional description of the bar and its two end dampers.
struct PhysicalBar {
    double rho = 1.0;   // mass density
    double A0 = 1.0;    // cross-sectional area
    double E = 1.0;     // elastic modulus
    double c1 = 0.0;    // left damper coefficient
    double c2 = 0.0;    // right damper coefficient
    double L = 1.0;
    // Negative damper coefficients model the active-boundary study; they are
    // rejected unless this is set.
    bool allow_negative_damping = false;
};

// Nondimensional problem: u_tt = c^2 u_xx + p with u_x(0) = (h1/c) u_t(0)
// and u_x(L) = -(h2/c) u_t(L).
struct BarConfig {
    double h1 = 0.0;
    double h2 = 0.0;
    double c = 1.0;
    double L = 1.0;
};

enum class ConfigClass {
    Generic,
    AbsorbingH1,      // h1 = +-1
    AbsorbingH2,      // h2 = +-1
    SumZero,          // h1 + h2 = 0
    ProductMinusOne,  // 1 + h1 h2 = 0
};

inline constexpr double kDefaultClassTolerance = 1e-9;

inline std::string_view to_string(ConfigClass cls) {
    switch (cls) {
        case ConfigClass::Generic: return "Generic";
        case ConfigClass::AbsorbingH1: return "AbsorbingH1";
        case ConfigClass::AbsorbingH2: return "AbsorbingH2";
        case ConfigClass::SumZero: return "SumZero";
        case ConfigClass::ProductMinusOne: return "ProductMinusOne";
    }
    return "Unknown";
}

inline void validate(const BarConfig& cfg) {
    if (!(cfg.c > 0.0) || !std::isfinite(cfg.c))
        throw InvalidInput("BarConfig: wave speed c must be positive");
    if (!(cfg.L > 0.0) || !std::isfinite(cfg.L))
        throw InvalidInput("BarConfig: length L must be positive");
    if (!std::isfinite(cfg.h1) || !std::isfinite(cfg.h2))
        throw InvalidInput("BarConfig: boundary coefficients must be finite");
}

// c^2 = E/rho and h_i = c_i c / (E A0).
inline BarConfig derive_config(const PhysicalBar& p) {
    if (!(p.rho > 0.0)) throw InvalidInput("PhysicalBar: rho must be positive");
    if (!(p.A0 > 0.0)) throw InvalidInput("PhysicalBar: A0 must be positive");
    if (!(p.E > 0.0)) throw InvalidInput("PhysicalBar: E must be positive");
    if (!(p.L > 0.0)) throw InvalidInput("PhysicalBar: L must be positive");
    if (!p.allow_negative_damping && (p.c1 < 0.0 || p.c2 < 0.0))
        throw InvalidInput("PhysicalBar: negative damper coefficient without allow_negative_damping");
    BarConfig cfg;
    cfg.c = std::sqrt(p.E / p.rho);
    cfg.h1 = p.c1 * cfg.c / (p.E * p.A0);
    cfg.h2 = p.c2 * cfg.c / (p.E * p.A0);
    cfg.L = p.L;
    return cfg;
}

// Precedence: AbsorbingH1, AbsorbingH2, SumZero, ProductMinusOne.
inline ConfigClass classify(const BarConfig& cfg, double tol = kDefaultClassTolerance) {
    const auto near = [tol](double a, double b) { return std::abs(a - b) <= tol; };
    if (near(cfg.h1, 1.0) || near(cfg.h1, -1.0)) return ConfigClass::AbsorbingH1;
    if (near(cfg.h2, 1.0) || near(cfg.h2, -1.0)) return ConfigClass::AbsorbingH2;
    if (near(cfg.h1 + cfg.h2, 0.0)) return ConfigClass::SumZero;
    if (near(1.0 + cfg.h1 * cfg.h2, 0.0)) return ConfigClass::ProductMinusOne;
    return ConfigClass::Generic;
}

}  // namespace dampedbar
