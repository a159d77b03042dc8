#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "dampedbar/error.hpp"

namespace dampedbar {

namespace profile {

struct Zero {};

struct Constant {
    double value = 0.0;
};

// sum_i coeffs[i] x^i
struct Polynomial {
    std::vector<double> coeffs;
};

// amplitude * sin(wavenumber * x + phase)
struct Sinusoid {
    double amplitude = 1.0;
    double wavenumber = 0.0;
    double phase = 0.0;
};

// Piecewise-linear interpolant, constant beyond the end samples.
struct Sampled {
    std::vector<double> x;
    std::vector<double> values;
};

}  // namespace profile

namespace detail {

inline void check_strictly_increasing(const std::vector<double>& grid, const char* what) {
    if (grid.size() < 2) throw InvalidInput(std::string(what) + ": need at least two samples");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw InvalidInput(std::string(what) + ": grid must be strictly increasing");
}

// Index i with grid[i] <= x < grid[i+1], clamped to a valid interval.
inline std::size_t locate(const std::vector<double>& grid, double x) {
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    if (it == grid.begin()) return 0;
    const auto i = static_cast<std::size_t>(it - grid.begin()) - 1;
    return std::min(i, grid.size() - 2);
}

}  // namespace detail

// Real spatial profile on [0, L]: initial displacement, initial velocity or
// the spatial factor of a forcing term.
class Profile {
public:
    using Variant = std::variant<profile::Zero, profile::Constant, profile::Polynomial,
                                 profile::Sinusoid, profile::Sampled>;

    Profile() = default;
    template <class T>
        requires std::is_constructible_v<Variant, T>
    Profile(T alt) : v_(std::move(alt)) {
        if (const auto* s = std::get_if<profile::Sampled>(&v_)) {
            detail::check_strictly_increasing(s->x, "Sampled profile");
            if (s->x.size() != s->values.size())
                throw InvalidInput("Sampled profile: x and values differ in length");
        }
    }

    const Variant& variant() const noexcept { return v_; }
    bool is_zero() const noexcept { return std::holds_alternative<profile::Zero>(v_); }

    double operator()(double x) const {
        return std::visit(
            [x](const auto& p) -> double {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, profile::Zero>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<P, profile::Constant>) {
                    return p.value;
                } else if constexpr (std::is_same_v<P, profile::Polynomial>) {
                    double acc = 0.0;
                    for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * x + *it;
                    return acc;
                } else if constexpr (std::is_same_v<P, profile::Sinusoid>) {
                    return p.amplitude * std::sin(p.wavenumber * x + p.phase);
                } else {
                    if (x <= p.x.front()) return p.values.front();
                    if (x >= p.x.back()) return p.values.back();
                    const std::size_t i = detail::locate(p.x, x);
                    const double w = (x - p.x[i]) / (p.x[i + 1] - p.x[i]);
                    return (1.0 - w) * p.values[i] + w * p.values[i + 1];
                }
            },
            v_);
    }

    double derivative(double x) const {
        return std::visit(
            [x](const auto& p) -> double {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, profile::Zero> ||
                              std::is_same_v<P, profile::Constant>) {
                    return 0.0;
                } else if constexpr (std::is_same_v<P, profile::Polynomial>) {
                    double acc = 0.0;
                    for (std::size_t i = p.coeffs.size(); i-- > 1;)
                        acc = acc * x + static_cast<double>(i) * p.coeffs[i];
                    return acc;
                } else if constexpr (std::is_same_v<P, profile::Sinusoid>) {
                    return p.amplitude * p.wavenumber * std::cos(p.wavenumber * x + p.phase);
                } else {
                    if (x < p.x.front() || x > p.x.back()) return 0.0;
                    const std::size_t i = detail::locate(p.x, x);
                    return (p.values[i + 1] - p.values[i]) / (p.x[i + 1] - p.x[i]);
                }
            },
            v_);
    }

    // Integration breakpoints on [0, length]; sample abscissae for Sampled.
    std::vector<double> breakpoints(double length) const {
        std::vector<double> out{0.0};
        if (const auto* s = std::get_if<profile::Sampled>(&v_))
            for (double xi : s->x)
                if (xi > 0.0 && xi < length) out.push_back(xi);
        out.push_back(length);
        return out;
    }

    // Sampled profiles must cover the bar.
    void check_covers(double length) const {
        if (const auto* s = std::get_if<profile::Sampled>(&v_)) {
            const double slack = 1e-12 * length;
            if (s->x.front() > slack || s->x.back() < length - slack)
                throw InvalidInput("Sampled profile does not cover [0, L]");
        }
    }

private:
    Variant v_{profile::Zero{}};
};

// Temporal factor of a separable forcing term; every alternative is a finite
// sum of complex exponentials, which gives exact time convolutions.
namespace temporal {

struct Constant {
    double value = 1.0;
};

// amplitude * exp(rate * t)
struct Exponential {
    double amplitude = 1.0;
    double rate = 0.0;
};

// amplitude * sin(frequency * t + phase)
struct Sinusoid {
    double amplitude = 1.0;
    double frequency = 0.0;
    double phase = 0.0;
};

}  // namespace temporal

// coefficient * exp(rate * t)
struct ExpTerm {
    std::complex<double> coefficient;
    std::complex<double> rate;
};

class TemporalProfile {
public:
    using Variant = std::variant<temporal::Constant, temporal::Exponential, temporal::Sinusoid>;

    TemporalProfile() = default;
    template <class T>
        requires std::is_constructible_v<Variant, T>
    TemporalProfile(T alt) : v_(std::move(alt)) {}

    const Variant& variant() const noexcept { return v_; }

    double operator()(double t) const {
        return std::visit(
            [t](const auto& p) -> double {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, temporal::Constant>) {
                    return p.value;
                } else if constexpr (std::is_same_v<P, temporal::Exponential>) {
                    return p.amplitude * std::exp(p.rate * t);
                } else {
                    return p.amplitude * std::sin(p.frequency * t + p.phase);
                }
            },
            v_);
    }

    std::vector<ExpTerm> exp_terms() const {
        using namespace std::complex_literals;
        return std::visit(
            [](const auto& p) -> std::vector<ExpTerm> {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, temporal::Constant>) {
                    return {{p.value, 0.0}};
                } else if constexpr (std::is_same_v<P, temporal::Exponential>) {
                    return {{p.amplitude, p.rate}};
                } else {
                    // sin(w t + phi) = (e^{i(w t + phi)} - e^{-i(w t + phi)}) / 2i
                    const std::complex<double> a = p.amplitude * std::exp(1i * p.phase) / 2i;
                    const std::complex<double> b = -p.amplitude * std::exp(-1i * p.phase) / 2i;
                    return {{a, 1i * p.frequency}, {b, -1i * p.frequency}};
                }
            },
            v_);
    }

private:
    Variant v_{temporal::Constant{1.0}};
};

namespace forcing {

struct Zero {};

// space(x) * time(t)
struct Separable {
    Profile space;
    TemporalProfile time;
};

// magnitude * space(x) * delta(t)
struct TimeImpulse {
    Profile space;
    double magnitude = 1.0;
};

// amplitude * exp(i omega t) * delta(x - position); amplitude is F0 / (rho A0).
// The only complex-valued forcing in the catalog.
struct PointHarmonic {
    double amplitude = 1.0;
    double omega = 0.0;
    double position = 0.0;
};

// Bilinear interpolant of values[j * x.size() + i] = p(x[i], t[j]).
struct SampledField {
    std::vector<double> x;
    std::vector<double> t;
    std::vector<double> values;
};

}  // namespace forcing

// Force per unit mass p(x, t).
class ForcingTerm {
public:
    using Variant = std::variant<forcing::Zero, forcing::Separable, forcing::TimeImpulse,
                                 forcing::PointHarmonic, forcing::SampledField>;

    ForcingTerm() = default;
    template <class T>
        requires std::is_constructible_v<Variant, T>
    ForcingTerm(T alt) : v_(std::move(alt)) {
        if (const auto* s = std::get_if<forcing::SampledField>(&v_)) {
            detail::check_strictly_increasing(s->x, "SampledField x");
            detail::check_strictly_increasing(s->t, "SampledField t");
            if (s->values.size() != s->x.size() * s->t.size())
                throw InvalidInput("SampledField: values size must equal x.size() * t.size()");
        }
    }

    const Variant& variant() const noexcept { return v_; }
    bool is_zero() const noexcept { return std::holds_alternative<forcing::Zero>(v_); }
    bool is_complex() const noexcept { return std::holds_alternative<forcing::PointHarmonic>(v_); }

    void check_covers(double length) const {
        if (const auto* s = std::get_if<forcing::Separable>(&v_)) s->space.check_covers(length);
        if (const auto* s = std::get_if<forcing::TimeImpulse>(&v_)) s->space.check_covers(length);
        if (const auto* s = std::get_if<forcing::SampledField>(&v_)) {
            const double slack = 1e-12 * length;
            if (s->x.front() > slack || s->x.back() < length - slack)
                throw InvalidInput("SampledField does not cover [0, L]");
        }
        if (const auto* s = std::get_if<forcing::PointHarmonic>(&v_)) {
            if (s->position < 0.0 || s->position > length)
                throw InvalidInput("PointHarmonic: position outside [0, L]");
        }
    }

private:
    Variant v_{forcing::Zero{}};
};

// amplitude * sin(wavenumber x + space_phase) * sin(frequency t + time_phase)
inline ForcingTerm sinusoid_forcing(double amplitude, double wavenumber, double frequency,
                                    double space_phase = 0.0, double time_phase = 0.0) {
    return forcing::Separable{profile::Sinusoid{amplitude, wavenumber, space_phase},
                              temporal::Sinusoid{1.0, frequency, time_phase}};
}

inline double sampled_field_value(const forcing::SampledField& s, double x, double t) {
    const auto clampx = std::clamp(x, s.x.front(), s.x.back());
    const auto clampt = std::clamp(t, s.t.front(), s.t.back());
    const std::size_t i = detail::locate(s.x, clampx);
    const std::size_t j = detail::locate(s.t, clampt);
    const double wx = (clampx - s.x[i]) / (s.x[i + 1] - s.x[i]);
    const double wt = (clampt - s.t[j]) / (s.t[j + 1] - s.t[j]);
    const std::size_t nx = s.x.size();
    const double v00 = s.values[j * nx + i];
    const double v10 = s.values[j * nx + i + 1];
    const double v01 = s.values[(j + 1) * nx + i];
    const double v11 = s.values[(j + 1) * nx + i + 1];
    return (1.0 - wt) * ((1.0 - wx) * v00 + wx * v10) + wt * ((1.0 - wx) * v01 + wx * v11);
}

// Initial displacement f, initial velocity g and forcing p.
struct ExcitationSpec {
    Profile f;
    Profile g;
    ForcingTerm p;
};

}  // namespace dampedbar
