#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "dampedbar/config.hpp"
#include "dampedbar/error.hpp"
#include "dampedbar/excitation.hpp"
#include "dampedbar/quadrature.hpp"
#include "dampedbar/spectrum.hpp"

namespace dampedbar {

enum class ResponseMethod {
    General,     // u(x,0) + sum of eta_r(0) (e^{lambda t} - 1)/lambda u_1r + forcing convolution
    Simplified,  // closed-form constant terms plus decaying modal sums
};

inline std::string_view to_string(ResponseMethod m) {
    return m == ResponseMethod::General ? "general" : "simplified";
}

enum class TimeIntegration {
    Exact,    // closed-form antiderivatives where the temporal form allows
    Numeric,  // adaptive Gauss-Legendre in tau
};

namespace detail {

// (e^{z t} - 1) / z, continuous through z = 0.
inline cplx exp_rel(cplx z, double t) {
    const cplx zt = z * t;
    if (std::abs(zt) < 1e-3) {
        return t * (1.0 + zt / 2.0 + zt * zt / 6.0 + zt * zt * zt / 24.0 + zt * zt * zt * zt / 120.0);
    }
    return (std::exp(zt) - 1.0) / z;
}

template <class Weight>
cplx project_profile(const Profile& prof, Weight&& w, double length, const QuadratureSpec& quad,
                     int panels_hint) {
    if (prof.is_zero()) return {0.0, 0.0};
    const std::vector<double> breaks = prof.breakpoints(length);
    auto integrand = [&](double x) { return prof(x) * cplx(w(x)); };
    return integrate_adaptive(integrand, std::span<const double>(breaks), quad, panels_hint).value;
}

}  // namespace detail

// int_0^t e^{lambda (t - tau)} P(tau) d tau and int_0^t P(tau) d tau, where
// P(tau) = int_0^L p(xi, tau) w(xi) d xi for a fixed spatial weight w.
struct ForcingIntegrals {
    cplx convolution{0.0, 0.0};
    cplx accumulated{0.0, 0.0};
};

// Spatial projection of a forcing term against one weight, kept in a form
// that can be convolved in time for any t.
class ModalLoad {
public:
    template <class Weight>
    ModalLoad(const ForcingTerm& p, Weight&& w, double length, const QuadratureSpec& quad,
              int panels_hint) {
        std::visit(
            [&](const auto& f) {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, forcing::Zero>) {
                    kind_ = Kind::Zero;
                } else if constexpr (std::is_same_v<F, forcing::Separable>) {
                    kind_ = Kind::Exponentials;
                    const cplx q = detail::project_profile(f.space, w, length, quad, panels_hint);
                    for (const ExpTerm& e : f.time.exp_terms())
                        terms_.push_back({q * e.coefficient, e.rate});
                } else if constexpr (std::is_same_v<F, forcing::TimeImpulse>) {
                    kind_ = Kind::Impulse;
                    impulse_ = f.magnitude * detail::project_profile(f.space, w, length, quad, panels_hint);
                } else if constexpr (std::is_same_v<F, forcing::PointHarmonic>) {
                    kind_ = Kind::Exponentials;
                    terms_.push_back({f.amplitude * cplx(w(f.position)), cplx(0.0, f.omega)});
                } else {
                    kind_ = Kind::Sampled;
                    times_ = f.t;
                    std::vector<double> breaks{0.0};
                    for (double xi : f.x)
                        if (xi > 0.0 && xi < length) breaks.push_back(xi);
                    breaks.push_back(length);
                    const std::span<const double> bs(breaks);
                    for (double tj : f.t) {
                        auto integrand = [&](double x) { return sampled_field_value(f, x, tj) * cplx(w(x)); };
                        samples_.push_back(integrate_adaptive(integrand, bs, quad, panels_hint).value);
                    }
                }
            },
            p.variant());
    }

    // P(tau); the impulse alternative has no pointwise value.
    cplx value(double tau) const {
        switch (kind_) {
            case Kind::Zero: return {0.0, 0.0};
            case Kind::Impulse: throw InvalidInput("ModalLoad: impulse forcing has no pointwise value");
            case Kind::Exponentials: {
                cplx s{0.0, 0.0};
                for (const ExpTerm& e : terms_) s += e.coefficient * std::exp(e.rate * tau);
                return s;
            }
            case Kind::Sampled: return sampled_value(tau);
        }
        return {0.0, 0.0};
    }

    ForcingIntegrals integrals(cplx lambda, double t, TimeIntegration mode = TimeIntegration::Exact,
                               const QuadratureSpec& quad = {}) const {
        if (t < 0.0) throw InvalidInput("forcing integrals: t must be non-negative");
        ForcingIntegrals out;
        if (kind_ == Kind::Zero || t == 0.0) {
            if (kind_ == Kind::Impulse) out = {impulse_, impulse_};
            return out;
        }
        switch (kind_) {
            case Kind::Zero: break;
            case Kind::Impulse:
                // delta(tau) at the lower limit is taken in full
                out.convolution = impulse_ * std::exp(lambda * t);
                out.accumulated = impulse_;
                break;
            case Kind::Exponentials:
                if (mode == TimeIntegration::Exact) {
                    const cplx decay = std::exp(lambda * t);
                    for (const ExpTerm& e : terms_) {
                        out.convolution += e.coefficient * decay * detail::exp_rel(e.rate - lambda, t);
                        out.accumulated += e.coefficient * detail::exp_rel(e.rate, t);
                    }
                } else {
                    out = numeric(lambda, t, quad);
                }
                break;
            case Kind::Sampled: out = trapezoid(lambda, t); break;
        }
        return out;
    }

private:
    enum class Kind { Zero, Exponentials, Impulse, Sampled };

    cplx sampled_value(double tau) const {
        if (tau <= times_.front()) return samples_.front();
        if (tau >= times_.back()) return samples_.back();
        const std::size_t j = detail::locate(times_, tau);
        const double w = (tau - times_[j]) / (times_[j + 1] - times_[j]);
        return (1.0 - w) * samples_[j] + w * samples_[j + 1];
    }

    ForcingIntegrals numeric(cplx lambda, double t, const QuadratureSpec& quad) const {
        ForcingIntegrals out;
        out.convolution =
            integrate([&](double tau) { return std::exp(lambda * (t - tau)) * value(tau); }, 0.0, t, quad);
        out.accumulated = integrate([&](double tau) { return value(tau); }, 0.0, t, quad);
        return out;
    }

    // Trapezoid over the sample times inside [0, t] plus both end points.
    ForcingIntegrals trapezoid(cplx lambda, double t) const {
        std::vector<double> nodes{0.0};
        for (double tj : times_)
            if (tj > 0.0 && tj < t) nodes.push_back(tj);
        nodes.push_back(t);
        ForcingIntegrals out;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double a = nodes[i];
            const double b = nodes[i + 1];
            const cplx pa = sampled_value(a);
            const cplx pb = sampled_value(b);
            out.convolution += 0.5 * (b - a) * (std::exp(lambda * (t - a)) * pa + std::exp(lambda * (t - b)) * pb);
            out.accumulated += 0.5 * (b - a) * (pa + pb);
        }
        return out;
    }

    Kind kind_ = Kind::Zero;
    std::vector<ExpTerm> terms_;
    cplx impulse_{0.0, 0.0};
    std::vector<double> times_;
    std::vector<cplx> samples_;
};

namespace detail {

inline void require_generic(const BarConfig& cfg, const char* who) {
    validate(cfg);
    const ConfigClass cls = classify(cfg);
    if (cls != ConfigClass::Generic)
        throw UnsupportedConfiguration(std::string(who) + ": unsupported configuration class " +
                                       std::string(to_string(cls)));
}

inline void require_mode(const EigenPair& pair, const char* who) {
    if (pair.index.rigid)
        throw InvalidInput(std::string(who) +
                           ": the rigid body enters only through the constant terms");
}

}  // namespace detail

// Initial modal coefficient from the partially integrated projection:
// eta_r(0) = [int (lambda f + g) u_1r + c f(L) h2 u_1r(L) + c f(0) h1 u_1r(0)] / (L (1 - h1^2)).
inline cplx eta0(const BarConfig& cfg, const ExcitationSpec& exc, const EigenPair& pair,
                 const QuadratureSpec& quad = {}) {
    detail::require_mode(pair, "eta0");
    const double norm = normalization(cfg);
    const cplx lambda = pair.lambda;
    const auto u1 = [&](double x) { return mode_unchecked(cfg, lambda, x).first; };
    const int hint = panels_for_mode(pair.index.n, quad);
    const cplx fpart = detail::project_profile(exc.f, u1, cfg.L, quad, hint);
    const cplx gpart = detail::project_profile(exc.g, u1, cfg.L, quad, hint);
    const cplx ends = cfg.c * exc.f(cfg.L) * cfg.h2 * u1(cfg.L) + cfg.c * exc.f(0.0) * cfg.h1 * u1(0.0);
    return (lambda * fpart + gpart + ends) / norm;
}

// Same coefficient from the unintegrated projection int [g u_1r - c^2 f' u_2r]
// / (L (1 - h1^2)); needs a differentiable f.
inline cplx eta0_unintegrated(const BarConfig& cfg, const ExcitationSpec& exc,
                              const EigenPair& pair, const QuadratureSpec& quad = {}) {
    detail::require_mode(pair, "eta0_unintegrated");
    const double norm = normalization(cfg);
    const double c2 = cfg.c * cfg.c;
    std::vector<double> breaks = exc.f.breakpoints(cfg.L);
    for (double b : exc.g.breakpoints(cfg.L)) breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    auto integrand = [&](double x) {
        const StateValue u = mode_unchecked(cfg, pair.lambda, x);
        return exc.g(x) * u.first - c2 * exc.f.derivative(x) * u.second;
    };
    return integrate_adaptive(integrand, std::span<const double>(breaks), quad,
                              panels_for_mode(pair.index.n, quad))
               .value /
           norm;
}

// int_0^t [-(1/lambda)(1 - e^{lambda (t - tau)})] int_0^L p(xi, tau) u_1r(xi) d xi d tau.
inline cplx forcing_projection(const BarConfig& cfg, const ForcingTerm& p, const EigenPair& pair,
                               double t, const QuadratureSpec& quad = {},
                               TimeIntegration mode = TimeIntegration::Exact) {
    detail::require_mode(pair, "forcing_projection");
    validate(cfg);
    if (t < 0.0) throw InvalidInput("forcing_projection: t must be non-negative");
    const auto u1 = [&](double x) { return mode_unchecked(cfg, pair.lambda, x).first; };
    const ModalLoad load(p, u1, cfg.L, quad, panels_for_mode(pair.index.n, quad));
    const ForcingIntegrals fi = load.integrals(pair.lambda, t, mode, quad);
    return (fi.convolution - fi.accumulated) / pair.lambda;
}

struct ResponseOptions {
    ResponseMethod method = ResponseMethod::General;
    QuadratureSpec quad{};
    double reality_rel_tol = 1e-6;
};

// Sampled u(x, t); samples[it * x.size() + ix].
struct FieldResult {
    std::vector<double> x;
    std::vector<double> t;
    std::vector<cplx> samples;
    int k = 0;
    ResponseMethod method = ResponseMethod::General;
    QuadratureSpec quad{};
    double max_real = 0.0;
    double max_imag = 0.0;
    double reality_rel_tol = 1e-6;
    bool reality_ok = true;

    cplx at(std::size_t it, std::size_t ix) const { return samples[it * x.size() + ix]; }
    double value(std::size_t it, std::size_t ix) const { return at(it, ix).real(); }
};

inline void check_grid(const std::vector<double>& xs, const std::vector<double>& ts, double length) {
    if (xs.empty() || ts.empty()) throw InvalidInput("response: empty grid");
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1])) throw InvalidInput("response: x grid must be strictly increasing");
    if (xs.front() < 0.0 || xs.back() > length) throw InvalidInput("response: x grid outside [0, L]");
    for (double t : ts)
        if (!(t >= 0.0)) throw InvalidInput("response: times must be non-negative");
}

// Series response with symmetric truncation r = -k..k. The General method
// assembles u(x,0) plus the time-integrated modal coordinates; Simplified uses
// the closed-form constant terms, which as written carry no c f(0) h1
// contribution.
inline FieldResult response(const BarConfig& cfg, const ExcitationSpec& exc, int k,
                            const std::vector<double>& xs, const std::vector<double>& ts,
                            const ResponseOptions& opts = {}) {
    detail::require_generic(cfg, "response");
    if (k < 0) throw InvalidInput("response: truncation k must be non-negative");
    check_grid(xs, ts, cfg.L);
    exc.f.check_covers(cfg.L);
    exc.g.check_covers(cfg.L);
    exc.p.check_covers(cfg.L);

    const QuadratureSpec& quad = opts.quad;
    const double norm = normalization(cfg);
    const std::size_t nx = xs.size();
    const std::size_t nt = ts.size();

    FieldResult out;
    out.x = xs;
    out.t = ts;
    out.k = k;
    out.method = opts.method;
    out.quad = quad;
    out.reality_rel_tol = opts.reality_rel_tol;
    out.samples.assign(nx * nt, cplx{0.0, 0.0});

    if (opts.method == ResponseMethod::General) {
        for (std::size_t it = 0; it < nt; ++it)
            for (std::size_t ix = 0; ix < nx; ++ix) out.samples[it * nx + ix] = exc.f(xs[ix]);
    } else {
        const double damping_sum = cfg.c * (cfg.h1 + cfg.h2);
        const cplx g_total = detail::project_profile(exc.g, [](double) { return 1.0; }, cfg.L, quad, 0);
        const cplx constant = (g_total + cfg.c * exc.f(cfg.L) * cfg.h2) / damping_sum;
        const ModalLoad rigid_load(exc.p, [](double) { return 1.0; }, cfg.L, quad, 0);
        for (std::size_t it = 0; it < nt; ++it) {
            const cplx forced = rigid_load.integrals(cplx{0.0, 0.0}, ts[it]).accumulated / damping_sum;
            for (std::size_t ix = 0; ix < nx; ++ix) out.samples[it * nx + ix] = constant + forced;
        }
    }

    std::vector<cplx> shape(nx);
    std::vector<cplx> coeff(nt);
    for (int r = -k; r <= k; ++r) {
        const EigenPair pair{ModeIndex::of(r), eigenvalue(cfg, r)};
        const cplx lambda = pair.lambda;
        const cplx eta = eta0(cfg, exc, pair, quad);
        const auto u1 = [&](double x) { return mode_unchecked(cfg, lambda, x).first; };
        const ModalLoad load(exc.p, u1, cfg.L, quad, panels_for_mode(r, quad));

        for (std::size_t ix = 0; ix < nx; ++ix) shape[ix] = u1(xs[ix]);

        cplx initial = eta;
        if (opts.method == ResponseMethod::Simplified)
            initial -= cfg.c * exc.f(0.0) * cfg.h1 * u1(0.0) / norm;

        for (std::size_t it = 0; it < nt; ++it) {
            const double t = ts[it];
            const cplx decay = std::exp(lambda * t);
            const ForcingIntegrals fi = load.integrals(lambda, t);
            if (opts.method == ResponseMethod::General) {
                coeff[it] = eta * detail::exp_rel(lambda, t) + (fi.convolution - fi.accumulated) / (lambda * norm);
            } else {
                coeff[it] = initial * decay / lambda + fi.convolution / (lambda * norm);
            }
        }
        for (std::size_t it = 0; it < nt; ++it)
            for (std::size_t ix = 0; ix < nx; ++ix) out.samples[it * nx + ix] += coeff[it] * shape[ix];
    }

    for (const cplx& s : out.samples) {
        out.max_real = std::max(out.max_real, std::abs(s.real()));
        out.max_imag = std::max(out.max_imag, std::abs(s.imag()));
    }
    out.reality_ok = out.max_imag <= opts.reality_rel_tol * out.max_real;
    return out;
}

// Steady-state response of the clamped-left bar to (F0 / rho A0) e^{i w t} delta(x - x_f):
// u = -(F0 / (rho A0 L)) sum_r sinh(lambda_r x / c) sinh(lambda_r x_f / c) e^{i w t}
//     / (lambda_r (i w - lambda_r)).
struct FixedDamperHarmonic {
    double h2 = 0.0;
    double c = 1.0;
    double L = 1.0;
    double F0 = 1.0;
    double rhoA0 = 1.0;
    double omega = 1.0;
    double x_f = 0.0;
};

inline cplx harmonic_steady_state_fixed_damper(const FixedDamperHarmonic& h, double x, double t, int k) {
    if (k < 0) throw InvalidInput("harmonic_steady_state_fixed_damper: k must be non-negative");
    if (!(h.rhoA0 > 0.0)) throw InvalidInput("harmonic_steady_state_fixed_damper: rhoA0 must be positive");
    if (x < 0.0 || x > h.L || h.x_f < 0.0 || h.x_f > h.L)
        throw InvalidInput("harmonic_steady_state_fixed_damper: position outside [0, L]");
    using namespace std::complex_literals;
    const cplx iw = 1i * h.omega;
    cplx sum{0.0, 0.0};
    for (int r = -k; r <= k; ++r) {
        const cplx lambda = fixed_damper_eigenvalue(h.h2, h.c, h.L, r);
        const cplx gap = iw - lambda;
        if (std::abs(gap) == 0.0 || std::abs(lambda) == 0.0)
            throw NumericalError("harmonic_steady_state_fixed_damper: resonance i w = lambda_r");
        sum += std::sinh(lambda * x / h.c) * std::sinh(lambda * h.x_f / h.c) / (lambda * gap);
    }
    return -(h.F0 / (h.rhoA0 * h.L)) * sum * std::exp(iw * t);
}

// Dashpot-mass motion of a rigid bar of mass rho A L launched at xdot0.
inline double rigid_limit_response(const PhysicalBar& p, double xdot0, double t) {
    if (t < 0.0) throw InvalidInput("rigid_limit_response: t must be non-negative");
    const double mass = p.rho * p.A0 * p.L;
    const double damping = p.c1 + p.c2;
    if (damping == 0.0) return xdot0 * t;
    return -mass * xdot0 / damping * std::expm1(-damping * t / mass);
}

}  // namespace dampedbar
