#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dampedbar/config.hpp"
#include "dampedbar/error.hpp"
#include "dampedbar/excitation.hpp"
#include "dampedbar/fem.hpp"
#include "dampedbar/io.hpp"
#include "dampedbar/modal_response.hpp"
#include "dampedbar/spectrum.hpp"
#include "dampedbar/verification.hpp"

namespace dampedbar {

enum ExitCode : int {
    kExitOk = 0,
    kExitVerifyFailed = 1,
    kExitInvalidConfig = 2,
    kExitNumerical = 3,
};

// Failure category of a library exception.
inline int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const AccuracyError*>(&e) || dynamic_cast<const NumericalError*>(&e)) return kExitNumerical;
    if (dynamic_cast<const Error*>(&e)) return kExitInvalidConfig;
    return kExitNumerical;
}

struct NamedTable {
    std::string name;
    ResultTable table;
};

struct CommandOutput {
    std::vector<NamedTable> tables;
    int exit_code = kExitOk;
};

// ---------------------------------------------------------------- presets

namespace presets {

// h1 = 0.3, h2 = 0.7, c = 1.8, L = 1.5: the manufactured-solution and FEM comparison runs.
inline BarConfig fig2() { return {0.3, 0.7, 1.8, 1.5}; }
// h1 = 3, h2 = 1.2, c = 1, L = 1: FEM root locus.
inline BarConfig fig7() { return {3.0, 1.2, 1.0, 1.0}; }
// h1 = 0.7, h2 = -1.5, c = 1.5, L = 1.8: the spurious-eigenvalue case.
inline BarConfig fig8() { return {0.7, -1.5, 1.5, 1.8}; }

// p = sin(6 pi x / L) sin(pi t / L), f = 0.1 x (L - x/2), g = 0.
inline ExcitationSpec fig4_excitation(double L) {
    const double pi = std::numbers::pi;
    return {profile::Polynomial{{0.0, 0.1 * L, -0.05}}, profile::Zero{},
            forcing::Separable{profile::Sinusoid{1.0, 6.0 * pi / L, 0.0}, temporal::Sinusoid{1.0, pi / L, 0.0}}};
}

inline std::vector<double> uniform_grid(double L, int points) {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = L * i / (points - 1);
    g.back() = L;
    return g;
}

inline std::vector<int> range(int lo, int hi) {
    std::vector<int> out;
    for (int n = lo; n <= hi; ++n) out.push_back(n);
    return out;
}

}  // namespace presets

// ---------------------------------------------------------------- commands

namespace commands {

inline ResultTable spectrum_table(const BarConfig& cfg, int k) {
    ResultTable t{{"n", "re", "im"}, {}};
    for (const EigenPair& p : spectrum(cfg, k)) {
        Cell n = p.index.rigid ? Cell{std::string("rigid")} : Cell{static_cast<long long>(p.index.n)};
        t.add_row({n, p.lambda.real(), p.lambda.imag()});
    }
    return t;
}

inline ResultTable modes_table(const BarConfig& cfg, int k, const std::vector<double>& xs) {
    ResultTable t{{"x", "n", "u1_re", "u1_im", "u2_re", "u2_im"}, {}};
    for (const EigenPair& p : spectrum(cfg, k)) {
        const Cell n = p.index.rigid ? Cell{std::string("rigid")} : Cell{static_cast<long long>(p.index.n)};
        for (double x : xs) {
            const StateValue u = mode(cfg, p, x);
            t.add_row({x, n, u.first.real(), u.first.imag(), u.second.real(), u.second.imag()});
        }
    }
    return t;
}

inline ResultTable response_table(const FieldResult& u) {
    ResultTable t{{"x", "t", "u", "im_diag"}, {}};
    for (std::size_t it = 0; it < u.t.size(); ++it)
        for (std::size_t ix = 0; ix < u.x.size(); ++ix)
            t.add_row({u.x[ix], u.t[it], u.value(it, ix), u.at(it, ix).imag()});
    return t;
}

// At most ~max_rows time slices of the trajectory, always including the last.
inline ResultTable trajectory_table(const Trajectory& tr, std::size_t max_rows = 101) {
    ResultTable t{{"t", "x", "u", "v"}, {}};
    const std::size_t steps = tr.times.size();
    const std::size_t stride = std::max<std::size_t>(1, (steps - 1 + max_rows - 2) / (max_rows - 1));
    std::vector<std::size_t> picks;
    for (std::size_t s = 0; s < steps; s += stride) picks.push_back(s);
    if (picks.back() != steps - 1) picks.push_back(steps - 1);
    for (std::size_t s : picks)
        for (std::size_t i = 0; i < tr.nodes.size(); ++i)
            t.add_row({tr.times[s], tr.nodes[i], tr.displacement[s][i], tr.velocity[s][i]});
    return t;
}

inline void append_fem_eigs(ResultTable& t, const BarConfig& cfg, int n) {
    const auto eig = fem_spectrum(assemble(cfg, n));
    for (std::size_t i = 0; i < eig.size(); ++i)
        t.add_row({static_cast<long long>(n), static_cast<long long>(i), eig[i].real(), eig[i].imag()});
}

struct Comparison {
    ResultTable table;
    double max_abs_diff = 0.0;
    FieldResult series;
};

// Series at t_final on the FEM nodes against the FEM trajectory end state.
inline Comparison compare(const BarConfig& cfg, const ExcitationSpec& exc, int k, int elements, double dt,
                          double t_final, ResponseMethod method) {
    const FemSystem sys = assemble(cfg, elements, exc.p);
    const Trajectory tr = fem_integrate(sys, exc, dt, t_final);
    Comparison out{{{"x", "t", "u_series", "u_fem", "abs_diff"}, {}}, 0.0, {}};
    out.series = response(cfg, exc, k, tr.nodes, {tr.times.back()}, {method});
    const auto& ufem = tr.displacement.back();
    for (std::size_t i = 0; i < tr.nodes.size(); ++i) {
        const double us = out.series.value(0, i);
        const double d = std::abs(us - ufem[i]);
        out.max_abs_diff = std::max(out.max_abs_diff, d);
        out.table.add_row({tr.nodes[i], tr.times.back(), us, ufem[i], d});
    }
    return out;
}

inline ResultTable spurious_table(const SpuriousReport& rep) {
    ResultTable t{{"element_count", "max_re", "unstable"}, {}};
    for (const SpuriousRow& r : rep.rows) t.add_row({static_cast<long long>(r.element_count), r.max_re, r.unstable});
    return t;
}

struct CheckRow {
    std::string name;
    double measured;
    double threshold;
    bool pass() const { return measured <= threshold; }
};

// Library self-checks on one configuration; every check is "measured <= threshold".
inline std::vector<CheckRow> verify_checks(const BarConfig& cfg, int k) {
    std::vector<CheckRow> out;
    const double ratio = characteristic_ratio(cfg);
    const double re0 = eigenvalue(cfg, 0).real();
    double eq_res = 0.0;
    double re_spread = 0.0;
    double bc_direct = 0.0;
    double bc_adjoint = 0.0;
    for (int n = -k; n <= k; ++n) {
        const EigenPair p{ModeIndex::of(n), eigenvalue(cfg, n)};
        const std::complex<long double> z(p.lambda.real(), p.lambda.imag());
        const long double s = 2.0L * static_cast<long double>(cfg.L) / static_cast<long double>(cfg.c);
        eq_res = std::max(eq_res, static_cast<double>(std::abs(std::exp(z * s) - static_cast<long double>(ratio))));
        re_spread = std::max(re_spread, std::abs(p.lambda.real() - re0));
        const StateValue a = mode(cfg, p, 0.0);
        const StateValue b = mode(cfg, p, cfg.L);
        bc_direct = std::max({bc_direct, std::abs(a.second - cfg.h1 / cfg.c * a.first),
                              std::abs(b.second + cfg.h2 / cfg.c * b.first)});
        // adjoint conditions: v2(0) = -c h1 v1(0), v2(L) = c h2 v1(L)
        const StateValue va = adjoint_mode(cfg, p, 0.0);
        const StateValue vb = adjoint_mode(cfg, p, cfg.L);
        bc_adjoint = std::max({bc_adjoint, std::abs(va.second + cfg.c * cfg.h1 * va.first),
                               std::abs(vb.second - cfg.c * cfg.h2 * vb.first)});
    }
    const double scale = std::max(1.0, std::abs(ratio));
    out.push_back({"eigenvalue-residual", eq_res, 1e-12 * scale});
    out.push_back({"real-part-constancy", re_spread, 1e-12 * std::max(1.0, std::abs(re0))});
    out.push_back({"boundary-residual", bc_direct, 1e-10 * std::max(1.0, std::abs(ratio) + 1.0 / std::abs(ratio))});
    out.push_back({"adjoint-boundary-residual", bc_adjoint,
                   1e-10 * cfg.c * cfg.c * std::max(1.0, std::abs(ratio) + 1.0 / std::abs(ratio))});

    const double norm = normalization(cfg);
    double off = 0.0;
    double diag = 0.0;
    for (int n = -5; n <= 5; ++n)
        for (int m = -5; m <= 5; ++m) {
            const EigenPair pn{ModeIndex::of(n), eigenvalue(cfg, n)};
            const EigenPair pm{ModeIndex::of(m), eigenvalue(cfg, m)};
            const cplx ip = inner_product(adjoint_vector(cfg, pn), mode_vector(cfg, pm), cfg.L, {},
                                          panels_for_mode(std::max(std::abs(n), std::abs(m))));
            if (n == m) diag = std::max(diag, std::abs(ip - norm));
            else off = std::max(off, std::abs(ip));
        }
    out.push_back({"biorthogonality-offdiag", off, 1e-6 * cfg.L});
    out.push_back({"biorthogonality-norm", diag, 1e-6 * cfg.L});

    const std::vector<double> grid = presets::uniform_grid(cfg.L, 201);
    bool manufactured = true;
    try {
        (void)manufactured_pair(cfg);
    } catch (const InvalidInput&) {
        manufactured = false;
    }
    if (manufactured) {
        const ManufacturedCase mc(cfg);
        out.push_back({"fig2-k15-error", series_error(cfg, 15, 0.3, grid), 5e-4});
        const FieldResult u = response(cfg, mc.excitation(), 15, grid, {0.3}, {ResponseMethod::Simplified});
        out.push_back({"reality", u.max_imag, 1e-6 * u.max_real});
    }

    // g = 1 against the equivalent unit impulse in time
    const ExcitationSpec vel{profile::Zero{}, profile::Constant{1.0}, forcing::Zero{}};
    const ExcitationSpec imp{profile::Zero{}, profile::Zero{}, forcing::TimeImpulse{profile::Constant{1.0}, 1.0}};
    const std::vector<double> ts{0.0, 0.3, 1.0};
    double equiv = 0.0;
    for (ResponseMethod m : {ResponseMethod::General, ResponseMethod::Simplified}) {
        const FieldResult a = response(cfg, vel, k, grid, ts, {m});
        const FieldResult b = response(cfg, imp, k, grid, ts, {m});
        for (std::size_t i = 0; i < a.samples.size(); ++i) equiv = std::max(equiv, std::abs(a.samples[i] - b.samples[i]));
    }
    out.push_back({"impulse-velocity-equivalence", equiv, 1e-10});

    const double id25 = summation_identity_residual(cfg, cfg.L / 3.0, cfg.L, 25);
    const double id200 = summation_identity_residual(cfg, cfg.L / 3.0, cfg.L, 200);
    out.push_back({"summation-identity-trend", id200, id25});
    const double p25 = parseval_residual(cfg, profile::Constant{1.0}, 25);
    const double p200 = parseval_residual(cfg, profile::Constant{1.0}, 200);
    out.push_back({"parseval-trend", p200, p25});
    return out;
}

inline ResultTable checks_table(const std::vector<CheckRow>& rows) {
    ResultTable t{{"check", "measured", "threshold", "pass"}, {}};
    for (const CheckRow& r : rows) t.add_row({r.name, r.measured, r.threshold, r.pass()});
    return t;
}

// Series-vs-FEM difference for k = 1..k_max on the fig4 preset inputs.
inline ResultTable fig5_table(const std::vector<int>& element_counts, int k_max, double dt, double t_final,
                              ResponseMethod method) {
    const BarConfig cfg = presets::fig2();
    const ExcitationSpec exc = presets::fig4_excitation(cfg.L);
    ResultTable t{{"element_count", "k", "max_abs_diff"}, {}};
    for (int n : element_counts) {
        const FemSystem sys = assemble(cfg, n, exc.p);
        const Trajectory tr = fem_integrate(sys, exc, dt, t_final);
        const auto& ufem = tr.displacement.back();
        for (int k = 1; k <= k_max; ++k) {
            const FieldResult u = response(cfg, exc, k, tr.nodes, {tr.times.back()}, {method});
            double d = 0.0;
            for (std::size_t i = 0; i < tr.nodes.size(); ++i) d = std::max(d, std::abs(u.value(0, i) - ufem[i]));
            t.add_row({static_cast<long long>(n), static_cast<long long>(k), d});
        }
    }
    return t;
}

}  // namespace commands

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"spectrum", "modes", "respond", "fem",  "fem-eigs", "compare",
                                                "spurious-scan", "verify", "fig2", "fig5", "fig7", "fig8"};
    return names;
}

inline bool is_preset(std::string_view cmd) {
    return cmd == "fig2" || cmd == "fig5" || cmd == "fig7" || cmd == "fig8";
}

// Runs one command. Library errors propagate; callers map them with exit_code_for.
inline CommandOutput run_command(std::string_view cmd, const RunConfig& rc) {
    CommandOutput out;
    const auto emit = [&](std::string name, ResultTable t) { out.tables.push_back({std::move(name), std::move(t)}); };

    if (cmd == "fig2") {
        const BarConfig cfg = presets::fig2();
        const std::vector<double> grid = presets::uniform_grid(cfg.L, 301);
        ResultTable t{{"k", "max_abs_error"}, {}};
        for (int k : {3, 6, 9, 12, 15}) t.add_row({static_cast<long long>(k), series_error(cfg, k, 0.3, grid)});
        emit("fig2", std::move(t));
        const ManufacturedCase mc(cfg);
        const FieldResult u = response(cfg, mc.excitation(), 15, grid, {0.3}, {ResponseMethod::Simplified});
        ResultTable e{{"x", "t", "u_exact", "u_series", "error"}, {}};
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double ue = mc.displacement(grid[i], 0.3);
            e.add_row({grid[i], 0.3, ue, u.value(0, i), ue - u.value(0, i)});
        }
        emit("fig2_error_k15", std::move(e));
        return out;
    }
    if (cmd == "fig5") {
        emit("fig5", commands::fig5_table({40, 60}, 40, std::min(rc.fem.dt, 1e-4), 0.5, ResponseMethod::Simplified));
        return out;
    }
    if (cmd == "fig7") {
        const BarConfig cfg = presets::fig7();
        ResultTable t{{"element_count", "idx", "re", "im"}, {}};
        for (int n = 1; n <= 60; ++n) commands::append_fem_eigs(t, cfg, n);
        emit("fig7", std::move(t));
        emit("fig7_exact", commands::spectrum_table(cfg, 10));
        return out;
    }
    if (cmd == "fig8") {
        const BarConfig cfg = presets::fig8();
        emit("fig8", commands::spurious_table(spurious_scan(cfg, presets::range(1, 60), rc.fem.instability_tolerance)));
        ResultTable t{{"element_count", "idx", "re", "im"}, {}};
        for (int n : {10, 20, 40, 60}) commands::append_fem_eigs(t, cfg, n);
        emit("fig8_eigs", std::move(t));
        return out;
    }

    const BarConfig cfg = rc.resolved();
    validate(cfg);
    const std::vector<int> counts =
        rc.fem.element_counts.empty() ? std::vector<int>{rc.fem.elements} : rc.fem.element_counts;

    if (cmd == "spectrum") {
        emit("spectrum", commands::spectrum_table(cfg, rc.k));
    } else if (cmd == "modes") {
        emit("modes", commands::modes_table(cfg, rc.k, rc.x_grid()));
    } else if (cmd == "respond") {
        emit("respond", commands::response_table(response(cfg, rc.excitation, rc.k, rc.x_grid(), rc.t, {rc.method})));
    } else if (cmd == "fem") {
        const FemSystem sys = assemble(cfg, rc.fem.elements, rc.excitation.p);
        emit("fem", commands::trajectory_table(fem_integrate(sys, rc.excitation, rc.fem.dt, rc.fem.t_final)));
    } else if (cmd == "fem-eigs") {
        ResultTable t{{"element_count", "idx", "re", "im"}, {}};
        for (int n : counts) commands::append_fem_eigs(t, cfg, n);
        emit("fem_eigs", std::move(t));
    } else if (cmd == "compare") {
        emit("compare", commands::compare(cfg, rc.excitation, rc.k, rc.fem.elements, rc.fem.dt, rc.fem.t_final, rc.method)
                            .table);
    } else if (cmd == "spurious-scan") {
        const std::vector<int> scan = rc.fem.element_counts.empty() ? presets::range(1, 60) : rc.fem.element_counts;
        emit("spurious_scan", commands::spurious_table(spurious_scan(cfg, scan, rc.fem.instability_tolerance)));
    } else if (cmd == "verify") {
        const auto rows = commands::verify_checks(cfg, rc.k);
        emit("verify", commands::checks_table(rows));
        if (!std::all_of(rows.begin(), rows.end(), [](const commands::CheckRow& r) { return r.pass(); }))
            out.exit_code = kExitVerifyFailed;
    } else {
        throw InvalidInput("unknown command '" + std::string(cmd) + "'");
    }
    return out;
}

}  // namespace dampedbar
