#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dampedbar/config.hpp"
#include "dampedbar/error.hpp"
#include "dampedbar/excitation.hpp"
#include "dampedbar/quadrature.hpp"

namespace dampedbar {

// Symmetric-pattern tridiagonal matrix; lower[i] = A(i+1, i), upper[i] = A(i, i+1).
struct Tridiagonal {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;

    explicit Tridiagonal(std::size_t n = 0) : lower(n ? n - 1 : 0), diag(n), upper(n ? n - 1 : 0) {}

    std::size_t size() const noexcept { return diag.size(); }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) return diag[i];
        if (i == j + 1) return lower[j];
        if (j == i + 1) return upper[i];
        return 0.0;
    }

    Eigen::VectorXd multiply(const Eigen::VectorXd& v) const {
        const std::size_t n = size();
        Eigen::VectorXd out(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * v[static_cast<Eigen::Index>(i)];
            if (i > 0) s += lower[i - 1] * v[static_cast<Eigen::Index>(i - 1)];
            if (i + 1 < n) s += upper[i] * v[static_cast<Eigen::Index>(i + 1)];
            out[static_cast<Eigen::Index>(i)] = s;
        }
        return out;
    }

    Eigen::MatrixXd dense() const {
        const auto n = static_cast<Eigen::Index>(size());
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            out(i, i) = diag[static_cast<std::size_t>(i)];
            if (i + 1 < n) {
                out(i + 1, i) = lower[static_cast<std::size_t>(i)];
                out(i, i + 1) = upper[static_cast<std::size_t>(i)];
            }
        }
        return out;
    }
};

// LU without pivoting (Thomas algorithm); fine for the diagonally dominant
// and SPD matrices assembled here, and checked for zero pivots.
class TridiagonalLU {
public:
    explicit TridiagonalLU(const Tridiagonal& a) : lower_(a.lower), upper_(a.upper), pivot_(a.diag) {
        const std::size_t n = pivot_.size();
        double scale = 0.0;
        for (double d : a.diag) scale = std::max(scale, std::abs(d));
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) {
                lower_[i - 1] /= pivot_[i - 1];
                pivot_[i] -= lower_[i - 1] * upper_[i - 1];
            }
            if (!(std::abs(pivot_[i]) > 1e-14 * scale))
                throw NumericalError("TridiagonalLU: zero pivot at row " + std::to_string(i));
        }
    }

    Eigen::VectorXd solve(Eigen::VectorXd b) const {
        const auto n = static_cast<Eigen::Index>(pivot_.size());
        for (Eigen::Index i = 1; i < n; ++i) b[i] -= lower_[static_cast<std::size_t>(i - 1)] * b[i - 1];
        b[n - 1] /= pivot_[static_cast<std::size_t>(n - 1)];
        for (Eigen::Index i = n - 2; i >= 0; --i)
            b[i] = (b[i] - upper_[static_cast<std::size_t>(i)] * b[i + 1]) / pivot_[static_cast<std::size_t>(i)];
        return b;
    }

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
    std::vector<double> pivot_;
};

// Consistent nodal load for linear elements: node i collects
// scale * int N_i(x) p(x, t) dx from the elements sharing it.
class FemLoad {
public:
    FemLoad() = default;

    FemLoad(const ForcingTerm& p, double length, int elements, double scale, const QuadratureSpec& quad = {})
        : n_(elements) {
        std::visit(
            [&](const auto& f) {
                using F = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<F, forcing::Zero>) {
                    kind_ = Kind::Zero;
                } else if constexpr (std::is_same_v<F, forcing::Separable>) {
                    kind_ = Kind::Separable;
                    space_ = nodal(f.space, length, scale, quad);
                    time_ = f.time;
                } else if constexpr (std::is_same_v<F, forcing::TimeImpulse>) {
                    kind_ = Kind::Impulse;
                    space_ = nodal(f.space, length, scale * f.magnitude, quad);
                } else if constexpr (std::is_same_v<F, forcing::PointHarmonic>) {
                    throw InvalidInput("FEM reference: complex-valued PointHarmonic forcing is not supported");
                } else {
                    kind_ = Kind::Sampled;
                    times_ = f.t;
                    const std::size_t nx = f.x.size();
                    for (std::size_t j = 0; j < f.t.size(); ++j) {
                        std::vector<double> row(f.values.begin() + static_cast<std::ptrdiff_t>(j * nx),
                                                f.values.begin() + static_cast<std::ptrdiff_t>((j + 1) * nx));
                        rows_.push_back(nodal(Profile(profile::Sampled{f.x, row}), length, scale, quad));
                    }
                }
            },
            p.variant());
    }

    bool is_impulse() const noexcept { return kind_ == Kind::Impulse; }

    // Nodal impulse delivered at t = 0 (zero unless the forcing is an impulse).
    Eigen::VectorXd impulse() const {
        return kind_ == Kind::Impulse ? space_ : Eigen::VectorXd::Zero(n_ + 1);
    }

    Eigen::VectorXd operator()(double t) const {
        switch (kind_) {
            case Kind::Separable: return space_ * time_(t);
            case Kind::Sampled: {
                if (t <= times_.front()) return rows_.front();
                if (t >= times_.back()) return rows_.back();
                const std::size_t j = detail::locate(times_, t);
                const double w = (t - times_[j]) / (times_[j + 1] - times_[j]);
                return (1.0 - w) * rows_[j] + w * rows_[j + 1];
            }
            case Kind::Zero:
            case Kind::Impulse: break;
        }
        return Eigen::VectorXd::Zero(n_ + 1);
    }

private:
    enum class Kind { Zero, Separable, Impulse, Sampled };

    Eigen::VectorXd nodal(const Profile& space, double length, double scale, const QuadratureSpec& quad) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n_ + 1);
        if (space.is_zero()) return out;
        const double h = length / n_;
        const std::vector<double> kinks = space.breakpoints(length);
        for (int e = 0; e < n_; ++e) {
            const double a = e * h;
            const double b = (e + 1) * h;
            std::vector<double> breaks{a};
            for (double k : kinks)
                if (k > a && k < b) breaks.push_back(k);
            breaks.push_back(b);
            const std::span<const double> bs(breaks);
            const double left = integrate_adaptive([&](double x) { return (1.0 - (x - a) / h) * space(x); }, bs, quad, 1).value;
            const double right = integrate_adaptive([&](double x) { return ((x - a) / h) * space(x); }, bs, quad, 1).value;
            out[e] += scale * left;
            out[e + 1] += scale * right;
        }
        return out;
    }

    Kind kind_ = Kind::Zero;
    int n_ = 0;
    Eigen::VectorXd space_;
    TemporalProfile time_;
    std::vector<double> times_;
    std::vector<Eigen::VectorXd> rows_;
};

// Linear-element discretization M U'' + C U' + K U = F(t), nondimensionalized
// by rho A0 c: M = (l / 6c) [2 1; 1 4 1; ...; 1 2], C = diag(h1, 0, ..., 0, h2),
// K = (c / l) [1 -1; -1 2 -1; ...; -1 1], F = (1/c) int N p with l = L / n.
struct FemSystem {
    int n = 0;
    double length = 1.0;
    Tridiagonal mass;
    Tridiagonal stiffness;
    std::vector<double> damping;  // diagonal of C
    double load_scale = 1.0;      // 1/c nondimensional, rho A0 physical
    FemLoad load;

    std::vector<double> nodes() const {
        std::vector<double> out(static_cast<std::size_t>(n + 1));
        for (int i = 0; i <= n; ++i) out[static_cast<std::size_t>(i)] = length * i / n;
        return out;
    }

    Eigen::MatrixXd damping_matrix() const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n + 1, n + 1);
        for (int i = 0; i <= n; ++i) out(i, i) = damping[static_cast<std::size_t>(i)];
        return out;
    }
};

namespace detail {

inline FemSystem assemble_matrices(int n, double length, double mass_coeff, double stiff_coeff,
                                   double left_damper, double right_damper) {
    if (n < 1) throw InvalidInput("assemble: element count must be at least 1");
    FemSystem sys;
    sys.n = n;
    sys.length = length;
    const std::size_t m = static_cast<std::size_t>(n + 1);
    sys.mass = Tridiagonal(m);
    sys.stiffness = Tridiagonal(m);
    for (int e = 0; e < n; ++e) {
        const auto i = static_cast<std::size_t>(e);
        sys.mass.diag[i] += 2.0 * mass_coeff;
        sys.mass.diag[i + 1] += 2.0 * mass_coeff;
        sys.mass.lower[i] += mass_coeff;
        sys.mass.upper[i] += mass_coeff;
        sys.stiffness.diag[i] += stiff_coeff;
        sys.stiffness.diag[i + 1] += stiff_coeff;
        sys.stiffness.lower[i] -= stiff_coeff;
        sys.stiffness.upper[i] -= stiff_coeff;
    }
    sys.damping.assign(m, 0.0);
    sys.damping.front() += left_damper;
    sys.damping.back() += right_damper;
    return sys;
}

}  // namespace detail

inline FemSystem assemble(const BarConfig& cfg, int n, const ForcingTerm& p = {},
                          const QuadratureSpec& quad = {}) {
    validate(cfg);
    if (n < 1) throw InvalidInput("assemble: element count must be at least 1");
    p.check_covers(cfg.L);
    const double l = cfg.L / n;
    FemSystem sys = detail::assemble_matrices(n, cfg.L, l / (6.0 * cfg.c), cfg.c / l, cfg.h1, cfg.h2);
    sys.load_scale = 1.0 / cfg.c;
    sys.load = FemLoad(p, cfg.L, n, sys.load_scale, quad);
    return sys;
}

// Same discretization in physical units: M = rho A0 l / 6 [...], C = diag(c1, ..., c2),
// K = E A0 / l [...], F = rho A0 int N p.
inline FemSystem assemble_physical(const PhysicalBar& bar, int n, const ForcingTerm& p = {},
                                   const QuadratureSpec& quad = {}) {
    derive_config(bar);  // validates
    if (n < 1) throw InvalidInput("assemble_physical: element count must be at least 1");
    p.check_covers(bar.L);
    const double l = bar.L / n;
    FemSystem sys = detail::assemble_matrices(n, bar.L, bar.rho * bar.A0 * l / 6.0, bar.E * bar.A0 / l,
                                              bar.c1, bar.c2);
    sys.load_scale = bar.rho * bar.A0;
    sys.load = FemLoad(p, bar.L, n, sys.load_scale, quad);
    return sys;
}

// [[0, I], [-M^{-1} K, -M^{-1} C]], with M^{-1} applied through a factorization.
inline Eigen::MatrixXd state_matrix(const FemSystem& sys) {
    const Eigen::Index m = sys.n + 1;
    const TridiagonalLU mass_lu(sys.mass);
    const Eigen::MatrixXd k = sys.stiffness.dense();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    a.topRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        a.block(m, j, m, 1) = -mass_lu.solve(k.col(j));
        Eigen::VectorXd cj = Eigen::VectorXd::Zero(m);
        cj[j] = sys.damping[static_cast<std::size_t>(j)];
        a.block(m, m + j, m, 1) = -mass_lu.solve(cj);
    }
    return a;
}

// All 2(n+1) eigenvalues of the state matrix sorted by imaginary then real part.
// Without dampers the pencil (K, M) is symmetric and gives +-i omega exactly;
// this also keeps the defective double zero of the free bar from splitting.
inline std::vector<std::complex<double>> fem_spectrum(const FemSystem& sys) {
    const auto sort_spectrum = [](std::vector<std::complex<double>>& v) {
        std::sort(v.begin(), v.end(), [](const auto& p, const auto& q) {
            if (p.imag() != q.imag()) return p.imag() < q.imag();
            return p.real() < q.real();
        });
    };
    if (std::all_of(sys.damping.begin(), sys.damping.end(), [](double d) { return d == 0.0; })) {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> sym(sys.stiffness.dense(), sys.mass.dense(),
                                                                      Eigen::EigenvaluesOnly);
        if (sym.info() != Eigen::Success) throw NumericalError("fem_spectrum: symmetric eigensolver failed");
        std::vector<std::complex<double>> out;
        for (double w2 : sym.eigenvalues()) {
            const double w = std::sqrt(std::max(w2, 0.0));
            out.emplace_back(0.0, w);
            out.emplace_back(0.0, -w);
        }
        sort_spectrum(out);
        return out;
    }
    const Eigen::MatrixXd a = state_matrix(sys);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw NumericalError("fem_spectrum: eigensolver failed (state matrix norm " +
                             std::to_string(a.norm()) + ")");
    std::vector<std::complex<double>> out(solver.eigenvalues().begin(), solver.eigenvalues().end());
    sort_spectrum(out);
    return out;
}

// Nodal histories; displacement[s][i] is node i at times[s].
struct Trajectory {
    double dt = 0.0;
    std::vector<double> nodes;
    std::vector<double> times;
    std::vector<std::vector<double>> displacement;
    std::vector<std::vector<double>> velocity;
};

// Average-acceleration Newmark march (beta = 1/4, gamma = 1/2). The step is
// adjusted to T / round(T / dt) so the last sample lands on T. Initial nodal
// values interpolate f and g; exc.p supplies the forcing.
inline Trajectory fem_integrate(const FemSystem& sys, const ExcitationSpec& exc, double dt, double T,
                                const QuadratureSpec& quad = {}) {
    if (!(dt > 0.0)) throw InvalidInput("fem_integrate: dt must be positive");
    if (!(T >= dt)) throw InvalidInput("fem_integrate: T must be at least dt");
    exc.f.check_covers(sys.length);
    exc.g.check_covers(sys.length);
    exc.p.check_covers(sys.length);

    const FemLoad load(exc.p, sys.length, sys.n, sys.load_scale, quad);
    const auto steps = std::max<long long>(1, std::llround(T / dt));
    const double h = T / static_cast<double>(steps);
    const Eigen::Index m = sys.n + 1;

    Trajectory traj;
    traj.dt = h;
    traj.nodes = sys.nodes();

    Eigen::VectorXd u(m), v(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        u[i] = exc.f(traj.nodes[static_cast<std::size_t>(i)]);
        v[i] = exc.g(traj.nodes[static_cast<std::size_t>(i)]);
    }
    const TridiagonalLU mass_lu(sys.mass);
    if (load.is_impulse()) v += mass_lu.solve(load.impulse());

    const Eigen::Map<const Eigen::VectorXd> cdiag(sys.damping.data(), m);
    const auto damp = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return cdiag.cwiseProduct(x); };
    Eigen::VectorXd a = mass_lu.solve(load(0.0) - damp(v) - sys.stiffness.multiply(u));

    const double c0 = 4.0 / (h * h);
    const double c1 = 2.0 / h;
    Tridiagonal eff = sys.stiffness;
    for (std::size_t i = 0; i < eff.size(); ++i) eff.diag[i] += c0 * sys.mass.diag[i] + c1 * sys.damping[i];
    for (std::size_t i = 0; i + 1 < eff.size(); ++i) {
        eff.lower[i] += c0 * sys.mass.lower[i];
        eff.upper[i] += c0 * sys.mass.upper[i];
    }
    const TridiagonalLU eff_lu(eff);

    const auto record = [&](double t) {
        traj.times.push_back(t);
        traj.displacement.emplace_back(u.data(), u.data() + m);
        traj.velocity.emplace_back(v.data(), v.data() + m);
    };
    record(0.0);
    for (long long s = 1; s <= steps; ++s) {
        const double t = h * static_cast<double>(s);
        const Eigen::VectorXd rhs = load(t) + sys.mass.multiply(c0 * u + (2.0 * c1) * v + a) + damp(c1 * u + v);
        const Eigen::VectorXd un = eff_lu.solve(rhs);
        const Eigen::VectorXd an = c0 * (un - u) - (2.0 * c1) * v - a;
        v += 0.5 * h * (a + an);
        u = un;
        a = an;
        record(t);
    }
    return traj;
}

struct SpuriousRow {
    int element_count = 0;
    double max_re = 0.0;
    bool unstable = false;
};

struct SpuriousReport {
    std::vector<SpuriousRow> rows;
    double tolerance = 1e-8;
    std::optional<int> first_unstable;
    // max_re nondecreasing in element count over the unstable rows
    bool monotone_growth = true;
};

inline SpuriousReport spurious_scan(const BarConfig& cfg, const std::vector<int>& element_counts,
                                    double tolerance = 1e-8) {
    SpuriousReport report;
    report.tolerance = tolerance;
    std::vector<int> counts = element_counts;
    std::sort(counts.begin(), counts.end());
    double previous = -std::numeric_limits<double>::infinity();
    for (int n : counts) {
        const auto eig = fem_spectrum(assemble(cfg, n));
        double max_re = -std::numeric_limits<double>::infinity();
        for (const auto& z : eig) max_re = std::max(max_re, z.real());
        SpuriousRow row{n, max_re, max_re > tolerance};
        if (row.unstable) {
            if (!report.first_unstable) report.first_unstable = n;
            if (max_re < previous) report.monotone_growth = false;
            previous = max_re;
        }
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace dampedbar
