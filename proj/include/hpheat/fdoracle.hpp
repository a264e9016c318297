#ifndef HPHEAT_FDORACLE_HPP
#define HPHEAT_FDORACLE_HPP

// Staggered finite differences for
//   rho c_V T' + dq/dx = 0,   tau q' + q + lambda dT/dx - kappa2 d2q/dx2 = 0
// with T at cell centres and q at faces. Deliberately independent of the
// finite element path: own grid, own stencils, own pentadiagonal solver.
// Both ends carry prescribed heat fluxes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hpheat/errors.hpp"
#include "hpheat/model.hpp"
#include "hpheat/signal.hpp"

namespace hpheat::fd {

struct StaggeredGrid {
    double length = 0.0;
    std::vector<double> T;  // cells
    std::vector<double> q;  // faces, q.size() == T.size() + 1

    static StaggeredGrid uniform(double length, std::size_t cells, double T0, double q0 = 0.0) {
        if (cells < 2) throw InputError("staggered grid needs at least two cells");
        if (!(length > 0.0)) throw InputError("grid length must be positive");
        return {length, std::vector<double>(cells, T0), std::vector<double>(cells + 1, q0)};
    }

    std::size_t cells() const noexcept { return T.size(); }
    double dx() const noexcept { return length / static_cast<double>(T.size()); }
    double center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * dx(); }
    double face(std::size_t j) const noexcept { return static_cast<double>(j) * dx(); }

    /// Linear interpolation between centres, linear extrapolation beyond the outer ones.
    double temperature_at(double x) const {
        const std::size_t m = cells();
        double s = x / dx() - 0.5;
        std::size_t i = s <= 0.0 ? 0 : std::min(static_cast<std::size_t>(s), m - 2);
        const double w = s - static_cast<double>(i);
        return (1.0 - w) * T[i] + w * T[i + 1];
    }

    double flux_at(double x) const {
        const std::size_t m = cells();
        const double s = std::clamp(x / dx(), 0.0, static_cast<double>(m));
        const std::size_t j = std::min(static_cast<std::size_t>(s), m - 1);
        const double w = s - static_cast<double>(j);
        return (1.0 - w) * q[j] + w * q[j + 1];
    }

    /// int rho c_V T dx per unit heat capacity, i.e. the midpoint sum of T.
    double temperature_integral() const {
        double s = 0.0;
        for (double v : T) s += v;
        return s * dx();
    }
};

namespace detail {

/// Band matrix with two sub- and two super-diagonals, LU without pivoting.
class Penta {
public:
    explicit Penta(std::size_t n) : a_(n, {0, 0, 0, 0, 0}) {}

    double& at(std::size_t i, std::size_t j) { return a_[i][j + 2 - i]; }
    double get(std::size_t i, std::size_t j) const {
        if (j + 2 < i || j > i + 2) return 0.0;
        return a_[i][j + 2 - i];
    }
    std::size_t size() const noexcept { return a_.size(); }

    void multiply(std::span<const double> x, std::span<double> y) const {
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = i >= 2 ? i - 2 : 0; j <= std::min(n - 1, i + 2); ++j) s += a_[i][j + 2 - i] * x[j];
            y[i] = s;
        }
    }

    void factor() {
        const std::size_t n = size();
        for (std::size_t k = 0; k < n; ++k) {
            const double piv = a_[k][2];
            if (piv == 0.0 || !std::isfinite(piv))
                throw NumericalError("finite-difference system is singular", k);
            for (std::size_t i = k + 1; i <= std::min(n - 1, k + 2); ++i) {
                const double l = (at(i, k) /= piv);
                for (std::size_t j = k + 1; j <= std::min(n - 1, k + 2); ++j) at(i, j) -= l * get(k, j);
            }
        }
    }

    void solve(std::span<double> b) const {
        const std::size_t n = size();
        for (std::size_t i = 1; i < n; ++i)
            for (std::size_t j = i >= 2 ? i - 2 : 0; j < i; ++j) b[i] -= get(i, j) * b[j];
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j <= std::min(n - 1, i + 2); ++j) b[i] -= get(i, j) * b[j];
            b[i] /= a_[i][2];
        }
    }

private:
    std::vector<std::array<double, 5>> a_;
};

} // namespace detail

/// theta-stepper for a fixed grid size, material and time step.
///
/// Unknowns are interleaved T_0, w_1, T_1, ..., w_{m-1}, T_{m-1}, where w is the
/// face flux minus the lifted boundary data. Under MCV and Fourier the boundary
/// faces only feed the end cells, so the data enters there directly; under GK
/// the q'' stencil reaches them as well and both prescribed fluxes are lifted by
/// linear functions of x. Step loads are exact time averages of the data.
class Stepper {
public:
    Stepper(std::size_t cells, double length, const MaterialParams& mat, ModelKind model, double dt, double theta,
            BoundarySignal left, BoundarySignal right)
        : m_(cells),
          dx_(length / static_cast<double>(cells)),
          length_(length),
          mat_(mat),
          lifted_(model == ModelKind::GK),
          dt_(dt),
          theta_(theta),
          left_(std::move(left)),
          right_(std::move(right)),
          lhs_(2 * cells - 1),
          rhs_(2 * cells - 1),
          z_(2 * cells - 1),
          b_(2 * cells - 1) {
        validate(mat, model);
        if (cells < 2) throw InputError("staggered grid needs at least two cells");
        if (!(dt > 0.0)) throw InputError("time step must be positive");
        if (!(theta >= 0.5 && theta <= 1.0)) throw InputError("theta must lie in [1/2, 1]");
        build(lhs_, theta_);
        build(rhs_, -(1.0 - theta_));
        lhs_.factor();
    }

    double dt() const noexcept { return dt_; }

    void advance(StaggeredGrid& g, double t_n) {
        if (g.cells() != m_) throw InputError("grid does not match the stepper");
        const double t1 = t_n + dt_;
        gather(g, t_n);
        rhs_.multiply(z_, b_);

        const double mean0 = (left_.integral(t1) - left_.integral(t_n)) / dt_;
        const double meanl = (right_.integral(t1) - right_.integral(t_n)) / dt_;
        if (lifted_) {
            // q = w + g0 (1 - x/l) + gl x/l; the lift has zero curvature.
            const double rate0 = (left_.value(t1) - left_.value(t_n)) / dt_;
            const double ratel = (right_.value(t1) - right_.value(t_n)) / dt_;
            const double div = (meanl - mean0) / length_;
            for (std::size_t i = 0; i < m_; ++i) b_[2 * i] -= div;
            for (std::size_t j = 1; j < m_; ++j) {
                const double s = g.face(j) / length_;
                b_[2 * j - 1] -= mat_.tau * (rate0 * (1.0 - s) + ratel * s) + mean0 * (1.0 - s) + meanl * s;
            }
        } else {
            b_[0] += mean0 / dx_;
            b_[2 * (m_ - 1)] -= meanl / dx_;
        }
        lhs_.solve(b_);
        z_.swap(b_);
        scatter(g, t1);
    }

private:
    std::size_t T_index(std::size_t i) const { return 2 * i; }
    std::size_t w_index(std::size_t j) const { return 2 * j - 1; }

    // s scales the spatial operator: +theta for the implicit side, -(1-theta) for the explicit one.
    void build(detail::Penta& M, double s) const {
        const double c = mat_.heat_capacity() / dt_, tr = mat_.tau / dt_;
        const double k = mat_.kappa2 / (dx_ * dx_);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t r = T_index(i);
            M.at(r, r) = c;
            if (i + 1 < m_) M.at(r, w_index(i + 1)) = s / dx_;
            if (i > 0) M.at(r, w_index(i)) = -s / dx_;
        }
        for (std::size_t j = 1; j < m_; ++j) {
            const std::size_t r = w_index(j);
            M.at(r, r) = tr + s * (1.0 + 2.0 * k);
            M.at(r, T_index(j)) = s * mat_.lambda / dx_;
            M.at(r, T_index(j - 1)) = -s * mat_.lambda / dx_;
            if (j > 1) M.at(r, w_index(j - 1)) = -s * k;
            if (j + 1 < m_) M.at(r, w_index(j + 1)) = -s * k;
        }
    }

    double boundary_part(const StaggeredGrid& g, std::size_t j, double t) const {
        if (!lifted_) return 0.0;
        const double s = g.face(j) / length_;
        return left_.value(t) * (1.0 - s) + right_.value(t) * s;
    }

    void gather(const StaggeredGrid& g, double t) {
        for (std::size_t i = 0; i < m_; ++i) z_[T_index(i)] = g.T[i];
        for (std::size_t j = 1; j < m_; ++j) z_[w_index(j)] = g.q[j] - boundary_part(g, j, t);
    }

    void scatter(StaggeredGrid& g, double t) const {
        for (std::size_t i = 0; i < m_; ++i) g.T[i] = z_[T_index(i)];
        for (std::size_t j = 1; j < m_; ++j) g.q[j] = z_[w_index(j)] + boundary_part(g, j, t);
        g.q[0] = left_.value(t);
        g.q[m_] = right_.value(t);
    }

    std::size_t m_;
    double dx_, length_;
    MaterialParams mat_;
    bool lifted_;
    double dt_, theta_;
    BoundarySignal left_, right_;
    detail::Penta lhs_, rhs_;
    std::vector<double> z_, b_;
};

/// One fully implicit step with boundary fluxes q0, ql held over the step.
inline StaggeredGrid fd_step(const StaggeredGrid& grid, const MaterialParams& mat, ModelKind model, double dt,
                             double q0, double ql) {
    StaggeredGrid next = grid;
    // Constant data on the step: the lift sees no rate, and the state's boundary
    // faces must already hold the same values for the lift to be consistent.
    next.q.front() = q0;
    next.q.back() = ql;
    Stepper s(grid.cells(), grid.length, mat, model, dt, 1.0, BoundarySignal::constant(q0),
              BoundarySignal::constant(ql));
    s.advance(next, 0.0);
    return next;
}

} // namespace hpheat::fd

#endif // HPHEAT_FDORACLE_HPP
