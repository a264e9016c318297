#ifndef HPHEAT_BANDED_HPP
#define HPHEAT_BANDED_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hpheat/errors.hpp"

namespace hpheat {

/// Square band matrix with kl sub- and ku super-diagonals. Row i keeps the
/// columns i-kl .. i+ku contiguously, so row sweeps stay cache friendly.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
        : n_(n), kl_(kl), ku_(ku), width_(kl + ku + 1), data_(n * (kl + ku + 1), 0.0) {}

    std::size_t size() const noexcept { return n_; }
    std::size_t lower() const noexcept { return kl_; }
    std::size_t upper() const noexcept { return ku_; }

    bool in_band(std::size_t i, std::size_t j) const noexcept {
        return j + kl_ >= i && j <= i + ku_;
    }

    double operator()(std::size_t i, std::size_t j) const noexcept {
        return in_band(i, j) ? data_[index(i, j)] : 0.0;
    }

    double& at(std::size_t i, std::size_t j) {
        assert(i < n_ && j < n_);
        if (!in_band(i, j))
            throw std::out_of_range("BandedMatrix: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                    ") outside the band");
        return data_[index(i, j)];
    }

    void add(std::size_t i, std::size_t j, double v) { at(i, j) += v; }

    /// y = this * x
    void multiply(std::span<const double> x, std::span<double> y) const {
        assert(x.size() == n_ && y.size() == n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t j0 = i > kl_ ? i - kl_ : 0;
            const std::size_t j1 = std::min(n_ - 1, i + ku_);
            const double* row = &data_[index(i, j0)];
            double s = 0.0;
            for (std::size_t j = j0; j <= j1; ++j) s += row[j - j0] * x[j];
            y[i] = s;
        }
    }

    std::vector<double> operator*(std::span<const double> x) const {
        std::vector<double> y(n_);
        multiply(x, y);
        return y;
    }

    /// a*this + b*other, both with the same shape.
    static BandedMatrix combine(double a, const BandedMatrix& lhs, double b, const BandedMatrix& rhs) {
        assert(lhs.n_ == rhs.n_ && lhs.kl_ == rhs.kl_ && lhs.ku_ == rhs.ku_);
        BandedMatrix out(lhs.n_, lhs.kl_, lhs.ku_);
        for (std::size_t k = 0; k < out.data_.size(); ++k) out.data_[k] = a * lhs.data_[k] + b * rhs.data_[k];
        return out;
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    friend class BandedLU;

    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * width_ + (j + kl_ - i); }

    std::size_t n_ = 0;
    std::size_t kl_ = 0;
    std::size_t ku_ = 0;
    std::size_t width_ = 1;
    std::vector<double> data_;
};

/// LU factors of a band matrix, computed without pivoting so the factors stay
/// inside the original band. Suitable for the matrices produced here, whose
/// symmetric part is definite after a positive row scaling.
class BandedLU {
public:
    explicit BandedLU(BandedMatrix m) : lu_(std::move(m)) { factor(); }

    std::size_t size() const noexcept { return lu_.size(); }
    std::size_t half_bandwidth() const noexcept { return std::max(lu_.lower(), lu_.upper()); }

    /// Overwrites b with the solution of (L U) x = b.
    void solve_in_place(std::span<double> b) const {
        const std::size_t n = lu_.n_, kl = lu_.kl_, ku = lu_.ku_;
        assert(b.size() == n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j0 = i > kl ? i - kl : 0;
            double s = b[i];
            const double* row = &lu_.data_[lu_.index(i, j0)];
            for (std::size_t j = j0; j < i; ++j) s -= row[j - j0] * b[j];
            b[i] = s;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            const std::size_t j1 = std::min(n - 1, ii + ku);
            const double* row = &lu_.data_[lu_.index(ii, ii)];
            double s = b[ii];
            for (std::size_t j = ii + 1; j <= j1; ++j) s -= row[j - ii] * b[j];
            b[ii] = s / row[0];
        }
    }

    std::vector<double> solve(std::span<const double> b) const {
        std::vector<double> x(b.begin(), b.end());
        solve_in_place(x);
        return x;
    }

private:
    void factor() {
        const std::size_t n = lu_.n_, kl = lu_.kl_, ku = lu_.ku_;
        const double scale = lu_.max_abs();
        if (n > 0 && scale == 0.0) throw NumericalError("banded LU: zero matrix", 0);
        const double tiny = scale * 1e-14;
        for (std::size_t k = 0; k < n; ++k) {
            const double pivot = lu_.data_[lu_.index(k, k)];
            if (!(std::abs(pivot) > tiny) || !std::isfinite(pivot))
                throw NumericalError("banded LU: vanishing pivot at row " + std::to_string(k), k);
            const std::size_t i1 = std::min(n - 1, k + kl);
            const std::size_t j1 = std::min(n - 1, k + ku);
            const double* urow = &lu_.data_[lu_.index(k, k)];
            for (std::size_t i = k + 1; i <= i1; ++i) {
                double* row = &lu_.data_[lu_.index(i, k)];
                const double l = row[0] / pivot;
                row[0] = l;
                if (l == 0.0) continue;
                for (std::size_t j = k + 1; j <= j1; ++j) row[j - k] -= l * urow[j - k];
            }
        }
    }

    BandedMatrix lu_;
};

} // namespace hpheat

#endif // HPHEAT_BANDED_HPP
