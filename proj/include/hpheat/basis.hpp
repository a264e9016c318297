#ifndef HPHEAT_BASIS_HPP
#define HPHEAT_BASIS_HPP

// Hierarchic shape functions on the master element (-1, 1):
//   N_1 = (1 - eta)/2,  N_2 = (1 + eta)/2,
//   N_k = (L_{k-1} - L_{k-3}) / sqrt(2(2k - 3)),  k = 3..p+1,
// where L_k are Legendre polynomials. The bubble modes vanish at the
// endpoints and their derivatives are L2-orthonormal on (-1, 1).

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hpheat {

/// Largest polynomial degree a ShapeSet may carry.
inline constexpr int kMaxDegree = 12;

/// L_k(eta) by the Bonnet recurrence (k+1) L_{k+1} = (2k+1) eta L_k - k L_{k-1}.
inline double legendre_eval(int degree, double eta) {
    if (degree < 0) throw std::invalid_argument("legendre_eval: negative degree");
    if (degree == 0) return 1.0;
    double prev = 1.0;
    double cur = eta;
    for (int k = 1; k < degree; ++k) {
        const double next = ((2.0 * k + 1.0) * eta * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// The p + 1 hierarchic shape functions of degree p. Indices are 1-based as in
/// the usual FE notation: 1 and 2 are the vertex functions, 3..p+1 the bubbles.
class ShapeSet {
public:
    explicit ShapeSet(int degree) : degree_(degree) {
        if (degree < 1 || degree > kMaxDegree)
            throw std::invalid_argument("ShapeSet: degree " + std::to_string(degree) +
                                        " outside [1, " + std::to_string(kMaxDegree) + "]");
    }

    int degree() const noexcept { return degree_; }
    int count() const noexcept { return degree_ + 1; }

    double value(int k, double eta) const {
        check(k);
        switch (k) {
        case 1: return 0.5 * (1.0 - eta);
        case 2: return 0.5 * (1.0 + eta);
        default:
            return (legendre_eval(k - 1, eta) - legendre_eval(k - 3, eta)) /
                   std::sqrt(2.0 * (2.0 * k - 3.0));
        }
    }

    /// dN_k/deta. For bubbles this is sqrt((2k-3)/2) L_{k-2}(eta).
    double deriv(int k, double eta) const {
        check(k);
        switch (k) {
        case 1: return -0.5;
        case 2: return 0.5;
        default: return std::sqrt((2.0 * k - 3.0) / 2.0) * legendre_eval(k - 2, eta);
        }
    }

private:
    void check(int k) const {
        if (k < 1 || k > count())
            throw std::out_of_range("ShapeSet: index " + std::to_string(k) + " outside [1, " +
                                    std::to_string(count()) + "]");
    }

    int degree_;
};

inline double shape_eval(const ShapeSet& set, int k, double eta) { return set.value(k, eta); }
inline double shape_deriv(const ShapeSet& set, int k, double eta) { return set.deriv(k, eta); }

struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;

    std::size_t size() const noexcept { return points.size(); }
};

namespace detail {
// P_n(x) and P_n'(x) together; the derivative uses n (x P_n - P_{n-1}) / (x^2 - 1).
inline std::pair<double, double> legendre_with_deriv(int n, double x) {
    double prev = 1.0, cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0) * x * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return {cur, n * (x * cur - prev) / (x * x - 1.0)};
}
} // namespace detail

/// n-point Gauss-Legendre rule on (-1, 1), exact up to degree 2n - 1.
inline QuadratureRule gauss_rule(int order) {
    if (order < 1) throw std::invalid_argument("gauss_rule: order must be >= 1");
    QuadratureRule rule;
    rule.points.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = detail::legendre_with_deriv(order, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = detail::legendre_with_deriv(order, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[i] = -x;
        rule.points[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.points[order / 2] = 0.0;
    return rule;
}

/// Affine map of the master element onto (x_left, x_right).
struct ElementMap {
    double x_left;
    double x_right;

    double length() const noexcept { return x_right - x_left; }
    double jacobian() const noexcept { return 0.5 * (x_right - x_left); }

    double to_physical(double eta) const noexcept {
        return 0.5 * (1.0 - eta) * x_left + 0.5 * (1.0 + eta) * x_right;
    }
    double to_master(double x) const noexcept {
        return (2.0 * x - x_left - x_right) / (x_right - x_left);
    }
};

inline double map_to_physical(const ElementMap& map, double eta) { return map.to_physical(eta); }

} // namespace hpheat

#endif // HPHEAT_BASIS_HPP
