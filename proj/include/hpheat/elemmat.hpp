#ifndef HPHEAT_ELEMMAT_HPP
#define HPHEAT_ELEMMAT_HPP

// Element blocks of the two-field mixed system
//
//   C t' - Qt q      = d     (energy balance tested with u)
//   T q' + Q t + K q = 0     (constitutive law tested with v)
//
// C_jk  = int rho c_V N_j N_k dx             (T-test x T-trial)
// T_jk  = int tau N_j N_k dx                 (q-test x q-trial)
// K_jk  = int N_j N_k dx [+ kappa^2 int N_j' N_k' dx for GK]
// Q_jk  = int lambda N_j^q (N_k^T)' dx       (q-test x T-trial)
// Qt_jk = int (N_j^T)' N_k^q dx              (T-test x q-trial)
//
// so that Q = lambda Qt^T. The assembled energy row carries -Qt (see assembly.hpp).

#include <algorithm>

#include "hpheat/basis.hpp"
#include "hpheat/dense.hpp"
#include "hpheat/model.hpp"

namespace hpheat {

namespace detail {

/// Gauss order used for an element block: p + 2 points, with p the larger degree.
inline int default_quad_order(int deg_a, int deg_b) { return std::max(deg_a, deg_b) + 2; }

enum class Operand { Value, Deriv };

/// int_{-1}^{1} op_a(N_j) op_b(N_k) deta for the shape sets of degree deg_a, deg_b.
inline DenseMatrix master_block(int deg_a, Operand op_a, int deg_b, Operand op_b, int quad_order) {
    if (deg_a == 0 || deg_b == 0)
        return DenseMatrix(static_cast<std::size_t>(deg_a == 0 ? 0 : deg_a + 1),
                           static_cast<std::size_t>(deg_b == 0 ? 0 : deg_b + 1));
    const ShapeSet a(deg_a), b(deg_b);
    const QuadratureRule rule = gauss_rule(quad_order > 0 ? quad_order : default_quad_order(deg_a, deg_b));
    DenseMatrix m(a.count(), b.count());
    for (std::size_t g = 0; g < rule.size(); ++g) {
        const double eta = rule.points[g];
        const double w = rule.weights[g];
        for (int j = 1; j <= a.count(); ++j) {
            const double fa = op_a == Operand::Value ? a.value(j, eta) : a.deriv(j, eta);
            for (int k = 1; k <= b.count(); ++k) {
                const double fb = op_b == Operand::Value ? b.value(k, eta) : b.deriv(k, eta);
                m(j - 1, k - 1) += w * (fa * fb);
            }
        }
    }
    return m;
}

inline DenseMatrix scaled(DenseMatrix m, double s) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) *= s;
    return m;
}

} // namespace detail

/// Heat capacity block of the temperature field.
inline DenseMatrix element_C(const ElementMap& map, const MaterialParams& mat, int degT, int quad_order = 0) {
    using detail::Operand;
    return detail::scaled(detail::master_block(degT, Operand::Value, degT, Operand::Value, quad_order),
                          mat.rho * mat.c_V * map.jacobian());
}

/// Relaxation block of the heat-flux field; zero in the Fourier limit.
inline DenseMatrix element_T(const ElementMap& map, const MaterialParams& mat, int degQ, int quad_order = 0) {
    using detail::Operand;
    return detail::scaled(detail::master_block(degQ, Operand::Value, degQ, Operand::Value, quad_order),
                          mat.tau * map.jacobian());
}

/// Flux mass block, plus the kappa^2 gradient term for GK only.
inline DenseMatrix element_K(const ElementMap& map, const MaterialParams& mat, int degQ, ModelKind model,
                             int quad_order = 0) {
    using detail::Operand;
    const double J = map.jacobian();
    DenseMatrix k = detail::scaled(detail::master_block(degQ, Operand::Value, degQ, Operand::Value, quad_order), J);
    if (model == ModelKind::GK && mat.kappa2 != 0.0) {
        const DenseMatrix s = detail::master_block(degQ, Operand::Deriv, degQ, Operand::Deriv, quad_order);
        for (std::size_t i = 0; i < k.rows(); ++i)
            for (std::size_t j = 0; j < k.cols(); ++j) k(i, j) += mat.kappa2 / J * s(i, j);
    }
    return k;
}

/// lambda int v T' dx. The Jacobians of dx and d/dx cancel.
inline DenseMatrix element_Q(const ElementMap& /*map*/, const MaterialParams& mat, int degT, int degQ,
                             int quad_order = 0) {
    using detail::Operand;
    return detail::scaled(detail::master_block(degQ, Operand::Value, degT, Operand::Deriv, quad_order), mat.lambda);
}

/// int u' q dx; independent of every material coefficient.
inline DenseMatrix element_Qt(const ElementMap& /*map*/, const MaterialParams& /*mat*/, int degT, int degQ,
                              int quad_order = 0) {
    using detail::Operand;
    return detail::master_block(degT, Operand::Deriv, degQ, Operand::Value, quad_order);
}

} // namespace hpheat

#endif // HPHEAT_ELEMMAT_HPP
