#ifndef HPHEAT_FIELD_HPP
#define HPHEAT_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hpheat/assembly.hpp"

namespace hpheat {

/// Point evaluation of a field as a sparse linear functional over the full
/// coefficient vector. Built once per probe so time stepping only does a dot product.
struct PointFunctional {
    std::vector<std::pair<std::size_t, double>> weights;

    double apply(std::span<const double> full) const {
        double s = 0.0;
        for (const auto& [i, w] : weights) s += w * full[i];
        return s;
    }
};

namespace detail {

inline void add_element_weights(PointFunctional& pf, const ShapeSet& set, const std::vector<std::size_t>& dofs,
                                double eta, double scale) {
    for (int k = 1; k <= set.count(); ++k) {
        const double w = scale * set.value(k, eta);
        if (w != 0.0) pf.weights.emplace_back(dofs[k - 1], w);
    }
}

} // namespace detail

/// At an interior mesh node a discontinuous field is evaluated as the mean of
/// its two one-sided limits; C0 fields agree there anyway.
inline PointFunctional point_functional(const SemiDiscreteSystem& sys, double x, Field field) {
    const Mesh& mesh = sys.mesh;
    const double tol = 1e-12 * mesh.length();
    if (x < mesh.left() - tol || x > mesh.right() + tol)
        throw InputError("point x = " + std::to_string(x) + " lies outside the domain");
    x = std::clamp(x, mesh.left(), mesh.right());

    const auto& nodes = mesh.nodes;
    const bool temperature = field == Field::Temperature;
    const SpaceSpec space = temperature ? sys.dofmap.t_space : sys.dofmap.q_space;
    const ShapeSet set(space.degree);
    const auto& dofs = temperature ? sys.dofmap.t_dofs : sys.dofmap.q_dofs;
    const std::size_t n = mesh.elements();

    PointFunctional pf;
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    std::size_t e = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
    e = std::min(e, n - 1);

    // snap to a node when within tolerance
    std::size_t node = kNoDof;
    for (std::size_t cand : {e, e + 1})
        if (cand <= n && std::abs(nodes[cand] - x) <= tol) node = cand;

    if (node == kNoDof) {
        detail::add_element_weights(pf, set, dofs[e], mesh.element(e).to_master(x), 1.0);
    } else if (node == 0) {
        detail::add_element_weights(pf, set, dofs[0], -1.0, 1.0);
    } else if (node == n) {
        detail::add_element_weights(pf, set, dofs[n - 1], 1.0, 1.0);
    } else if (space.continuity == Continuity::C0) {
        detail::add_element_weights(pf, set, dofs[node - 1], 1.0, 1.0);
    } else {
        detail::add_element_weights(pf, set, dofs[node - 1], 1.0, 0.5);
        detail::add_element_weights(pf, set, dofs[node], -1.0, 0.5);
    }
    return pf;
}

/// Value of a field at x for a full coefficient vector (see SemiDiscreteSystem::expand).
inline double evaluate_field(const SemiDiscreteSystem& sys, std::span<const double> full_alpha, double x,
                             Field field) {
    return point_functional(sys, x, field).apply(full_alpha);
}

/// One-sided value inside element e at master coordinate eta.
inline double evaluate_on_element(const SemiDiscreteSystem& sys, std::span<const double> full_alpha, std::size_t e,
                                  double eta, Field field) {
    const bool temperature = field == Field::Temperature;
    const ShapeSet set(temperature ? sys.dofmap.t_space.degree : sys.dofmap.q_space.degree);
    const auto& dofs = temperature ? sys.dofmap.t_dofs[e] : sys.dofmap.q_dofs[e];
    double s = 0.0;
    for (int k = 1; k <= set.count(); ++k) s += full_alpha[dofs[k - 1]] * set.value(k, eta);
    return s;
}

/// int over the domain of the field.
inline double field_integral(const SemiDiscreteSystem& sys, std::span<const double> full_alpha, Field field) {
    const bool temperature = field == Field::Temperature;
    const int degree = temperature ? sys.dofmap.t_space.degree : sys.dofmap.q_space.degree;
    const QuadratureRule rule = gauss_rule(degree + 1);
    double s = 0.0;
    for (std::size_t e = 0; e < sys.mesh.elements(); ++e) {
        const double J = sys.mesh.element(e).jacobian();
        for (std::size_t g = 0; g < rule.size(); ++g)
            s += rule.weights[g] * J * evaluate_on_element(sys, full_alpha, e, rule.points[g], field);
    }
    return s;
}

} // namespace hpheat

#endif // HPHEAT_FIELD_HPP
