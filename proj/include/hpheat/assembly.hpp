#ifndef HPHEAT_ASSEMBLY_HPP
#define HPHEAT_ASSEMBLY_HPP

// Global numbering, assembly and constraint elimination for the semi-discrete
// system A alpha' + B alpha = f(t) with
//
//   A = [ C 0 ]     B = [ 0  -Qt ]
//       [ 0 T ]         [ Q   K  ]
//
// The energy row is the weak balance int rho c_V T' u - int q u' = q(0) u(0) - q(l) u(l),
// i.e. the integrated-by-parts form with the natural flux terms on the right.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hpheat/banded.hpp"
#include "hpheat/basis.hpp"
#include "hpheat/dense.hpp"
#include "hpheat/elemmat.hpp"
#include "hpheat/errors.hpp"
#include "hpheat/model.hpp"
#include "hpheat/signal.hpp"

namespace hpheat {

inline constexpr std::size_t kNoDof = std::numeric_limits<std::size_t>::max();

struct Mesh {
    std::vector<double> nodes;

    static Mesh uniform(double length, std::size_t elements) {
        if (elements == 0) throw InputError("mesh needs at least one element");
        if (!(length > 0.0)) throw InputError("mesh length must be positive");
        Mesh m;
        m.nodes.resize(elements + 1);
        for (std::size_t i = 0; i <= elements; ++i)
            m.nodes[i] = length * static_cast<double>(i) / static_cast<double>(elements);
        m.nodes.back() = length;
        return m;
    }

    std::size_t elements() const noexcept { return nodes.empty() ? 0 : nodes.size() - 1; }
    double left() const { return nodes.front(); }
    double right() const { return nodes.back(); }
    double length() const { return right() - left(); }
    ElementMap element(std::size_t e) const { return {nodes[e], nodes[e + 1]}; }

    void validate() const {
        if (nodes.size() < 2) throw InputError("mesh needs at least one element");
        for (std::size_t i = 1; i < nodes.size(); ++i)
            if (!(nodes[i] > nodes[i - 1])) throw InputError("mesh nodes must be strictly increasing");
    }
};

enum class Field { Temperature, HeatFlux };
enum class Continuity { C0, Discontinuous };

struct SpaceSpec {
    Field field;
    Continuity continuity;
    int degree;
};

/// Approximation space of a field: T is C0 of degree p+1; q is discontinuous of
/// degree p for MCV/Fourier and C0 of degree p+1 for GK.
inline SpaceSpec space_for(ModelKind model, Field field, int p) {
    if (field == Field::Temperature) return {field, Continuity::C0, p + 1};
    if (model == ModelKind::GK) return {field, Continuity::C0, p + 1};
    return {field, Continuity::Discontinuous, p};
}

enum class BoundaryKind { DirichletT, NeumannQ };

/// How a prescribed flux enters the formulation. Auto picks the only valid
/// choice for the model: essential for GK (q in H1), natural otherwise.
enum class FluxImposition { Auto, Essential, Natural };

struct EndCondition {
    BoundaryKind kind = BoundaryKind::NeumannQ;
    BoundarySignal signal;
    FluxImposition imposition = FluxImposition::Auto;

    static EndCondition temperature(BoundarySignal s) { return {BoundaryKind::DirichletT, std::move(s)}; }
    static EndCondition flux(BoundarySignal s) { return {BoundaryKind::NeumannQ, std::move(s)}; }

    friend bool operator==(const EndCondition&, const EndCondition&) = default;
};

struct BoundarySpec {
    EndCondition left = EndCondition::flux(BoundarySignal::zero());
    EndCondition right = EndCondition::flux(BoundarySignal::zero());

    friend bool operator==(const BoundarySpec&, const BoundarySpec&) = default;
};

enum class End { Left, Right };

struct Constraint {
    std::size_t dof;  // full numbering
    Field field;
    End end;
    BoundarySignal signal;
};

struct DofMap {
    ModelKind model = ModelKind::Fourier;
    int p = 1;
    SpaceSpec t_space{Field::Temperature, Continuity::C0, 2};
    SpaceSpec q_space{Field::HeatFlux, Continuity::Discontinuous, 1};

    std::size_t full_size = 0;
    std::size_t total_dofs = 0;  // free coefficients after eliminating constraints
    std::size_t t_count = 0;
    std::size_t q_count = 0;

    /// Per element, full indices in local shape order (vertex 1, vertex 2, bubbles).
    std::vector<std::vector<std::size_t>> t_dofs;
    std::vector<std::vector<std::size_t>> q_dofs;

    std::vector<Field> field_of;          // by full index
    std::vector<std::size_t> free_index;  // full -> free, kNoDof when constrained
    std::vector<std::size_t> full_index;  // free -> full
    std::vector<Constraint> constraints;

    std::size_t elements() const noexcept { return t_dofs.size(); }

    /// Largest |i - j| over dofs sharing an element, in the full numbering.
    std::size_t half_bandwidth() const {
        std::size_t bw = 0;
        for (std::size_t e = 0; e < elements(); ++e) {
            std::size_t lo = kNoDof, hi = 0;
            for (auto d : t_dofs[e]) lo = std::min(lo, d), hi = std::max(hi, d);
            for (auto d : q_dofs[e]) lo = std::min(lo, d), hi = std::max(hi, d);
            bw = std::max(bw, hi - lo);
        }
        return bw;
    }
};

namespace detail {

inline bool flux_is_essential(ModelKind model, const EndCondition& c) {
    if (c.kind != BoundaryKind::NeumannQ) return false;
    if (model == ModelKind::GK) {
        if (c.imposition == FluxImposition::Natural)
            throw InputError("GK flux condition cannot be natural: q is in H1 and its natural datum is q'");
        return true;
    }
    if (c.imposition == FluxImposition::Essential)
        throw InputError(std::string(to_string(model)) + " flux condition cannot be essential: q is in L2");
    return false;
}

} // namespace detail

/// Element-interleaved numbering: vertex dofs of node i, then the interior dofs
/// of element i, then node i+1, ... The half-bandwidth is independent of n.
inline DofMap build_dofmap(const Mesh& mesh, ModelKind model, int p, const BoundarySpec& bcs) {
    mesh.validate();
    if (p < 1) throw InputError("polynomial degree p must be >= 1");
    if (p + 1 > kMaxDegree)
        throw InputError("polynomial degree p = " + std::to_string(p) + " exceeds the basis cap (p + 1 <= " +
                         std::to_string(kMaxDegree) + ")");

    DofMap map;
    map.model = model;
    map.p = p;
    map.t_space = space_for(model, Field::Temperature, p);
    map.q_space = space_for(model, Field::HeatFlux, p);

    const std::size_t n = mesh.elements();
    const bool q_c0 = map.q_space.continuity == Continuity::C0;
    const int t_bubbles = map.t_space.degree - 1;
    const int q_bubbles = map.q_space.degree - 1;

    std::vector<std::size_t> t_vertex(n + 1), q_vertex(n + 1, kNoDof);
    map.t_dofs.assign(n, {});
    map.q_dofs.assign(n, {});
    std::size_t next = 0;
    auto take = [&](Field f) {
        map.field_of.push_back(f);
        return next++;
    };
    auto number_vertex = [&](std::size_t v) {
        t_vertex[v] = take(Field::Temperature);
        if (q_c0) q_vertex[v] = take(Field::HeatFlux);
    };

    number_vertex(0);
    for (std::size_t e = 0; e < n; ++e) {
        std::vector<std::size_t> tb, qb, qall;
        for (int k = 0; k < t_bubbles; ++k) tb.push_back(take(Field::Temperature));
        if (q_c0) {
            for (int k = 0; k < q_bubbles; ++k) qb.push_back(take(Field::HeatFlux));
        } else {
            for (int k = 0; k < map.q_space.degree + 1; ++k) qall.push_back(take(Field::HeatFlux));
        }
        number_vertex(e + 1);

        auto& td = map.t_dofs[e];
        td = {t_vertex[e], t_vertex[e + 1]};
        td.insert(td.end(), tb.begin(), tb.end());
        auto& qd = map.q_dofs[e];
        if (q_c0) {
            qd = {q_vertex[e], q_vertex[e + 1]};
            qd.insert(qd.end(), qb.begin(), qb.end());
        } else {
            qd = std::move(qall);
        }
    }
    map.full_size = next;
    map.t_count = static_cast<std::size_t>(std::count(map.field_of.begin(), map.field_of.end(), Field::Temperature));
    map.q_count = map.full_size - map.t_count;

    auto constrain_end = [&](const EndCondition& c, End end) {
        const std::size_t v = end == End::Left ? 0 : n;
        if (c.kind == BoundaryKind::DirichletT) {
            map.constraints.push_back({t_vertex[v], Field::Temperature, end, c.signal});
        } else if (detail::flux_is_essential(model, c)) {
            map.constraints.push_back({q_vertex[v], Field::HeatFlux, end, c.signal});
        }
    };
    constrain_end(bcs.left, End::Left);
    constrain_end(bcs.right, End::Right);

    map.free_index.assign(map.full_size, 0);
    for (const auto& c : map.constraints) map.free_index[c.dof] = kNoDof;
    for (std::size_t i = 0; i < map.full_size; ++i) {
        if (map.free_index[i] == kNoDof) continue;
        map.free_index[i] = map.full_index.size();
        map.full_index.push_back(i);
    }
    map.total_dofs = map.full_index.size();
    return map;
}

/// One boundary datum's contribution to the free-dof load:
///   f(t) += signal(t) * value_coeff + signal'(t) * rate_coeff.
struct LoadTerm {
    BoundarySignal signal;
    std::vector<double> value_coeff;
    std::vector<double> rate_coeff;
};

struct SemiDiscreteSystem {
    Mesh mesh;
    MaterialParams material;
    ModelKind model = ModelKind::Fourier;
    int p = 1;
    BoundarySpec bcs;
    DofMap dofmap;

    BandedMatrix A_full;  // before elimination, full numbering
    BandedMatrix B_full;
    BandedMatrix A;  // free rows and columns
    BandedMatrix B;
    std::vector<LoadTerm> loads;
    /// Per constraint (same order as dofmap.constraints), full coefficients of
    /// the function lifting its boundary datum into the interior.
    std::vector<std::vector<double>> lifts;

    std::size_t size() const noexcept { return dofmap.total_dofs; }

    std::vector<double> load(double t) const {
        std::vector<double> f(size(), 0.0);
        for (const auto& term : loads) {
            const double g = term.signal.value(t), dg = term.signal.rate(t);
            for (std::size_t i = 0; i < f.size(); ++i) f[i] += g * term.value_coeff[i] + dg * term.rate_coeff[i];
        }
        return f;
    }

    /// int_{t0}^{t1} f(t) dt, exact for every supported signal.
    void load_integral(double t0, double t1, std::span<double> out) const {
        std::fill(out.begin(), out.end(), 0.0);
        for (const auto& term : loads) {
            const double ig = term.signal.integral(t1) - term.signal.integral(t0);
            const double dg = term.signal.value(t1) - term.signal.value(t0);
            for (std::size_t i = 0; i < out.size(); ++i) out[i] += ig * term.value_coeff[i] + dg * term.rate_coeff[i];
        }
    }

    /// Full coefficient vector at time t: free values plus the lifted boundary data.
    void expand(std::span<const double> free, double t, std::span<double> full) const {
        std::fill(full.begin(), full.end(), 0.0);
        for (std::size_t k = 0; k < dofmap.full_index.size(); ++k) full[dofmap.full_index[k]] = free[k];
        for (std::size_t c = 0; c < lifts.size(); ++c) {
            const double g = dofmap.constraints[c].signal.value(t);
            if (g == 0.0) continue;
            for (std::size_t i = 0; i < full.size(); ++i) full[i] += g * lifts[c][i];
        }
    }

    std::vector<double> expand(std::span<const double> free, double t) const {
        std::vector<double> full(dofmap.full_size);
        expand(free, t, full);
        return full;
    }

    /// Inverse of expand for a full vector that honours the constraints at time t.
    std::vector<double> restrict_to_free(std::span<const double> full, double t) const {
        std::vector<double> free(size());
        for (std::size_t k = 0; k < free.size(); ++k) {
            const std::size_t i = dofmap.full_index[k];
            double v = full[i];
            for (std::size_t c = 0; c < lifts.size(); ++c) v -= dofmap.constraints[c].signal.value(t) * lifts[c][i];
            free[k] = v;
        }
        return free;
    }
};

namespace detail {

inline void scatter(BandedMatrix& m, const DenseMatrix& block, const std::vector<std::size_t>& rows,
                    const std::vector<std::size_t>& cols, double sign = 1.0) {
    for (std::size_t i = 0; i < block.rows(); ++i)
        for (std::size_t j = 0; j < block.cols(); ++j)
            if (block(i, j) != 0.0) m.add(rows[i], cols[j], sign * block(i, j));
}

} // namespace detail

inline SemiDiscreteSystem assemble(const Mesh& mesh, const MaterialParams& mat, ModelKind model, int p,
                                   const BoundarySpec& bcs) {
    validate(mat, model);
    SemiDiscreteSystem sys;
    sys.mesh = mesh;
    sys.material = mat;
    sys.model = model;
    sys.p = p;
    sys.bcs = bcs;
    sys.dofmap = build_dofmap(mesh, model, p, bcs);
    const DofMap& dm = sys.dofmap;

    const std::size_t bw = dm.half_bandwidth();
    sys.A_full = BandedMatrix(dm.full_size, bw, bw);
    sys.B_full = BandedMatrix(dm.full_size, bw, bw);
    const int degT = dm.t_space.degree, degQ = dm.q_space.degree;
    for (std::size_t e = 0; e < mesh.elements(); ++e) {
        const ElementMap map = mesh.element(e);
        const auto& td = dm.t_dofs[e];
        const auto& qd = dm.q_dofs[e];
        detail::scatter(sys.A_full, element_C(map, mat, degT), td, td);
        detail::scatter(sys.A_full, element_T(map, mat, degQ), qd, qd);
        detail::scatter(sys.B_full, element_Qt(map, mat, degT, degQ), td, qd, -1.0);
        detail::scatter(sys.B_full, element_Q(map, mat, degT, degQ), qd, td);
        detail::scatter(sys.B_full, element_K(map, mat, degQ, model), qd, qd);
    }

    // Eliminate constrained rows/columns. Dropping indices never widens the band.
    const std::size_t nf = dm.total_dofs;
    sys.A = BandedMatrix(nf, bw, bw);
    sys.B = BandedMatrix(nf, bw, bw);
    for (std::size_t fi = 0; fi < nf; ++fi) {
        const std::size_t i = dm.full_index[fi];
        const std::size_t j0 = i > bw ? i - bw : 0;
        const std::size_t j1 = std::min(dm.full_size - 1, i + bw);
        for (std::size_t j = j0; j <= j1; ++j) {
            const std::size_t fj = dm.free_index[j];
            if (fj == kNoDof) continue;
            if (double a = sys.A_full(i, j); a != 0.0) sys.A.at(fi, fj) = a;
            if (double b = sys.B_full(i, j); b != 0.0) sys.B.at(fi, fj) = b;
        }
    }

    // Essential data g(t) is lifted by the linear function that is 1 at its own
    // end and 0 at the other. The lift lies in every space and does not depend
    // on the mesh, so with exactly averaged loads the discrete solution does
    // not depend on the size of the boundary element either. The free part
    // then carries the load -(A G) g' - (B G) g next to the natural flux terms.
    const double x0 = mesh.left(), len = mesh.length();
    for (const auto& c : dm.constraints) {
        std::vector<double> lift(dm.full_size, 0.0);
        const auto& field_dofs = c.field == Field::Temperature ? dm.t_dofs : dm.q_dofs;
        for (std::size_t e = 0; e < mesh.elements(); ++e) {
            for (int v = 0; v < 2; ++v) {
                const double xi = (mesh.nodes[e + v] - x0) / len;
                lift[field_dofs[e][v]] = c.end == End::Left ? 1.0 - xi : xi;
            }
        }
        sys.lifts.push_back(std::move(lift));
    }

    auto end_term = [&](const EndCondition& cond, End end) {
        LoadTerm term{cond.signal, std::vector<double>(nf, 0.0), std::vector<double>(nf, 0.0)};
        const std::size_t v_elem = end == End::Left ? 0 : mesh.elements() - 1;
        const std::size_t t_vertex = dm.t_dofs[v_elem][end == End::Left ? 0 : 1];
        if (cond.kind == BoundaryKind::NeumannQ) {
            const std::size_t fi = dm.free_index[t_vertex];
            if (fi != kNoDof) term.value_coeff[fi] += end == End::Left ? 1.0 : -1.0;
        }
        for (std::size_t c = 0; c < dm.constraints.size(); ++c) {
            if (dm.constraints[c].end != end) continue;
            const auto BG = sys.B_full * std::span<const double>(sys.lifts[c]);
            const auto AG = sys.A_full * std::span<const double>(sys.lifts[c]);
            for (std::size_t fi = 0; fi < nf; ++fi) {
                term.value_coeff[fi] -= BG[dm.full_index[fi]];
                term.rate_coeff[fi] -= AG[dm.full_index[fi]];
            }
        }
        if (!cond.signal.is_zero()) sys.loads.push_back(std::move(term));
    };
    end_term(bcs.left, End::Left);
    end_term(bcs.right, End::Right);

    if (nf == 0) throw NumericalError("assembled system has no free degrees of freedom");
    return sys;
}

namespace detail {

/// Coefficients of one element's shape set reproducing f: endpoint values for
/// the vertex functions, L2 projection of the remainder onto the bubbles.
inline std::vector<double> project_on_element(const ElementMap& map, int degree,
                                              const std::function<double(double)>& f) {
    const ShapeSet set(degree);
    std::vector<double> c(set.count(), 0.0);
    c[0] = f(map.x_left);
    c[1] = f(map.x_right);
    const int nb = set.count() - 2;
    if (nb == 0) return c;
    const QuadratureRule rule = gauss_rule(degree + 12);
    DenseMatrix m(nb, nb);
    std::vector<double> rhs(nb, 0.0);
    for (std::size_t g = 0; g < rule.size(); ++g) {
        const double eta = rule.points[g], w = rule.weights[g];
        const double r = f(map.to_physical(eta)) - c[0] * set.value(1, eta) - c[1] * set.value(2, eta);
        for (int a = 0; a < nb; ++a) {
            const double na = set.value(a + 3, eta);
            rhs[a] += w * r * na;
            for (int b = 0; b < nb; ++b) m(a, b) += w * na * set.value(b + 3, eta);
        }
    }
    // Cholesky solve of the (SPD) bubble mass matrix.
    for (int k = 0; k < nb; ++k) {
        double d = m(k, k);
        for (int s = 0; s < k; ++s) d -= m(k, s) * m(k, s);
        m(k, k) = std::sqrt(d);
        for (int i = k + 1; i < nb; ++i) {
            double v = m(i, k);
            for (int s = 0; s < k; ++s) v -= m(i, s) * m(k, s);
            m(i, k) = v / m(k, k);
        }
    }
    for (int i = 0; i < nb; ++i) {
        double v = rhs[i];
        for (int s = 0; s < i; ++s) v -= m(i, s) * rhs[s];
        rhs[i] = v / m(i, i);
    }
    for (int i = nb - 1; i >= 0; --i) {
        double v = rhs[i];
        for (int s = i + 1; s < nb; ++s) v -= m(s, i) * rhs[s];
        rhs[i] = v / m(i, i);
    }
    for (int a = 0; a < nb; ++a) c[a + 2] = rhs[a];
    return c;
}

} // namespace detail

/// alpha(0) on the free dofs. Vertex coefficients take point values of T0/q0;
/// bubbles the element-wise L2 projection of what the vertex interpolant misses.
inline std::vector<double> apply_initial_conditions(const SemiDiscreteSystem& sys,
                                                    const std::function<double(double)>& T0,
                                                    const std::function<double(double)>& q0) {
    const DofMap& dm = sys.dofmap;
    std::vector<double> full(dm.full_size, 0.0);
    for (std::size_t e = 0; e < sys.mesh.elements(); ++e) {
        const ElementMap map = sys.mesh.element(e);
        const auto ct = detail::project_on_element(map, dm.t_space.degree, T0);
        for (std::size_t k = 0; k < ct.size(); ++k) full[dm.t_dofs[e][k]] = ct[k];
        const auto cq = detail::project_on_element(map, dm.q_space.degree, q0);
        for (std::size_t k = 0; k < cq.size(); ++k) full[dm.q_dofs[e][k]] = cq[k];
    }
    for (const auto& c : dm.constraints) full[c.dof] = c.signal.value(0.0);
    return sys.restrict_to_free(full, 0.0);
}

} // namespace hpheat

#endif // HPHEAT_ASSEMBLY_HPP
