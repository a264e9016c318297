#ifndef HPHEAT_SCENARIO_HPP
#define HPHEAT_SCENARIO_HPP

// Benchmark setup: a rock-like slab of length l, initially at rest at T0,
// heated by a short flux pulse at x = 0 with an adiabatic rear face.

#include <cmath>
#include <string>
#include <vector>

#include "hpheat/assembly.hpp"
#include "hpheat/errors.hpp"
#include "hpheat/field.hpp"
#include "hpheat/model.hpp"
#include "hpheat/signal.hpp"
#include "hpheat/timeint.hpp"

namespace hpheat {

/// Conductivity used when a caller asks for the default; not a measured value.
inline constexpr double kDefaultConductivity = 3.0;  // W/(m K)

namespace paper {
inline constexpr double length = 0.005;        // m
inline constexpr double density = 2600.0;      // kg/m^3
inline constexpr double specific_heat = 800.0; // J/(kg K)
inline constexpr double initial_temperature = 293.0;  // K
inline constexpr double time_step = 1e-3;      // s
inline constexpr int steps = 10000;
inline constexpr double taus[] = {0.3, 0.15, 0.05};        // s
inline constexpr double kappa2_small = 8e-6;               // m^2
inline constexpr double kappa2_large = 0.8;                // m^2
} // namespace paper

struct Scenario {
    ModelKind model = ModelKind::GK;
    MaterialParams material;
    double length = paper::length;
    double T0 = paper::initial_temperature;
    BoundarySpec bcs;
    double dt = paper::time_step;
    int n_steps = paper::steps;
    double theta = 0.5;
    LoadQuadrature load = LoadQuadrature::StepAverage;
    std::size_t elements = 100;
    int p = 10;
    std::vector<Probe> probes;

    ThetaScheme scheme() const { return {theta, dt, n_steps, load}; }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// front: T(t, 0), rear: T(t, l), mid: q(t, l/2).
inline std::vector<Probe> standard_probes(double length) {
    return {{"front", Field::Temperature, 0.0}, {"rear", Field::Temperature, length}, {"mid", Field::HeatFlux, 0.5 * length}};
}

/// The pulse-heated slab with the given constitutive parameters.
inline Scenario paper_scenario(ModelKind model, double tau, double kappa2, double lambda = kDefaultConductivity,
                               const PulseParams& pulse = {}) {
    Scenario s;
    s.model = model;
    s.material = {paper::density, paper::specific_heat, lambda, model == ModelKind::Fourier ? 0.0 : tau,
                  model == ModelKind::GK ? kappa2 : 0.0};
    s.bcs.left = EndCondition::flux(BoundarySignal::pulse(pulse));
    s.bcs.right = EndCondition::flux(BoundarySignal::zero());
    s.probes = standard_probes(s.length);
    return s;
}

inline SemiDiscreteSystem make_system(const Scenario& s) {
    return assemble(Mesh::uniform(s.length, s.elements), s.material, s.model, s.p, s.bcs);
}

inline std::vector<double> initial_state(const SemiDiscreteSystem& sys, const Scenario& s) {
    const double T0 = s.T0;
    return apply_initial_conditions(sys, [T0](double) { return T0; }, [](double) { return 0.0; });
}

inline TransientSolution simulate(const Scenario& s, IntegrateOptions opts = {}) {
    const SemiDiscreteSystem sys = make_system(s);
    const auto alpha0 = initial_state(sys, s);
    return integrate(sys, s.scheme(), alpha0, s.probes, opts);
}

namespace detail {
inline double signal_total(const BoundarySignal& s) {
    if (s.is_zero()) return 0.0;
    if (auto* p = std::get_if<BoundarySignal::Pulse>(&s.get())) return p->params.total();
    throw InputError("net energy input is unbounded for a non-decaying flux signal");
}
} // namespace detail

/// Adiabatic steady-state rise (int q0 dt - int ql dt) / (rho c_V l).
inline double steady_state_rise(const Scenario& s) {
    if (s.bcs.left.kind != BoundaryKind::NeumannQ || s.bcs.right.kind != BoundaryKind::NeumannQ)
        throw InputError("steady-state rise needs flux conditions at both ends");
    const double energy = detail::signal_total(s.bcs.left.signal) - detail::signal_total(s.bcs.right.signal);
    const double rise = energy / (s.material.heat_capacity() * s.length);
    if (rise == 0.0) throw InputError("no net energy input: dimensionless temperature undefined");
    return rise;
}

/// (T - T0) / dT_ss, so the adiabatic end state reads 1.
inline ProbeSeries dimensionless_temperature(const ProbeSeries& series, const Scenario& s) {
    if (series.quantity != Field::Temperature) throw InputError("dimensionless rescaling needs a temperature probe");
    const double rise = steady_state_rise(s);
    ProbeSeries out = series;
    for (double& v : out.values) v = (v - s.T0) / rise;
    return out;
}

/// l sqrt(rho c_V tau / lambda): travel time of an MCV wave front across the slab.
inline double wavefront_arrival_estimate(const Scenario& s) {
    if (s.model == ModelKind::Fourier) throw InputError("Fourier heat conduction has no finite wave speed");
    if (s.model != ModelKind::MCV) throw InputError("wavefront estimate is defined for the MCV model");
    if (!(s.material.tau > 0.0)) throw InputError("wavefront estimate needs tau > 0");
    return s.length * std::sqrt(s.material.heat_capacity() * s.material.tau / s.material.lambda);
}

} // namespace hpheat

#endif // HPHEAT_SCENARIO_HPP
