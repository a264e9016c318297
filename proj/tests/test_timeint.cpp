#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "hpheat/timeint.hpp"

using namespace hpheat;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const MaterialParams kGK{2600.0, 800.0, 3.0, 0.3, 8e-6};
const MaterialParams kMCV{2600.0, 800.0, 3.0, 0.3, 0.0};
const MaterialParams kFourier{2600.0, 800.0, 3.0, 0.0, 0.0};

BoundarySpec pulse_left() {
    BoundarySpec b;
    b.left = EndCondition::flux(BoundarySignal::pulse({}));
    return b;
}

std::vector<double> uniform_state(const SemiDiscreteSystem& sys, double T0) {
    return apply_initial_conditions(sys, [T0](double) { return T0; }, [](double) { return 0.0; });
}

double heat_content(const SemiDiscreteSystem& sys, std::span<const double> free, double t) {
    const auto full = sys.expand(free, t);
    return sys.material.heat_capacity() * field_integral(sys, full, Field::Temperature);
}

} // namespace

TEST_CASE("banded LU solves random diagonally dominant systems") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t n = 40, kl = 3, ku = 5;
    BandedMatrix m(n, kl, ku);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = (i > kl ? i - kl : 0); j <= std::min(n - 1, i + ku); ++j) m.at(i, j) = u(rng);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) += 10.0;
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    const auto b = m * std::span<const double>(x);
    const auto y = BandedLU(m).solve(b);
    for (std::size_t i = 0; i < n; ++i) CHECK_THAT(y[i], WithinAbs(x[i], 1e-13));
}

TEST_CASE("vanishing pivots are reported with their row") {
    BandedMatrix m(3, 1, 1);
    m.at(0, 0) = 1.0;
    m.at(0, 1) = 1.0;
    m.at(1, 0) = 1.0;
    m.at(1, 1) = 1.0;
    m.at(2, 2) = 1.0;
    try {
        BandedLU lu(m);
        FAIL("expected a NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.pivot() == 1);
    }
    CHECK_THROWS_AS(BandedLU(BandedMatrix(2, 1, 1)), NumericalError);
}

TEST_CASE("theta scheme parameters are validated") {
    CHECK_THROWS_AS((ThetaScheme{0.4, 1e-3, 10}.validate()), InputError);
    CHECK_THROWS_AS((ThetaScheme{1.1, 1e-3, 10}.validate()), InputError);
    CHECK_THROWS_AS((ThetaScheme{0.5, 0.0, 10}.validate()), InputError);
    CHECK_THROWS_AS((ThetaScheme{0.5, 1e-3, -1}.validate()), InputError);
    CHECK_NOTHROW((ThetaScheme{1.0, 1e-3, 0}.validate()));
}

TEST_CASE("integrate samples every instant and keeps the initial state") {
    const auto sys = assemble(Mesh::uniform(0.005, 4), kMCV, ModelKind::MCV, 2, pulse_left());
    const auto a0 = uniform_state(sys, 293.0);
    const ThetaScheme scheme{0.5, 1e-3, 25};
    const auto sol = integrate(sys, scheme, a0, {{"front", Field::Temperature, 0.0}}, {true});
    REQUIRE(sol.times.size() == 26);
    REQUIRE(sol.history.size() == 26);
    CHECK(sol.probes.at(0).values.front() == 293.0);
    CHECK_THAT(sol.times.back(), WithinRel(0.025, 1e-14));

    const BandedFactorization fact(sys, scheme);
    const auto one = step(sys, scheme, fact, a0, 0.0);
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i] == sol.history[1][i]);
    CHECK_THROWS_AS(integrate(sys, scheme, std::vector<double>(3), {}), InputError);
}

TEST_CASE("energy input is conserved exactly by every model and theta") {
    const PulseParams pulse{};
    for (ModelKind model : {ModelKind::Fourier, ModelKind::MCV, ModelKind::GK})
        for (double theta : {0.5, 0.75, 1.0}) {
            const MaterialParams& mat = model == ModelKind::GK ? kGK : model == ModelKind::MCV ? kMCV : kFourier;
            const auto sys = assemble(Mesh::uniform(0.005, 10), mat, model, 3, pulse_left());
            // Starting from zero keeps the balance free of cancellation against T0.
            const auto a0 = uniform_state(sys, 0.0);
            const ThetaScheme scheme{theta, 1e-3, 300};
            const auto sol = integrate(sys, scheme, a0, {});
            const double gained = heat_content(sys, sol.final_state, 0.3) - heat_content(sys, a0, 0.0);
            CHECK_THAT(gained, WithinRel(pulse_flux_integral(pulse, 0.3), 1e-10));
        }
}

TEST_CASE("Crank-Nicolson is second order and backward Euler first order in time") {
    // A smooth initial profile relaxing under adiabatic ends, for every model.
    for (ModelKind model : {ModelKind::Fourier, ModelKind::MCV, ModelKind::GK}) {
        const MaterialParams& mat = model == ModelKind::GK ? kGK : model == ModelKind::MCV ? kMCV : kFourier;
        const auto sys = assemble(Mesh::uniform(0.005, 6), mat, model, 3, {});
        const auto a0 = apply_initial_conditions(
            sys, [](double x) { return std::cos(std::numbers::pi * x / 0.005); }, [](double) { return 0.0; });
        const std::vector<Probe> probe{{"front", Field::Temperature, 0.0}};
        auto front = [&](double theta, int refine) {
            const ThetaScheme s{theta, 0.05 / refine, 20 * refine};
            return integrate(sys, s, a0, probe).probes[0].values.back();
        };
        for (auto [theta, order] : {std::pair{0.5, 2.0}, std::pair{1.0, 1.0}}) {
            const double e1 = front(theta, 1) - front(theta, 2);
            const double e2 = front(theta, 2) - front(theta, 4);
            CHECK_THAT(std::log2(e1 / e2), WithinAbs(order, 0.05));
        }
    }
}

TEST_CASE("point and averaged load quadratures agree as dt shrinks") {
    const auto sys = assemble(Mesh::uniform(0.005, 5), kMCV, ModelKind::MCV, 2, pulse_left());
    const auto a0 = uniform_state(sys, 293.0);
    const std::vector<Probe> probe{{"front", Field::Temperature, 0.0}};
    auto diff = [&](double dt) {
        const int n = static_cast<int>(std::lround(0.05 / dt));
        const auto avg = integrate(sys, {0.5, dt, n, LoadQuadrature::StepAverage}, a0, probe).probes[0].values.back();
        const auto pt = integrate(sys, {0.5, dt, n, LoadQuadrature::PointTheta}, a0, probe).probes[0].values.back();
        return std::abs(avg - pt);
    };
    const double d1 = diff(1e-3), d2 = diff(2.5e-4);
    CHECK(d2 < d1 / 8.0);
}

TEST_CASE("zero data leaves the equilibrium untouched") {
    for (ModelKind model : {ModelKind::Fourier, ModelKind::MCV, ModelKind::GK}) {
        const MaterialParams& mat = model == ModelKind::GK ? kGK : model == ModelKind::MCV ? kMCV : kFourier;
        const auto sys = assemble(Mesh::uniform(0.005, 8), mat, model, 4, {});
        const auto a0 = uniform_state(sys, 293.0);
        const auto sol = integrate(sys, {0.5, 1e-3, 200}, a0,
                                   {{"T", Field::Temperature, 0.002}, {"q", Field::HeatFlux, 0.0025}});
        for (double v : sol.probes[0].values) CHECK_THAT(v, WithinAbs(293.0, 1e-10 * 293.0));
        const double flux_scale = mat.lambda * 293.0 / 0.005;
        for (double v : sol.probes[1].values) CHECK(std::abs(v) <= 1e-10 * flux_scale);
    }
}
