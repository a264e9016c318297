#ifndef HPHEAT_TIMEINT_HPP
#define HPHEAT_TIMEINT_HPP

// theta-method for A alpha' + B alpha = f:
//   (A + dt theta B) alpha_{n+1} = (A - dt (1 - theta) B) alpha_n + dt fbar_n
// The left-hand matrix is factored once per (system, dt, theta).

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hpheat/assembly.hpp"
#include "hpheat/banded.hpp"
#include "hpheat/errors.hpp"
#include "hpheat/field.hpp"

namespace hpheat {

/// How the load enters one step.
///   StepAverage: fbar = (1/dt) int_{t_n}^{t_{n+1}} f dt, evaluated in closed form.
///   PointTheta:  fbar = theta f(t_{n+1}) + (1 - theta) f(t_n).
enum class LoadQuadrature { StepAverage, PointTheta };

struct ThetaScheme {
    double theta = 0.5;
    double dt = 1e-3;
    int n_steps = 0;
    LoadQuadrature load = LoadQuadrature::StepAverage;

    void validate() const {
        if (!(theta >= 0.5 && theta <= 1.0)) throw InputError("theta must lie in [1/2, 1]");
        if (!(dt > 0.0)) throw InputError("time step must be positive");
        if (n_steps < 0) throw InputError("number of steps must be non-negative");
    }

    double final_time() const noexcept { return dt * n_steps; }
};

/// Factors of A + dt theta B together with the explicit-side matrix.
class BandedFactorization {
public:
    BandedFactorization(const SemiDiscreteSystem& sys, const ThetaScheme& scheme)
        : dt_(scheme.dt),
          theta_(scheme.theta),
          lu_((scheme.validate(), BandedMatrix::combine(1.0, sys.A, scheme.dt * scheme.theta, sys.B))),
          rhs_(BandedMatrix::combine(1.0, sys.A, -scheme.dt * (1.0 - scheme.theta), sys.B)) {}

    std::size_t dimension() const noexcept { return lu_.size(); }
    std::size_t half_bandwidth() const noexcept { return lu_.half_bandwidth(); }
    double dt() const noexcept { return dt_; }
    double theta() const noexcept { return theta_; }

    bool matches(const ThetaScheme& s) const noexcept { return s.dt == dt_ && s.theta == theta_; }

    const BandedLU& lu() const noexcept { return lu_; }
    const BandedMatrix& explicit_matrix() const noexcept { return rhs_; }

private:
    double dt_;
    double theta_;
    BandedLU lu_;
    BandedMatrix rhs_;
};

namespace detail {

/// Reusable buffers for repeated steps.
class Stepper {
public:
    Stepper(const SemiDiscreteSystem& sys, const ThetaScheme& scheme, const BandedFactorization& fact)
        : sys_(sys), scheme_(scheme), fact_(fact), load_(sys.size()), tmp_(sys.size()) {
        if (!fact.matches(scheme) || fact.dimension() != sys.size())
            throw InputError("factorization does not belong to this system and scheme");
    }

    void advance(std::span<double> alpha, double t_n) {
        const double dt = scheme_.dt;
        const double t_np1 = t_n + dt;
        fact_.explicit_matrix().multiply(alpha, tmp_);
        if (scheme_.load == LoadQuadrature::StepAverage) {
            sys_.load_integral(t_n, t_np1, load_);
            for (std::size_t i = 0; i < tmp_.size(); ++i) tmp_[i] += load_[i];
        } else if (!sys_.loads.empty()) {
            const auto f0 = sys_.load(t_n);
            const auto f1 = sys_.load(t_np1);
            const double th = scheme_.theta;
            for (std::size_t i = 0; i < tmp_.size(); ++i) tmp_[i] += dt * (th * f1[i] + (1.0 - th) * f0[i]);
        }
        fact_.lu().solve_in_place(tmp_);
        std::copy(tmp_.begin(), tmp_.end(), alpha.begin());
    }

private:
    const SemiDiscreteSystem& sys_;
    ThetaScheme scheme_;
    const BandedFactorization& fact_;
    std::vector<double> load_;
    std::vector<double> tmp_;
};

} // namespace detail

/// One theta step from t_n to t_n + dt.
inline std::vector<double> step(const SemiDiscreteSystem& sys, const ThetaScheme& scheme,
                                const BandedFactorization& fact, std::span<const double> alpha_n, double t_n) {
    std::vector<double> alpha(alpha_n.begin(), alpha_n.end());
    detail::Stepper(sys, scheme, fact).advance(alpha, t_n);
    return alpha;
}

struct Probe {
    std::string name;
    Field field = Field::Temperature;
    double x = 0.0;

    friend bool operator==(const Probe&, const Probe&) = default;
};

/// Time history of one field value at a fixed point.
struct ProbeSeries {
    std::string name;
    Field quantity = Field::Temperature;
    double location = 0.0;
    std::vector<double> values;
};

struct TransientSolution {
    std::vector<double> times;
    std::vector<ProbeSeries> probes;
    std::vector<double> final_state;                // free dofs at the last instant
    std::vector<std::vector<double>> history;       // free dofs per instant, when requested

    const ProbeSeries& probe(const std::string& name) const {
        for (const auto& p : probes)
            if (p.name == name) return p;
        throw std::out_of_range("no probe named " + name);
    }
};

struct IntegrateOptions {
    bool record_history = false;
};

/// Factor once, then n_steps back substitutions, sampling the probes at every instant.
inline TransientSolution integrate(const SemiDiscreteSystem& sys, const ThetaScheme& scheme,
                                   std::span<const double> alpha0, const std::vector<Probe>& probes,
                                   IntegrateOptions opts = {}) {
    scheme.validate();
    if (alpha0.size() != sys.size()) throw InputError("initial state has the wrong dimension");

    std::vector<PointFunctional> functionals;
    TransientSolution sol;
    for (const auto& p : probes) {
        functionals.push_back(point_functional(sys, p.x, p.field));
        sol.probes.push_back({p.name, p.field, p.x, {}});
        sol.probes.back().values.reserve(static_cast<std::size_t>(scheme.n_steps) + 1);
    }
    sol.times.reserve(static_cast<std::size_t>(scheme.n_steps) + 1);

    std::vector<double> alpha(alpha0.begin(), alpha0.end());
    std::vector<double> full(sys.dofmap.full_size);
    auto record = [&](double t) {
        sol.times.push_back(t);
        sys.expand(alpha, t, full);
        for (std::size_t k = 0; k < functionals.size(); ++k) sol.probes[k].values.push_back(functionals[k].apply(full));
        if (opts.record_history) sol.history.push_back(alpha);
    };

    record(0.0);
    if (scheme.n_steps > 0) {
        const BandedFactorization fact(sys, scheme);
        detail::Stepper stepper(sys, scheme, fact);
        for (int n = 0; n < scheme.n_steps; ++n) {
            stepper.advance(alpha, n * scheme.dt);
            record((n + 1) * scheme.dt);
        }
    }
    sol.final_state = std::move(alpha);
    return sol;
}

} // namespace hpheat

#endif // HPHEAT_TIMEINT_HPP
