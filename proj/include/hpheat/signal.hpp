#ifndef HPHEAT_SIGNAL_HPP
#define HPHEAT_SIGNAL_HPP

#include <cmath>
#include <stdexcept>
#include <variant>

namespace hpheat {

/// Double-exponential heat pulse
///   q(t) = A c1 c2 / (c2 - c1) [exp(-c1 t / t_p) - exp(-c2 t / t_p)],
/// whose total time integral is A t_p.
struct PulseParams {
    double amplitude = 10000.0;  // W/m^2
    double c1 = 1.0 / 0.075;
    double c2 = 6.0;
    double t_p = 0.008;  // s

    void validate() const {
        if (c1 == c2) throw std::invalid_argument("pulse: c1 and c2 must differ");
        if (!(t_p > 0.0)) throw std::invalid_argument("pulse: t_p must be positive");
        if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("pulse: rate constants must be positive");
    }

    double prefactor() const noexcept { return amplitude * c1 * c2 / (c2 - c1); }

    /// Exact integral over [0, infinity).
    double total() const noexcept { return amplitude * t_p; }

    friend bool operator==(const PulseParams&, const PulseParams&) = default;
};

inline double pulse_flux(const PulseParams& p, double t) {
    return p.prefactor() * (std::exp(-p.c1 * t / p.t_p) - std::exp(-p.c2 * t / p.t_p));
}

inline double pulse_flux_rate(const PulseParams& p, double t) {
    return p.prefactor() / p.t_p * (-p.c1 * std::exp(-p.c1 * t / p.t_p) + p.c2 * std::exp(-p.c2 * t / p.t_p));
}

/// int_0^t q(s) ds in closed form.
inline double pulse_flux_integral(const PulseParams& p, double t) {
    const double a = -std::expm1(-p.c1 * t / p.t_p) / p.c1;
    const double b = -std::expm1(-p.c2 * t / p.t_p) / p.c2;
    return p.prefactor() * p.t_p * (a - b);
}

namespace detail {
template <class... Fs>
struct Overload : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;
} // namespace detail

/// Time dependence of a boundary datum. Each alternative knows its value, its
/// rate of change and its running integral from t = 0.
class BoundarySignal {
public:
    struct Zero {
        friend bool operator==(const Zero&, const Zero&) = default;
    };
    struct Constant {
        double value = 0.0;
        friend bool operator==(const Constant&, const Constant&) = default;
    };
    struct Pulse {
        PulseParams params;
        friend bool operator==(const Pulse&, const Pulse&) = default;
    };

    BoundarySignal() = default;
    BoundarySignal(Zero z) : v_(z) {}
    BoundarySignal(Constant c) : v_(c) {}
    BoundarySignal(Pulse p) : v_(p) {}

    static BoundarySignal zero() { return Zero{}; }
    static BoundarySignal constant(double v) { return Constant{v}; }
    static BoundarySignal pulse(const PulseParams& p) { return Pulse{p}; }

    bool is_zero() const noexcept { return std::holds_alternative<Zero>(v_); }

    double value(double t) const {
        return std::visit(detail::Overload{[](Zero) { return 0.0; }, [](const Constant& c) { return c.value; },
                                   [t](const Pulse& p) { return pulse_flux(p.params, t); }},
                          v_);
    }

    double rate(double t) const {
        return std::visit(detail::Overload{[](Zero) { return 0.0; }, [](const Constant&) { return 0.0; },
                                   [t](const Pulse& p) { return pulse_flux_rate(p.params, t); }},
                          v_);
    }

    double integral(double t) const {
        return std::visit(detail::Overload{[](Zero) { return 0.0; }, [t](const Constant& c) { return c.value * t; },
                                   [t](const Pulse& p) { return pulse_flux_integral(p.params, t); }},
                          v_);
    }

    const std::variant<Zero, Constant, Pulse>& get() const noexcept { return v_; }

    friend bool operator==(const BoundarySignal&, const BoundarySignal&) = default;

private:
    std::variant<Zero, Constant, Pulse> v_{Zero{}};
};

} // namespace hpheat

#endif // HPHEAT_SIGNAL_HPP
