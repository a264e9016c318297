#ifndef HPHEAT_MODEL_HPP
#define HPHEAT_MODEL_HPP

#include <optional>
#include <string>
#include <string_view>

#include "hpheat/errors.hpp"

namespace hpheat {

/// Constitutive law closing the energy balance rho c_V dT/dt + q' = 0:
///   Fourier: q = -lambda T'
///   MCV:     tau dq/dt + q + lambda T' = 0
///   GK:      tau dq/dt + q + lambda T' - kappa^2 q'' = 0
enum class ModelKind { Fourier, MCV, GK };

inline std::string_view to_string(ModelKind m) {
    switch (m) {
    case ModelKind::Fourier: return "Fourier";
    case ModelKind::MCV: return "MCV";
    case ModelKind::GK: return "GK";
    }
    return "?";
}

inline std::optional<ModelKind> parse_model(std::string_view s) {
    if (s == "Fourier" || s == "fourier") return ModelKind::Fourier;
    if (s == "MCV" || s == "mcv") return ModelKind::MCV;
    if (s == "GK" || s == "gk") return ModelKind::GK;
    return std::nullopt;
}

struct MaterialParams {
    double rho = 0.0;     // kg/m^3
    double c_V = 0.0;     // J/(kg K)
    double lambda = 0.0;  // W/(m K)
    double tau = 0.0;     // s
    double kappa2 = 0.0;  // m^2

    double heat_capacity() const noexcept { return rho * c_V; }

    friend bool operator==(const MaterialParams&, const MaterialParams&) = default;
};

/// Throws InputError when the coefficients are not admissible for the model.
inline void validate(const MaterialParams& m, ModelKind model) {
    if (!(m.rho > 0.0)) throw InputError("density must be positive");
    if (!(m.c_V > 0.0)) throw InputError("specific heat must be positive");
    if (!(m.lambda > 0.0)) throw InputError("thermal conductivity must be positive");
    if (!(m.tau >= 0.0)) throw InputError("relaxation time must be non-negative");
    if (!(m.kappa2 >= 0.0)) throw InputError("kappa^2 must be non-negative");
    if (model == ModelKind::Fourier && (m.tau != 0.0 || m.kappa2 != 0.0))
        throw InputError("Fourier model requires tau = 0 and kappa^2 = 0");
    if (model == ModelKind::MCV && m.kappa2 != 0.0)
        throw InputError("MCV model requires kappa^2 = 0");
}

} // namespace hpheat

#endif // HPHEAT_MODEL_HPP
