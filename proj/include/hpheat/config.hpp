#ifndef HPHEAT_CONFIG_HPP
#define HPHEAT_CONFIG_HPP

// Run configuration: a flat "key = value" document, '#' starts a comment.
// Physical quantities carry their unit in the key name (relaxation_time_s,
// conductivity_W_mK, ...). Every coefficient of the constitutive law must be
// given explicitly; geometry, excitation and numerics default to the
// benchmark slab. See configs/ for complete examples.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hpheat/errors.hpp"
#include "hpheat/scenario.hpp"
#include "hpheat/study.hpp"

namespace hpheat {

enum class RunMode { Transient, HSweep, PSweep, OracleCheck };
enum class OutputFormat { Dat, Csv };

inline std::string_view to_string(RunMode m) {
    switch (m) {
    case RunMode::Transient: return "transient";
    case RunMode::HSweep: return "h_sweep";
    case RunMode::PSweep: return "p_sweep";
    case RunMode::OracleCheck: return "oracle_check";
    }
    return "?";
}

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "dat"; }

struct RunConfig {
    RunMode mode = RunMode::Transient;
    Scenario scenario;

    // sweeps
    std::vector<double> taus;
    std::vector<int> sweep_values;
    int sweep_fixed = 0;
    std::size_t reference_elements = kReferenceElements;
    int reference_degree = kReferenceDegree;

    // oracle_check
    std::size_t oracle_cells = 2000;
    double oracle_dt = 0.0;

    std::string output_dir = ".";
    OutputFormat format = OutputFormat::Dat;
    unsigned threads = 1;

    bool is_sweep() const noexcept { return mode == RunMode::HSweep || mode == RunMode::PSweep; }

    SweepSpec sweep_spec() const {
        SweepSpec s;
        s.kind = mode == RunMode::HSweep ? SweepKind::H : SweepKind::P;
        s.values = sweep_values;
        s.fixed = sweep_fixed;
        s.base = scenario;
        s.taus = taus;
        return s;
    }

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

struct KeyInfo {
    std::string_view key;
    std::string_view quantity;  // key without its unit suffix; empty when unitless
    std::string_view unit;
};

inline constexpr KeyInfo kKeys[] = {
    {"mode", "", ""},
    {"model", "", ""},
    {"density_kg_m3", "density", "kg_m3"},
    {"specific_heat_J_kgK", "specific_heat", "J_kgK"},
    {"conductivity_W_mK", "conductivity", "W_mK"},
    {"relaxation_time_s", "relaxation_time", "s"},
    {"relaxation_times_s", "relaxation_times", "s"},
    {"kappa2_m2", "kappa2", "m2"},
    {"length_m", "length", "m"},
    {"initial_temperature_K", "initial_temperature", "K"},
    {"pulse_amplitude_W_m2", "pulse_amplitude", "W_m2"},
    {"pulse_c1", "", ""},
    {"pulse_c2", "", ""},
    {"pulse_time_s", "pulse_time", "s"},
    {"time_step_s", "time_step", "s"},
    {"steps", "", ""},
    {"theta", "", ""},
    {"load_quadrature", "", ""},
    {"elements", "", ""},
    {"degree", "", ""},
    {"sweep_values", "", ""},
    {"sweep_fixed", "", ""},
    {"reference_elements", "", ""},
    {"reference_degree", "", ""},
    {"oracle_cells", "", ""},
    {"oracle_time_step_s", "oracle_time_step", "s"},
    {"output_dir", "", ""},
    {"format", "", ""},
    {"threads", "", ""},
};

// probe.<name>.temperature_at_m / probe.<name>.flux_at_m
inline constexpr std::string_view kProbePrefix = "probe.";
inline constexpr std::string_view kProbeT = "temperature_at";
inline constexpr std::string_view kProbeQ = "flux_at";

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Entry {
    std::string value;
    int line = 0;
};

class Document {
public:
    explicit Document(std::map<std::string, Entry> e) : entries_(std::move(e)) {}

    bool has(const std::string& key) const { return entries_.count(key) != 0; }
    int line(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }

    std::optional<std::string> text(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        return it->second.value;
    }

    std::optional<double> real(const std::string& key) const {
        auto t = text(key);
        if (!t) return std::nullopt;
        return parse_real(key, *t);
    }

    template <class Int>
    std::optional<Int> integer(const std::string& key) const {
        auto t = text(key);
        if (!t) return std::nullopt;
        return parse_int<Int>(key, *t);
    }

    std::optional<std::vector<double>> reals(const std::string& key) const {
        auto t = text(key);
        if (!t) return std::nullopt;
        std::vector<double> out;
        for (const auto& tok : tokens(*t)) out.push_back(parse_real(key, tok));
        if (out.empty()) fail("empty list", key);
        return out;
    }

    std::optional<std::vector<int>> integers(const std::string& key) const {
        auto t = text(key);
        if (!t) return std::nullopt;
        std::vector<int> out;
        for (const auto& tok : tokens(*t)) out.push_back(parse_int<int>(key, tok));
        if (out.empty()) fail("empty list", key);
        return out;
    }

    [[noreturn]] void fail(const std::string& what, const std::string& key) const {
        throw ConfigError(key + ": " + what, key, line(key));
    }

    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    static std::vector<std::string> tokens(const std::string& s) {
        std::string t = s;
        std::replace(t.begin(), t.end(), ',', ' ');
        std::istringstream in(t);
        std::vector<std::string> out;
        for (std::string w; in >> w;) out.push_back(w);
        return out;
    }

    double parse_real(const std::string& key, const std::string& s) const {
        double v = 0.0;
        const char* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc() || ptr != end) fail("'" + s + "' is not a number", key);
        return v;
    }

    template <class Int>
    Int parse_int(const std::string& key, const std::string& s) const {
        Int v{};
        const char* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc() || ptr != end) fail("'" + s + "' is not a non-negative integer", key);
        return v;
    }

    std::map<std::string, Entry> entries_;
};

inline const KeyInfo* find_key(std::string_view key) {
    for (const auto& k : kKeys)
        if (k.key == key) return &k;
    return nullptr;
}

/// Unknown key: a known quantity with the wrong unit, or a plain misspelling.
[[noreturn]] inline void reject_key(const std::string& key, int line) {
    const std::string_view quantity = key;
    if (key.rfind(kProbePrefix, 0) == 0) {
        const auto dot = key.rfind('.');
        if (dot != std::string::npos && dot >= kProbePrefix.size()) {
            const std::string_view tail = std::string_view(key).substr(dot + 1);
            for (auto base : {kProbeT, kProbeQ})
                if (tail == base || tail.rfind(std::string(base) + "_", 0) == 0)
                    throw ConfigError("unit mismatch: " + key + " must be given in m (" + std::string(base) + "_m)",
                                      key, line);
        }
        throw ConfigError("unknown probe key " + key + " (expected probe.<name>.temperature_at_m or "
                          "probe.<name>.flux_at_m)", key, line);
    }
    for (const auto& k : kKeys) {
        if (k.quantity.empty()) continue;
        if (quantity == k.quantity || quantity.rfind(std::string(k.quantity) + "_", 0) == 0)
            throw ConfigError("unit mismatch: " + key + " must be given in " + std::string(k.unit) + " (key " +
                                  std::string(k.key) + ")",
                              key, line);
    }
    throw ConfigError("unknown key " + key, key, line);
}

inline Document tokenize(std::string_view text) {
    std::map<std::string, Entry> entries;
    std::istringstream in{std::string(text)};
    int lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", {}, lineno);
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", {}, lineno);
        if (value.empty()) throw ConfigError(key + ": missing value", key, lineno);
        if (!find_key(key)) {
            const bool probe = key.rfind(kProbePrefix, 0) == 0 &&
                               (key.ends_with(std::string(".") + std::string(kProbeT) + "_m") ||
                                key.ends_with(std::string(".") + std::string(kProbeQ) + "_m"));
            if (!probe) reject_key(key, lineno);
        }
        if (entries.count(key)) throw ConfigError(key + ": given twice (first on line " +
                                                      std::to_string(entries[key].line) + ")",
                                                  key, lineno);
        entries[key] = {value, lineno};
    }
    return Document(std::move(entries));
}

inline std::optional<StudyFamily> family_for(ModelKind model, double kappa2) {
    if (model == ModelKind::MCV) return StudyFamily::MCV;
    if (model == ModelKind::GK) return kappa2 >= 0.1 ? StudyFamily::GKOverDiffuse : StudyFamily::GKSmallKappa;
    return std::nullopt;
}

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Parses and fully validates a configuration. Defaults are resolved here so
/// the returned object is complete and serialize() writes every setting.
inline RunConfig parse_config(std::string_view text) {
    const detail::Document doc = detail::tokenize(text);
    RunConfig cfg;
    Scenario& s = cfg.scenario;

    auto require_text = [&](const std::string& key) {
        auto t = doc.text(key);
        if (!t) throw ConfigError("missing required key " + key, key);
        return *t;
    };

    const std::string mode = require_text("mode");
    if (mode == "transient") cfg.mode = RunMode::Transient;
    else if (mode == "h_sweep") cfg.mode = RunMode::HSweep;
    else if (mode == "p_sweep") cfg.mode = RunMode::PSweep;
    else if (mode == "oracle_check") cfg.mode = RunMode::OracleCheck;
    else doc.fail("unknown mode '" + mode + "' (transient, h_sweep, p_sweep, oracle_check)", "mode");

    const auto model = parse_model(require_text("model"));
    if (!model) doc.fail("unknown model (fourier, mcv, gk)", "model");
    s.model = *model;

    auto required_real = [&](const std::string& key, const std::string& hint = {}) {
        auto v = doc.real(key);
        if (!v) throw ConfigError("missing required key " + key + hint, key);
        return *v;
    };
    s.material.rho = required_real("density_kg_m3");
    s.material.c_V = required_real("specific_heat_J_kgK");
    s.material.lambda = required_real(
        "conductivity_W_mK",
        " (not stated by the benchmark; " + detail::format_real(kDefaultConductivity) +
            " W/(m K) is a typical value for the rock samples it models)");

    // relaxation time: one value, or a list for the sweeps
    if (s.model == ModelKind::Fourier) {
        for (const char* k : {"relaxation_time_s", "relaxation_times_s", "kappa2_m2"}) {
            if (!doc.has(k)) continue;
            auto v = std::string(k) == "relaxation_times_s" ? doc.reals(k)->front() : *doc.real(k);
            if (v != 0.0) doc.fail("the Fourier model has no " + std::string(k == std::string("kappa2_m2") ? "kappa^2" : "relaxation time"), k);
        }
    } else if (cfg.is_sweep()) {
        if (auto list = doc.reals("relaxation_times_s")) cfg.taus = *list;
        else if (auto one = doc.real("relaxation_time_s")) cfg.taus = {*one};
        else throw ConfigError("missing required key relaxation_times_s", "relaxation_times_s");
        s.material.tau = cfg.taus.front();
    } else {
        s.material.tau = required_real("relaxation_time_s");
    }
    if (cfg.is_sweep() && s.model == ModelKind::Fourier) cfg.taus = {0.0};

    if (s.model == ModelKind::GK) s.material.kappa2 = required_real("kappa2_m2");
    else if (s.model == ModelKind::MCV) s.material.kappa2 = doc.real("kappa2_m2").value_or(0.0);

    auto check = [&](bool ok, const char* key, const std::string& what) {
        if (!ok) throw ConfigError(std::string(key) + ": " + what, key, doc.line(key));
    };
    check(s.material.rho > 0.0, "density_kg_m3", "must be positive");
    check(s.material.c_V > 0.0, "specific_heat_J_kgK", "must be positive");
    check(s.material.lambda > 0.0, "conductivity_W_mK", "must be positive");
    const char* tau_key = doc.has("relaxation_times_s") && cfg.is_sweep() ? "relaxation_times_s" : "relaxation_time_s";
    check(s.material.tau >= 0.0 && std::all_of(cfg.taus.begin(), cfg.taus.end(), [](double t) { return t >= 0.0; }),
          tau_key, "relaxation time must be non-negative");
    check(s.material.kappa2 >= 0.0, "kappa2_m2", "must be non-negative");
    check(s.model != ModelKind::MCV || s.material.kappa2 == 0.0, "kappa2_m2",
          "the MCV model requires kappa^2 = 0 (use model = gk)");
    try {
        validate(s.material, s.model);
        for (double tau : cfg.taus)
            if (!(tau >= 0.0)) throw InputError("relaxation time must be non-negative");
    } catch (const InputError& e) {
        throw ConfigError(std::string("invalid material: ") + e.what(), {});
    }

    s.length = doc.real("length_m").value_or(paper::length);
    s.T0 = doc.real("initial_temperature_K").value_or(paper::initial_temperature);
    if (!(s.length > 0.0)) doc.fail("must be positive", "length_m");

    PulseParams pulse;
    pulse.amplitude = doc.real("pulse_amplitude_W_m2").value_or(pulse.amplitude);
    pulse.c1 = doc.real("pulse_c1").value_or(pulse.c1);
    pulse.c2 = doc.real("pulse_c2").value_or(pulse.c2);
    pulse.t_p = doc.real("pulse_time_s").value_or(pulse.t_p);
    try {
        pulse.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what(), "pulse_time_s");
    }
    s.bcs.left = EndCondition::flux(pulse.amplitude == 0.0 ? BoundarySignal::zero() : BoundarySignal::pulse(pulse));
    s.bcs.right = EndCondition::flux(BoundarySignal::zero());

    s.dt = doc.real("time_step_s").value_or(paper::time_step);
    s.n_steps = doc.integer<int>("steps").value_or(paper::steps);
    const auto family = detail::family_for(s.model, s.material.kappa2);
    s.theta = doc.real("theta").value_or(cfg.is_sweep() ? kStudyTheta : 0.5);
    if (auto lq = doc.text("load_quadrature")) {
        if (*lq == "step_average") s.load = LoadQuadrature::StepAverage;
        else if (*lq == "point_theta") s.load = LoadQuadrature::PointTheta;
        else doc.fail("expected step_average or point_theta", "load_quadrature");
    }
    try {
        s.scheme().validate();
    } catch (const InputError& e) {
        throw ConfigError(e.what(), {});
    }

    if (cfg.mode == RunMode::OracleCheck && family) {
        s.elements = static_cast<std::size_t>(family_base_elements(*family));
        s.p = 8;
    }
    s.elements = doc.integer<std::size_t>("elements").value_or(s.elements);
    s.p = doc.integer<int>("degree").value_or(s.p);
    if (s.elements < 1) doc.fail("need at least one element", "elements");
    if (s.p < 1 || s.p + 1 > kMaxDegree)
        doc.fail("degree must lie in [1, " + std::to_string(kMaxDegree - 1) + "]", "degree");

    // probes: probe.<name>.temperature_at_m / probe.<name>.flux_at_m, else the standard three
    s.probes.clear();
    std::vector<std::pair<int, std::string>> probe_keys;  // document order
    for (const auto& [key, entry] : doc.entries())
        if (key.rfind(detail::kProbePrefix, 0) == 0) probe_keys.emplace_back(entry.line, key);
    std::sort(probe_keys.begin(), probe_keys.end());
    for (const auto& [line, key] : probe_keys) {
        const auto dot = key.rfind('.');
        const std::string name = key.substr(detail::kProbePrefix.size(), dot - detail::kProbePrefix.size());
        if (name.empty()) doc.fail("probe name is empty", key);
        const bool temp = key.substr(dot + 1).rfind(detail::kProbeT, 0) == 0;
        const double x = *doc.real(key);
        if (x < 0.0 || x > s.length) doc.fail("probe lies outside [0, length_m]", key);
        for (const auto& p : s.probes)
            if (p.name == name) doc.fail("probe '" + name + "' defined twice", key);
        s.probes.push_back({name, temp ? Field::Temperature : Field::HeatFlux, x});
    }
    if (s.probes.empty()) s.probes = standard_probes(s.length);

    if (cfg.is_sweep()) {
        if (family) {
            const SweepSpec def = cfg.mode == RunMode::HSweep ? paper_h_sweep(*family) : paper_p_sweep(*family);
            cfg.sweep_values = def.values;
            cfg.sweep_fixed = def.fixed;
        }
        if (auto v = doc.integers("sweep_values")) cfg.sweep_values = *v;
        if (auto f = doc.integer<int>("sweep_fixed")) cfg.sweep_fixed = *f;
        if (cfg.sweep_values.empty()) throw ConfigError("missing required key sweep_values", "sweep_values");
        if (cfg.sweep_fixed < 1) throw ConfigError("missing required key sweep_fixed", "sweep_fixed");
        cfg.reference_elements = doc.integer<std::size_t>("reference_elements").value_or(cfg.reference_elements);
        cfg.reference_degree = doc.integer<int>("reference_degree").value_or(cfg.reference_degree);
        const bool h = cfg.mode == RunMode::HSweep;
        for (int v : cfg.sweep_values) {
            const int p = h ? cfg.sweep_fixed : v;
            if ((h && v < 1) || p < 1 || p + 1 > kMaxDegree) doc.fail("sweep point out of range", "sweep_values");
        }
        if (cfg.reference_degree < 1 || cfg.reference_degree + 1 > kMaxDegree || cfg.reference_elements < 1)
            doc.fail("reference discretisation out of range", "reference_degree");
    }

    if (cfg.mode == RunMode::OracleCheck) {
        cfg.oracle_cells = doc.integer<std::size_t>("oracle_cells").value_or(cfg.oracle_cells);
        cfg.oracle_dt = doc.real("oracle_time_step_s").value_or(s.dt);
        if (cfg.oracle_cells < 2) doc.fail("need at least two cells", "oracle_cells");
        if (!(cfg.oracle_dt > 0.0)) doc.fail("must be positive", "oracle_time_step_s");
    }

    cfg.output_dir = doc.text("output_dir").value_or(cfg.output_dir);
    if (auto f = doc.text("format")) {
        if (*f == "dat") cfg.format = OutputFormat::Dat;
        else if (*f == "csv") cfg.format = OutputFormat::Csv;
        else doc.fail("expected dat or csv", "format");
    }
    cfg.threads = doc.integer<unsigned>("threads").value_or(1u);
    if (cfg.threads < 1) doc.fail("need at least one thread", "threads");
    return cfg;
}

/// Inverse of parse_config: parse_config(serialize(c)) == c.
inline std::string serialize(const RunConfig& cfg) {
    const Scenario& s = cfg.scenario;
    std::ostringstream out;
    auto put = [&](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
    auto real = [](double v) { return detail::format_real(v); };
    auto list = [](const auto& xs, auto fmt) {
        std::string r;
        for (std::size_t i = 0; i < xs.size(); ++i) r += (i ? ", " : "") + fmt(xs[i]);
        return r;
    };

    put("mode", std::string(to_string(cfg.mode)));
    std::string model(to_string(s.model));
    std::transform(model.begin(), model.end(), model.begin(), [](unsigned char c) { return std::tolower(c); });
    put("model", model);
    put("density_kg_m3", real(s.material.rho));
    put("specific_heat_J_kgK", real(s.material.c_V));
    put("conductivity_W_mK", real(s.material.lambda));
    if (s.model != ModelKind::Fourier) {
        if (cfg.is_sweep()) put("relaxation_times_s", list(cfg.taus, real));
        else put("relaxation_time_s", real(s.material.tau));
    }
    if (s.model == ModelKind::GK) put("kappa2_m2", real(s.material.kappa2));
    put("length_m", real(s.length));
    put("initial_temperature_K", real(s.T0));
    if (const auto* p = std::get_if<BoundarySignal::Pulse>(&s.bcs.left.signal.get())) {
        put("pulse_amplitude_W_m2", real(p->params.amplitude));
        put("pulse_c1", real(p->params.c1));
        put("pulse_c2", real(p->params.c2));
        put("pulse_time_s", real(p->params.t_p));
    } else {
        put("pulse_amplitude_W_m2", "0");
    }
    put("time_step_s", real(s.dt));
    put("steps", std::to_string(s.n_steps));
    put("theta", real(s.theta));
    put("load_quadrature", s.load == LoadQuadrature::StepAverage ? "step_average" : "point_theta");
    put("elements", std::to_string(s.elements));
    put("degree", std::to_string(s.p));
    for (const auto& p : s.probes)
        put("probe." + p.name + "." + std::string(p.field == Field::Temperature ? detail::kProbeT : detail::kProbeQ) +
                "_m",
            real(p.x));
    if (cfg.is_sweep()) {
        put("sweep_values", list(cfg.sweep_values, [](int v) { return std::to_string(v); }));
        put("sweep_fixed", std::to_string(cfg.sweep_fixed));
        put("reference_elements", std::to_string(cfg.reference_elements));
        put("reference_degree", std::to_string(cfg.reference_degree));
    }
    if (cfg.mode == RunMode::OracleCheck) {
        put("oracle_cells", std::to_string(cfg.oracle_cells));
        put("oracle_time_step_s", real(cfg.oracle_dt));
    }
    put("output_dir", cfg.output_dir);
    put("format", std::string(to_string(cfg.format)));
    put("threads", std::to_string(cfg.threads));
    return out.str();
}

} // namespace hpheat

#endif // HPHEAT_CONFIG_HPP
