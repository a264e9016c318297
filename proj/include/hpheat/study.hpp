#ifndef HPHEAT_STUDY_HPP
#define HPHEAT_STUDY_HPP

// h- and p-convergence sweeps measured by the relative max-over-time error
//   e = max_t |u_h(t) - u_ref(t)| / max_t |u_ref(t)|
// at the front/rear temperature and mid-plane flux probes.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "hpheat/errors.hpp"
#include "hpheat/fdoracle.hpp"
#include "hpheat/scenario.hpp"
#include "hpheat/timeint.hpp"

namespace hpheat {

inline double relative_max_error(const ProbeSeries& series, const ProbeSeries& ref) {
    if (series.values.size() != ref.values.size()) throw InputError("probe series live on different time grids");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
        num = std::max(num, std::abs(series.values[i] - ref.values[i]));
        den = std::max(den, std::abs(ref.values[i]));
    }
    if (den == 0.0) throw NumericalError("reference series is identically zero");
    return num / den;
}

enum class SweepKind { H, P };

inline std::string_view to_string(SweepKind k) { return k == SweepKind::H ? "h_sweep" : "p_sweep"; }

struct SweepSpec {
    SweepKind kind = SweepKind::P;
    std::vector<int> values;  // element counts (h) or degrees (p)
    int fixed = 2;            // degree (h) or element count (p)
    Scenario base;            // tau is overridden per entry of taus
    std::vector<double> taus;

    std::size_t elements_at(std::size_t i) const {
        return static_cast<std::size_t>(kind == SweepKind::H ? values[i] : fixed);
    }
    int degree_at(std::size_t i) const { return kind == SweepKind::H ? fixed : values[i]; }
};

/// The three benchmark families of the convergence study.
enum class StudyFamily { GKOverDiffuse, GKSmallKappa, MCV };

inline std::string_view to_string(StudyFamily f) {
    switch (f) {
    case StudyFamily::GKOverDiffuse: return "gk08";
    case StudyFamily::GKSmallKappa: return "gk0000008";
    case StudyFamily::MCV: return "mcv";
    }
    return "?";
}

/// Backward Euler for the convergence study. The MCV wave launched by the pulse
/// is a few micrometres wide; without damping its unresolved remainder rings
/// through every history and hides the spatial error.
inline constexpr double kStudyTheta = 1.0;

inline Scenario family_scenario(StudyFamily f, double tau, double lambda = kDefaultConductivity) {
    Scenario s;
    switch (f) {
    case StudyFamily::GKOverDiffuse: s = paper_scenario(ModelKind::GK, tau, paper::kappa2_large, lambda); break;
    case StudyFamily::GKSmallKappa: s = paper_scenario(ModelKind::GK, tau, paper::kappa2_small, lambda); break;
    case StudyFamily::MCV: s = paper_scenario(ModelKind::MCV, tau, 0.0, lambda); break;
    default: throw InputError("unknown study family");
    }
    s.theta = kStudyTheta;
    return s;
}

/// Coarse mesh of the p-sweep; also the start of the h-sweep.
inline int family_base_elements(StudyFamily f) {
    switch (f) {
    case StudyFamily::GKOverDiffuse: return 8;
    case StudyFamily::GKSmallKappa: return 52;
    case StudyFamily::MCV: return 20;
    }
    return 0;
}

/// p = 2..8 on the fixed coarse mesh.
inline SweepSpec paper_p_sweep(StudyFamily f, double lambda = kDefaultConductivity) {
    SweepSpec s;
    s.kind = SweepKind::P;
    s.values = {2, 3, 4, 5, 6, 7, 8};
    s.fixed = family_base_elements(f);
    s.base = family_scenario(f, paper::taus[0], lambda);
    s.taus.assign(std::begin(paper::taus), std::end(paper::taus));
    return s;
}

/// Seven uniform meshes at p = 2: 8..20 step 2, 52..88 step 6, 20..44 step 4.
inline SweepSpec paper_h_sweep(StudyFamily f, double lambda = kDefaultConductivity) {
    SweepSpec s;
    s.kind = SweepKind::H;
    s.fixed = 2;
    const int n0 = family_base_elements(f);
    const int stride = f == StudyFamily::GKOverDiffuse ? 2 : f == StudyFamily::GKSmallKappa ? 6 : 4;
    for (int k = 0; k < 7; ++k) s.values.push_back(n0 + k * stride);
    s.base = family_scenario(f, paper::taus[0], lambda);
    s.taus.assign(std::begin(paper::taus), std::end(paper::taus));
    return s;
}

enum class ReferenceProvenance { OverkillFem, FiniteDifferenceOracle };

struct ReferenceSolution {
    std::vector<ProbeSeries> probes;
    ReferenceProvenance provenance = ReferenceProvenance::OverkillFem;

    const ProbeSeries& probe(const std::string& name) const {
        for (const auto& p : probes)
            if (p.name == name) return p;
        throw std::out_of_range("reference has no probe named " + name);
    }
};

inline constexpr std::size_t kReferenceElements = 100;
inline constexpr int kReferenceDegree = 10;

/// FEM solution on a mesh far finer than any sweep point, same time grid.
inline ReferenceSolution overkill_reference(Scenario s, std::size_t elements = kReferenceElements,
                                            int p = kReferenceDegree) {
    s.elements = elements;
    s.p = p;
    return {simulate(s).probes, ReferenceProvenance::OverkillFem};
}

inline Scenario with_tau(Scenario s, double tau) {
    if (s.model != ModelKind::Fourier) s.material.tau = tau;
    return s;
}

struct ErrorReport {
    SweepKind kind = SweepKind::P;
    std::vector<double> taus;
    std::vector<std::string> probe_names;

    struct Row {
        std::size_t dof = 0;
        std::size_t elements = 0;
        int p = 0;
        std::vector<std::vector<double>> errors;  // [tau][probe]; NaN when failed
        std::vector<std::string> failures;        // [tau]; empty when the run succeeded
    };
    std::vector<Row> rows;

    bool any_failed() const {
        for (const auto& r : rows)
            for (const auto& f : r.failures)
                if (!f.empty()) return true;
        return false;
    }

    /// Error column for one tau and probe, ordered like rows.
    std::vector<double> column(std::size_t tau_index, std::size_t probe_index) const {
        std::vector<double> c;
        for (const auto& r : rows) c.push_back(r.errors[tau_index][probe_index]);
        return c;
    }

    std::vector<double> dofs() const {
        std::vector<double> d;
        for (const auto& r : rows) d.push_back(static_cast<double>(r.dof));
        return d;
    }
};

namespace detail {

/// Runs jobs [0, count) on up to `threads` workers; each job writes its own slot.
template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) job(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace detail

/// One solver run per sweep point and tau. A failing point is recorded in the
/// report and does not abort the sweep. refs[k] must belong to spec.taus[k].
inline ErrorReport run_sweep(const SweepSpec& spec, std::span<const ReferenceSolution> refs, unsigned threads = 1) {
    if (refs.size() != spec.taus.size()) throw InputError("need one reference solution per tau");
    ErrorReport report;
    report.kind = spec.kind;
    report.taus = spec.taus;
    for (const auto& p : spec.base.probes) report.probe_names.push_back(p.name);

    const std::size_t npts = spec.values.size(), ntau = spec.taus.size(), nprobe = spec.base.probes.size();
    report.rows.resize(npts);
    for (std::size_t i = 0; i < npts; ++i) {
        auto& row = report.rows[i];
        row.elements = spec.elements_at(i);
        row.p = spec.degree_at(i);
        row.errors.assign(ntau, std::vector<double>(nprobe, std::numeric_limits<double>::quiet_NaN()));
        row.failures.assign(ntau, {});
        try {
            row.dof = build_dofmap(Mesh::uniform(spec.base.length, row.elements), spec.base.model, row.p,
                                   spec.base.bcs).total_dofs;
        } catch (const std::exception& e) {
            for (auto& f : row.failures) f = e.what();
        }
    }

    detail::parallel_for(npts * ntau, threads, [&](std::size_t job) {
        const std::size_t i = job / ntau, k = job % ntau;
        auto& row = report.rows[i];
        if (!row.failures[k].empty()) return;
        try {
            Scenario s = with_tau(spec.base, spec.taus[k]);
            s.elements = row.elements;
            s.p = row.p;
            const TransientSolution sol = simulate(s);
            for (std::size_t j = 0; j < nprobe; ++j)
                row.errors[k][j] = relative_max_error(sol.probes[j], refs[k].probe(sol.probes[j].name));
        } catch (const std::exception& e) {
            row.failures[k] = e.what();
        }
    });
    return report;
}

/// References for every tau of a sweep, computed in parallel.
inline std::vector<ReferenceSolution> overkill_references(const SweepSpec& spec, unsigned threads = 1) {
    std::vector<ReferenceSolution> refs(spec.taus.size());
    detail::parallel_for(refs.size(), threads,
                         [&](std::size_t k) { refs[k] = overkill_reference(with_tau(spec.base, spec.taus[k])); });
    return refs;
}

/// Finite-difference solution of the same scenario on `cells` cells with time
/// step dt; the probes are sampled on the scenario's own time grid, so
/// scenario.dt must be an integer multiple of dt.
inline ReferenceSolution fd_oracle(const Scenario& s, std::size_t cells, double dt) {
    if (s.model == ModelKind::Fourier && s.material.tau != 0.0) throw InputError("Fourier scenario with tau != 0");
    if (s.bcs.left.kind != BoundaryKind::NeumannQ || s.bcs.right.kind != BoundaryKind::NeumannQ)
        throw InputError("the finite-difference oracle supports flux conditions only");
    const double ratio = s.dt / dt;
    const long sub = std::lround(ratio);
    if (sub < 1 || std::abs(ratio - static_cast<double>(sub)) > 1e-9 * ratio)
        throw InputError("oracle time step must divide the scenario time step");

    fd::StaggeredGrid grid = fd::StaggeredGrid::uniform(s.length, cells, s.T0);
    grid.q.front() = s.bcs.left.signal.value(0.0);
    grid.q.back() = s.bcs.right.signal.value(0.0);
    fd::Stepper stepper(cells, s.length, s.material, s.model, dt, s.theta, s.bcs.left.signal, s.bcs.right.signal);

    ReferenceSolution ref;
    ref.provenance = ReferenceProvenance::FiniteDifferenceOracle;
    for (const auto& p : s.probes) ref.probes.push_back({p.name, p.field, p.x, {}});
    auto record = [&] {
        for (std::size_t k = 0; k < s.probes.size(); ++k) {
            const auto& p = s.probes[k];
            ref.probes[k].values.push_back(p.field == Field::Temperature ? grid.temperature_at(p.x)
                                                                         : grid.flux_at(p.x));
        }
    };
    record();
    long n = 0;
    for (int step = 0; step < s.n_steps; ++step) {
        for (long k = 0; k < sub; ++k, ++n) stepper.advance(grid, static_cast<double>(n) * dt);
        record();
    }
    return ref;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = std::min(x.size(), y.size());
    if (n < 2) throw InputError("slope needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace hpheat

#endif // HPHEAT_STUDY_HPP
