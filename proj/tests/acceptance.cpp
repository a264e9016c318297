// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hpheat/study.hpp"

using namespace hpheat;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> body;
};

std::string fmt(double v, int digits = 3) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

void note(const std::string& s) { std::printf("    %s\n", s.c_str()); }

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// 1 ---------------------------------------------------------------------------

Verdict basis_suite() {
    double endpoint = 0.0, ortho = 0.0, quad = 0.0;
    for (int p = 2; p <= kMaxDegree; ++p) {
        const ShapeSet s(p);
        const QuadratureRule rule = gauss_rule(p + 1);
        for (int j = 3; j <= s.count(); ++j) {
            endpoint = std::max({endpoint, std::abs(s.value(j, -1.0)), std::abs(s.value(j, 1.0))});
            for (int k = 3; k <= s.count(); ++k) {
                double v = 0.0;
                for (std::size_t g = 0; g < rule.size(); ++g)
                    v += rule.weights[g] * s.deriv(j, rule.points[g]) * s.deriv(k, rule.points[g]);
                ortho = std::max(ortho, std::abs(v - (j == k ? 1.0 : 0.0)));
            }
        }
    }
    for (int n = 1; n <= 2 * kMaxDegree; ++n) {
        const QuadratureRule rule = gauss_rule(n);
        for (int d = 0; d <= 2 * n - 1; ++d) {
            double v = 0.0;
            for (std::size_t g = 0; g < rule.size(); ++g) v += rule.weights[g] * std::pow(rule.points[g], d);
            quad = std::max(quad, std::abs(v - (d % 2 ? 0.0 : 2.0 / (d + 1))));
        }
    }
    return {endpoint <= 1e-14 && ortho <= 1e-12 && quad <= 1e-13,
            "bubble ends " + fmt(endpoint) + ", derivative orthonormality " + fmt(ortho) + ", quadrature " +
                fmt(quad)};
}

// 2 ---------------------------------------------------------------------------

Verdict structure_suite() {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> w(0.2, 1.0);
    std::normal_distribution<double> g;
    double asym = 0.0, tt_block = 0.0, identity = 0.0;
    for (ModelKind model : {ModelKind::Fourier, ModelKind::MCV, ModelKind::GK}) {
        const MaterialParams mat{2600.0, 800.0, 3.0, model == ModelKind::Fourier ? 0.0 : 0.3,
                                 model == ModelKind::GK ? 8e-6 : 0.0};
        for (int trial = 0; trial < 4; ++trial) {
            const int p = 1 + trial * 2;
            Mesh mesh;
            mesh.nodes = {0.0};
            for (int e = 0; e < 17; ++e) mesh.nodes.push_back(mesh.nodes.back() + w(rng));
            for (double& x : mesh.nodes) x *= 0.005 / mesh.nodes.back();
            BoundarySpec bcs;
            bcs.left = EndCondition::flux(BoundarySignal::pulse({}));
            const auto sys = assemble(mesh, mat, model, p, bcs);
            const auto& dm = sys.dofmap;
            const double scale_a = sys.A_full.max_abs(), scale_b = sys.B_full.max_abs();
            for (std::size_t i = 0; i < dm.full_size; ++i)
                for (std::size_t j = 0; j < dm.full_size; ++j) {
                    asym = std::max(asym, std::abs(sys.A_full(i, j) - sys.A_full(j, i)) / scale_a);
                    if (dm.field_of[i] == Field::Temperature && dm.field_of[j] == Field::Temperature)
                        tt_block = std::max(tt_block, std::abs(sys.B_full(i, j)) / scale_b);
                }

            std::vector<double> x(dm.full_size), y(dm.full_size);
            for (auto& v : x) v = g(rng);
            for (auto& v : y) v = g(rng);
            auto local = [&](const DenseMatrix& m, const std::vector<std::size_t>& r, const std::vector<std::size_t>& c) {
                double s = 0.0;
                for (std::size_t i = 0; i < m.rows(); ++i)
                    for (std::size_t j = 0; j < m.cols(); ++j) s += x[r[i]] * m(i, j) * y[c[j]];
                return s;
            };
            double a_loc = 0.0, b_loc = 0.0;
            const int dT = dm.t_space.degree, dQ = dm.q_space.degree;
            for (std::size_t e = 0; e < mesh.elements(); ++e) {
                const ElementMap map = mesh.element(e);
                const auto &td = dm.t_dofs[e], &qd = dm.q_dofs[e];
                a_loc += local(element_C(map, mat, dT), td, td) + local(element_T(map, mat, dQ), qd, qd);
                b_loc += local(element_Q(map, mat, dT, dQ), qd, td) - local(element_Qt(map, mat, dT, dQ), td, qd) +
                         local(element_K(map, mat, dQ, model), qd, qd);
            }
            auto bil = [&](const BandedMatrix& m) {
                const auto my = m * std::span<const double>(y);
                double s = 0.0;
                for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * my[i];
                return s;
            };
            identity = std::max({identity, std::abs(bil(sys.A_full) - a_loc) / std::abs(a_loc),
                                 std::abs(bil(sys.B_full) - b_loc) / std::abs(b_loc)});
        }
    }
    return {asym == 0.0 && tt_block == 0.0 && identity <= 1e-12,
            "A asymmetry " + fmt(asym) + ", B temperature block " + fmt(tt_block) + ", scatter-gather " +
                fmt(identity)};
}

// 3 ---------------------------------------------------------------------------

Verdict equilibrium() {
    Verdict v;
    for (ModelKind model : {ModelKind::Fourier, ModelKind::MCV, ModelKind::GK}) {
        Scenario s = paper_scenario(model, 0.3, 8e-6);
        s.bcs.left = EndCondition::flux(BoundarySignal::zero());
        s.elements = 52;
        s.p = 8;
        const auto t0 = std::chrono::steady_clock::now();
        const auto sol = simulate(s);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        // Flux deviations are measured against the natural scale lambda T0 / l.
        const double flux_scale = s.material.lambda * s.T0 / s.length;
        double dev = 0.0;
        for (const auto& pr : sol.probes)
            for (double x : pr.values)
                dev = std::max(dev, pr.quantity == Field::Temperature ? std::abs(x - s.T0) / s.T0
                                                                      : std::abs(x) / flux_scale);
        v.pass = v.pass && dev <= 1e-10 && secs < 10.0;
        v.detail += std::string(v.detail.empty() ? "" : ", ") + std::string(to_string(model)) + " " + fmt(dev) +
                    " in " + fmt(secs) + " s";
    }
    return v;
}

// 4 ---------------------------------------------------------------------------

Verdict energy_balance() {
    Scenario s = paper_scenario(ModelKind::GK, 0.3, 8e-6);
    s.theta = 0.5;
    s.elements = 52;
    s.p = 8;
    const SemiDiscreteSystem sys = make_system(s);
    const auto a0 = initial_state(sys, s);
    const auto sol = integrate(sys, s.scheme(), a0, s.probes);
    const double t_end = s.scheme().final_time();
    const auto full_end = sys.expand(sol.final_state, t_end);
    const auto full_0 = sys.expand(a0, 0.0);
    std::vector<double> diff(full_end.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = full_end[i] - full_0[i];
    const double stored = s.material.heat_capacity() * field_integral(sys, diff, Field::Temperature);
    const double supplied = s.bcs.left.signal.integral(t_end);
    const double rel = std::abs(stored - supplied) / supplied;
    const double rear = dimensionless_temperature(sol.probes[1], s).values.back();
    return {rel <= 5e-3 && rear >= 0.9 && rear <= 1.02,
            "stored " + fmt(stored) + " J/m^2 vs supplied " + fmt(supplied) + " (rel " + fmt(rel) +
                "), rear dimensionless " + fmt(rear, 6)};
}

// 5 ---------------------------------------------------------------------------

double worst_probe_error(const TransientSolution& a, const TransientSolution& b) {
    double e = 0.0;
    for (std::size_t k = 0; k < a.probes.size(); ++k) e = std::max(e, relative_max_error(a.probes[k], b.probes[k]));
    return e;
}

Verdict nesting() {
    Scenario mcv = paper_scenario(ModelKind::MCV, 0.3, 0.0);
    mcv.elements = 52;
    mcv.p = 8;
    Scenario gk = mcv;
    gk.model = ModelKind::GK;
    const auto sol_mcv = simulate(mcv);
    const auto sol_gk = simulate(gk);
    for (std::size_t k = 0; k < sol_gk.probes.size(); ++k)
        note("GK(kappa^2=0) vs MCV " + sol_gk.probes[k].name + ": " +
             fmt(relative_max_error(sol_gk.probes[k], sol_mcv.probes[k])));
    const double e_gk = worst_probe_error(sol_gk, sol_mcv);

    Scenario fourier = paper_scenario(ModelKind::Fourier, 0.0, 0.0);
    fourier.elements = 52;
    fourier.p = 8;
    Scenario stiff = mcv;
    stiff.material.tau = 1e-8;
    const double e_f = worst_probe_error(simulate(stiff), simulate(fourier));
    return {e_gk <= 1e-6 && e_f <= 1e-4,
            "GK(kappa^2=0) vs MCV " + fmt(e_gk) + " (limit 1e-6), MCV(tau=1e-8) vs Fourier " + fmt(e_f) +
                " (limit 1e-4)"};
}

// 6 ---------------------------------------------------------------------------

constexpr double kFloorLow = 1e-9, kFloorHigh = 1e-6;

struct SweepResult {
    StudyFamily family;
    ErrorReport p, h;
};

std::vector<std::pair<double, double>> pre_floor(const std::vector<double>& dof, const std::vector<double>& err) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < err.size(); ++i)
        if (err[i] > kFloorLow) out.emplace_back(dof[i], err[i]);
    return out;
}

double slope_of(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> x, y;
    for (auto [a, b] : pts) x.push_back(a), y.push_back(b);
    return loglog_slope(x, y);
}

Verdict convergence() {
    const StudyFamily families[] = {StudyFamily::GKOverDiffuse, StudyFamily::GKSmallKappa, StudyFamily::MCV};
    std::vector<SweepResult> results;
    for (StudyFamily f : families) {
        const SweepSpec ps = paper_p_sweep(f), hs = paper_h_sweep(f);
        const auto refs = overkill_references(ps, worker_count());
        results.push_back({f, run_sweep(ps, refs, worker_count()), run_sweep(hs, refs, worker_count())});
    }

    int combos = 0, monotone_ok = 0, failed_points = 0;
    bool slopes_ok = true, floor_ok = true, tau_ok = true;
    for (const auto& r : results) {
        const std::string fam(to_string(r.family));
        failed_points += r.p.any_failed() + r.h.any_failed();
        for (std::size_t j = 0; j < r.p.probe_names.size(); ++j) {
            const std::string& probe = r.p.probe_names[j];
            for (const ErrorReport* rep : {&r.p, &r.h}) {
                ++combos;
                bool mono = true;
                for (std::size_t k = 0; k < rep->taus.size(); ++k) {
                    const auto e = rep->column(k, j);
                    for (std::size_t i = 0; i + 1 < e.size(); ++i)
                        if (e[i] > kFloorLow && !(e[i + 1] < e[i])) mono = false;
                }
                monotone_ok += mono;
                if (!mono) note(fam + " " + std::string(to_string(rep->kind)) + " " + probe + ": not monotone pre-floor");
            }

            std::vector<double> h_slopes;
            for (std::size_t k = 0; k < r.p.taus.size(); ++k) {
                const auto pe = r.p.column(k, j), he = r.h.column(k, j);
                const double sp = slope_of(pre_floor(r.p.dofs(), pe));
                const double sh = slope_of(pre_floor(r.h.dofs(), he));
                h_slopes.push_back(sh);
                const double floor = *std::min_element(pe.begin(), pe.end());
                const bool steeper = sp < sh;
                const bool in_band = floor >= kFloorLow && floor <= kFloorHigh;
                slopes_ok = slopes_ok && steeper;
                floor_ok = floor_ok && in_band;
                std::ostringstream line;
                line << fam << " tau=" << r.p.taus[k] << " " << probe << ": p-slope " << fmt(sp) << ", h-slope "
                     << fmt(sh) << ", p-floor " << fmt(floor) << (steeper ? "" : " [slope]")
                     << (in_band ? "" : " [floor]");
                note(line.str());
            }
            for (std::size_t k = 1; k < h_slopes.size(); ++k) {
                const double change = std::abs(h_slopes[k] - h_slopes[0]) / std::abs(h_slopes[0]);
                if (!(change < 0.15)) {
                    tau_ok = false;
                    note(fam + " " + probe + ": h-slope changes by " + fmt(100 * change) + "% at tau=" +
                         fmt(r.h.taus[k]));
                }
            }
        }
    }
    return {monotone_ok == combos && slopes_ok && floor_ok && tau_ok && failed_points == 0,
            std::to_string(monotone_ok) + "/" + std::to_string(combos) + " monotone, p steeper than h: " +
                (slopes_ok ? "yes" : "no") + ", p-floor in [1e-9, 1e-6]: " + (floor_ok ? "yes" : "no") +
                ", h-slope tau-invariant: " + (tau_ok ? "yes" : "no")};
}

// 7 ---------------------------------------------------------------------------

Verdict oracle_agreement() {
    Verdict v;
    double worst = 0.0;
    for (StudyFamily f : {StudyFamily::MCV, StudyFamily::GKSmallKappa, StudyFamily::GKOverDiffuse}) {
        Scenario s = family_scenario(f, paper::taus[0]);
        s.elements = static_cast<std::size_t>(family_base_elements(f));
        s.p = 8;
        const auto fem = simulate(s);
        const auto fd = fd_oracle(s, 2000, s.dt);
        for (const auto& series : fem.probes) {
            const double e = relative_max_error(series, fd.probe(series.name));
            worst = std::max(worst, e);
            v.pass = v.pass && e <= 5e-3;
            note(std::string(to_string(f)) + " " + series.name + ": " + fmt(e) + (e <= 5e-3 ? "" : " [> 0.5%]"));
        }
    }
    v.detail = "worst probe discrepancy " + fmt(worst) + " (limit 5e-3)";
    return v;
}

// 8 ---------------------------------------------------------------------------

Verdict over_diffuse() {
    auto rear_gap = [](StudyFamily f) {
        Scenario a = family_scenario(f, 0.05), b = family_scenario(f, 0.3);
        a.elements = b.elements = static_cast<std::size_t>(family_base_elements(f));
        a.p = b.p = 8;
        return relative_max_error(simulate(a).probes[1], simulate(b).probes[1]);
    };
    const double large = rear_gap(StudyFamily::GKOverDiffuse), small = rear_gap(StudyFamily::GKSmallKappa);
    return {10.0 * large <= small,
            "rear tau-sensitivity " + fmt(large) + " at kappa^2=0.8 vs " + fmt(small) + " at kappa^2=8e-6 (ratio " +
                fmt(small / large) + ")"};
}

// 9 ---------------------------------------------------------------------------

Verdict performance() {
    Scenario s = paper_scenario(ModelKind::GK, 0.3, 8e-6);
    s.elements = 100;
    s.p = 10;
    const auto t0 = std::chrono::steady_clock::now();
    const auto sol = simulate(s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {secs < 10.0 && sol.times.size() == 10001, "10^4 steps at n=100, p=10 in " + fmt(secs) + " s"};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "basis", 1.0, basis_suite},
        {2, "structure", 5.0, structure_suite},
        {3, "equilibrium", 30.0, equilibrium},
        {4, "energy balance", 30.0, energy_balance},
        {5, "model nesting", 60.0, nesting},
        {6, "convergence", 900.0, convergence},
        {7, "independent oracle", 300.0, oracle_agreement},
        {8, "over-diffuse insensitivity", 120.0, over_diffuse},
        {9, "performance", 10.0, performance},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.body();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = v.pass && in_time;
        failures += !pass;
        std::printf("%s %d %s: %s; %.2f s (budget %g s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(),
                    secs, c.budget_s, in_time ? "" : " [over budget]");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
