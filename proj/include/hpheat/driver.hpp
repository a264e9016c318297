#ifndef HPHEAT_DRIVER_HPP
#define HPHEAT_DRIVER_HPP

// Dispatch of a RunConfig to the solver, the sweeps or the oracle comparison,
// and the mapping of failures to exit codes:
//   0 success, 2 configuration error, 3 numerical failure, 4 I/O failure.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpheat/config.hpp"
#include "hpheat/errors.hpp"
#include "hpheat/output.hpp"
#include "hpheat/scenario.hpp"
#include "hpheat/study.hpp"

namespace hpheat {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3, kExitIo = 4 };

/// A sweep finished but some of its points did not.
class SweepFailure : public NumericalError {
public:
    SweepFailure(const std::string& what, std::vector<std::string> points)
        : NumericalError(what), points_(std::move(points)) {}
    const std::vector<std::string>& points() const noexcept { return points_; }

private:
    std::vector<std::string> points_;
};

namespace detail {

inline std::string lower(std::string_view s) {
    std::string r(s);
    std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return std::tolower(c); });
    return r;
}

inline std::filesystem::path table_path(const RunConfig& cfg, const std::string& what) {
    return std::filesystem::path(cfg.output_dir) / (std::string(to_string(cfg.mode)) + "_" + what + "_" +
                                                    lower(to_string(cfg.scenario.model)) + "." +
                                                    std::string(to_string(cfg.format)));
}

inline std::string tau_column(double tau) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "tau_%g", tau);
    return buf;
}

inline bool has_steady_rise(const Scenario& s) {
    try {
        steady_state_rise(s);
        return true;
    } catch (const InputError&) {
        return false;
    }
}

} // namespace detail

/// Runs one configuration and returns the files written. Throws on failure.
inline std::vector<std::filesystem::path> execute(const RunConfig& cfg, std::ostream& log) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.output_dir + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    auto emit = [&](const OutputTable& table, const std::string& what) {
        const auto path = detail::table_path(cfg, what);
        table.write(path, cfg.format);
        written.push_back(path);
        log << "wrote " << path.string() << '\n';
    };
    const Scenario& s = cfg.scenario;

    switch (cfg.mode) {
    case RunMode::Transient: {
        const TransientSolution sol = simulate(s);
        const bool rise = detail::has_steady_rise(s);
        for (const auto& series : sol.probes) {
            const bool dimless = rise && series.quantity == Field::Temperature;
            OutputTable t;
            t.columns = {"t", "value"};
            if (dimless) t.columns.push_back("dimensionless");
            const ProbeSeries d = dimless ? dimensionless_temperature(series, s) : ProbeSeries{};
            for (std::size_t k = 0; k < sol.times.size(); ++k) {
                std::vector<double> row{sol.times[k], series.values[k]};
                if (dimless) row.push_back(d.values[k]);
                t.add_row(std::move(row));
            }
            emit(t, series.name);
        }
        break;
    }
    case RunMode::HSweep:
    case RunMode::PSweep: {
        const SweepSpec spec = cfg.sweep_spec();
        std::vector<ReferenceSolution> refs(spec.taus.size());
        detail::parallel_for(refs.size(), cfg.threads, [&](std::size_t k) {
            refs[k] = overkill_reference(with_tau(spec.base, spec.taus[k]), cfg.reference_elements,
                                         cfg.reference_degree);
        });
        const ErrorReport report = run_sweep(spec, refs, cfg.threads);
        for (std::size_t j = 0; j < report.probe_names.size(); ++j) {
            OutputTable t;
            t.columns = {"dof"};
            for (double tau : report.taus)
                t.columns.push_back(s.model == ModelKind::Fourier ? "error" : detail::tau_column(tau));
            for (const auto& row : report.rows) {
                std::vector<double> r{row.dof ? static_cast<double>(row.dof) : std::numeric_limits<double>::quiet_NaN()};
                for (std::size_t k = 0; k < report.taus.size(); ++k) r.push_back(row.errors[k][j]);
                t.add_row(std::move(r));
            }
            emit(t, report.probe_names[j]);
        }
        if (report.any_failed()) {
            std::vector<std::string> failed;
            for (const auto& row : report.rows)
                for (std::size_t k = 0; k < row.failures.size(); ++k)
                    if (!row.failures[k].empty())
                        failed.push_back("n=" + std::to_string(row.elements) + " p=" + std::to_string(row.p) +
                                         " " + detail::tau_column(report.taus[k]) + ": " + row.failures[k]);
            throw SweepFailure(std::to_string(failed.size()) + " sweep point(s) failed", std::move(failed));
        }
        break;
    }
    case RunMode::OracleCheck: {
        const TransientSolution fem = simulate(s);
        const ReferenceSolution fd = fd_oracle(s, cfg.oracle_cells, cfg.oracle_dt);
        OutputTable summary;
        summary.columns = {"probe", "relative_max_error"};
        for (const auto& series : fem.probes) {
            const ProbeSeries& other = fd.probe(series.name);
            OutputTable t;
            t.columns = {"t", "fem", "fd"};
            for (std::size_t k = 0; k < fem.times.size(); ++k)
                t.add_row({fem.times[k], series.values[k], other.values[k]});
            emit(t, series.name);
            double e = std::numeric_limits<double>::quiet_NaN();
            try {
                e = relative_max_error(series, other);
                log << series.name << ": relative max-norm discrepancy " << OutputTable::format(e) << '\n';
            } catch (const NumericalError&) {
                log << series.name << ": reference is identically zero, no relative discrepancy\n";
            }
            summary.labels.push_back(series.name);
            summary.add_row({e});
        }
        emit(summary, "discrepancy");
        break;
    }
    }
    return written;
}

/// Machine-readable failure record, one JSON object per line.
inline std::string error_record(int code, const std::string& kind, const std::string& message,
                                const std::function<void(nlohmann::json&)>& extra = {}) {
    nlohmann::json j;
    j["status"] = "error";
    j["exit_code"] = code;
    j["kind"] = kind;
    j["message"] = message;
    if (extra) extra(j);
    return j.dump();
}

/// Calls `body`, translating exceptions into an exit code and an error record on err.
inline int guarded(const std::function<void()>& body, std::ostream& err) {
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        err << error_record(kExitConfig, "config", e.what(), [&](nlohmann::json& j) {
            if (!e.key().empty()) j["key"] = e.key();
            if (e.line() > 0) j["line"] = e.line();
        }) << '\n';
        return kExitConfig;
    } catch (const InputError& e) {
        err << error_record(kExitConfig, "input", e.what()) << '\n';
        return kExitConfig;
    } catch (const SweepFailure& e) {
        err << error_record(kExitNumerical, "numerical", e.what(),
                            [&](nlohmann::json& j) { j["failed_points"] = e.points(); })
            << '\n';
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << error_record(kExitNumerical, "numerical", e.what(), [&](nlohmann::json& j) {
            if (e.pivot() != NumericalError::npos) j["pivot"] = e.pivot();
        }) << '\n';
        return kExitNumerical;
    } catch (const IoError& e) {
        err << error_record(kExitIo, "io", e.what()) << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << error_record(kExitNumerical, "internal", e.what()) << '\n';
        return kExitNumerical;
    }
}

/// Command-line overrides applied on top of the file.
struct RunOverrides {
    std::optional<std::string> output_dir;
    std::optional<OutputFormat> format;
    std::optional<unsigned> threads;
};

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read configuration " + path.string());
    std::ostringstream text;
    text << f.rdbuf();
    return parse_config(text.str());
}

/// The `run <config-file>` command.
inline int run_command(const std::filesystem::path& config_path, const RunOverrides& ov, std::ostream& log,
                       std::ostream& err) {
    return guarded(
        [&] {
            RunConfig cfg = load_config(config_path);
            if (ov.output_dir) cfg.output_dir = *ov.output_dir;
            if (ov.format) cfg.format = *ov.format;
            if (ov.threads) {
                if (*ov.threads < 1) throw ConfigError("--threads must be at least 1", "threads");
                cfg.threads = *ov.threads;
            }
            execute(cfg, log);
        },
        err);
}

} // namespace hpheat

#endif // HPHEAT_DRIVER_HPP
