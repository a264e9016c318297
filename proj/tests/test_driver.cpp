#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hpheat/driver.hpp"

using namespace hpheat;
namespace fs = std::filesystem;

namespace {

const std::string kBase = R"(density_kg_m3 = 2600
specific_heat_J_kgK = 800
conductivity_W_mK = 3.0
steps = 40
)";

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("hpheat_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

int run_cli(const std::string& args, const fs::path& err) {
    const std::string cmd = std::string(HPHEAT_CLI) + " " + args + " > /dev/null 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST_CASE("shipped configurations parse") {
    for (const auto& entry : fs::directory_iterator(HPHEAT_CONFIGS)) {
        INFO(entry.path().string());
        CHECK_NOTHROW(load_config(entry.path()));
    }
}

TEST_CASE("output tables") {
    OutputTable t;
    t.columns = {"dof", "tau_0.3"};
    t.add_row({121, 0.1});
    t.add_row({161, std::numeric_limits<double>::quiet_NaN()});
    CHECK(t.render(OutputFormat::Dat) == "dof tau_0.3\n121 0.10000000000000001\n161 nan\n");
    CHECK(t.render(OutputFormat::Csv) == "dof,tau_0.3\n121,0.10000000000000001\n161,nan\n");
    OutputTable l;
    l.columns = {"probe", "e"};
    l.labels = {"front"};
    l.add_row({0.5});
    CHECK(l.render(OutputFormat::Dat) == "probe e\nfront 0.5\n");
}

TEST_CASE("transient run writes one table per probe") {
    const fs::path dir = scratch_dir("transient");
    const auto cfg = write_file(dir, "gk.cfg",
                                kBase + "mode = transient\nmodel = gk\nrelaxation_time_s = 0.3\nkappa2_m2 = 8e-6\n"
                                        "elements = 6\ndegree = 3\n");
    REQUIRE(run_cli("run " + cfg.string() + " --out " + (dir / "out").string(), dir / "err") == 0);
    const std::string front = read_file(dir / "out" / "transient_front_gk.dat");
    CHECK(front.rfind("t value dimensionless\n0 293 0\n", 0) == 0);
    CHECK(std::count(front.begin(), front.end(), '\n') == 42);
    CHECK(read_file(dir / "out" / "transient_mid_gk.dat").rfind("t value\n", 0) == 0);
    CHECK(fs::exists(dir / "out" / "transient_rear_gk.dat"));
}

TEST_CASE("sweep run writes dof-keyed error tables") {
    const fs::path dir = scratch_dir("sweep");
    const auto cfg = write_file(dir, "mcv.cfg",
                                kBase + "mode = p_sweep\nmodel = mcv\nrelaxation_times_s = 0.3, 0.05\n"
                                        "sweep_values = 2, 3\nsweep_fixed = 4\nreference_elements = 8\n"
                                        "reference_degree = 6\nformat = csv\n");
    REQUIRE(run_cli("run " + cfg.string() + " --out " + dir.string() + " --threads 2", dir / "err") == 0);
    const std::string rear = read_file(dir / "p_sweep_rear_mcv.csv");
    CHECK(rear.rfind("dof,tau_0.3,tau_0.05\n25,", 0) == 0);
    CHECK(std::count(rear.begin(), rear.end(), '\n') == 3);
}

TEST_CASE("oracle check writes side-by-side histories and the discrepancy") {
    const fs::path dir = scratch_dir("oracle");
    const auto cfg = write_file(dir, "o.cfg",
                                kBase + "mode = oracle_check\nmodel = mcv\nrelaxation_time_s = 0.05\n"
                                        "elements = 10\ndegree = 3\noracle_cells = 200\n");
    REQUIRE(run_cli("run " + cfg.string() + " --out " + dir.string(), dir / "err") == 0);
    CHECK(read_file(dir / "oracle_check_front_mcv.dat").rfind("t fem fd\n0 293 293\n", 0) == 0);
    CHECK(read_file(dir / "oracle_check_discrepancy_mcv.dat").rfind("probe relative_max_error\nfront ", 0) == 0);
}

TEST_CASE("configuration errors exit with 2 and a JSON record") {
    const fs::path dir = scratch_dir("config_error");
    const auto cfg = write_file(dir, "bad.cfg", kBase + "mode = transient\nmodel = gk\nrelaxation_time_s = 0.3\n");
    CHECK(run_cli("run " + cfg.string(), dir / "err") == kExitConfig);
    const auto j = nlohmann::json::parse(read_file(dir / "err"));
    CHECK(j["status"] == "error");
    CHECK(j["kind"] == "config");
    CHECK(j["key"] == "kappa2_m2");

    CHECK(run_cli("run", dir / "err") == kExitConfig);
    CHECK(run_cli("run " + cfg.string() + " --format xml", dir / "err") == kExitConfig);
}

TEST_CASE("I/O errors exit with 4") {
    const fs::path dir = scratch_dir("io_error");
    CHECK(run_cli("run " + (dir / "missing.cfg").string(), dir / "err") == kExitIo);
    CHECK(nlohmann::json::parse(read_file(dir / "err"))["kind"] == "io");

    const auto blocker = write_file(dir, "file", "x");
    const auto cfg = write_file(dir, "ok.cfg", "mode = transient\nmodel = fourier\ndensity_kg_m3 = 1\nspecific_heat_J_kgK = 1\n"
                                                  "conductivity_W_mK = 1\nsteps = 2\n");
    CHECK(run_cli("run " + cfg.string() + " --out " + (blocker / "sub").string(), dir / "err") == kExitIo);
}

TEST_CASE("failed sweep points exit with 3 after writing the table") {
    const fs::path dir = scratch_dir("sweep_failure");
    RunConfig cfg = parse_config(kBase + "mode = p_sweep\nmodel = gk\nrelaxation_times_s = 0.3\nkappa2_m2 = 0.8\n"
                                         "sweep_values = 2\nsweep_fixed = 2\nreference_elements = 4\n"
                                         "reference_degree = 4\n");
    cfg.sweep_values = {2, kMaxDegree};
    cfg.output_dir = dir.string();
    std::ostringstream log, err;
    CHECK(guarded([&] { execute(cfg, log); }, err) == kExitNumerical);
    const auto j = nlohmann::json::parse(err.str());
    CHECK(j["kind"] == "numerical");
    CHECK(j["failed_points"].size() == 1);
    const std::string table = read_file(dir / "p_sweep_front_gk.dat");
    CHECK(table.find("\n12 ") != std::string::npos);
    CHECK(table.find("\nnan nan\n") != std::string::npos);
}

TEST_CASE("singular systems report the pivot") {
    std::ostringstream err;
    CHECK(guarded([] { throw NumericalError("banded LU: vanishing pivot at row 7", 7); }, err) == kExitNumerical);
    CHECK(nlohmann::json::parse(err.str())["pivot"] == 7);
}
