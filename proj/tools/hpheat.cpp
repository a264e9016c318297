#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hpheat/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Mixed hp-FEM solver for 1D transient heat conduction (Fourier, MCV, GK)"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a configuration file");
    std::string config;
    std::string out_dir;
    std::string format;
    unsigned threads = 0;
    run->add_option("config", config, "Configuration file")->required();
    run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    run->add_option("--format", format, "Table format")->check(CLI::IsMember({"dat", "csv"}));
    run->add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hpheat::kExitConfig;
    }

    hpheat::RunOverrides ov;
    if (!out_dir.empty()) ov.output_dir = out_dir;
    if (!format.empty()) ov.format = format == "csv" ? hpheat::OutputFormat::Csv : hpheat::OutputFormat::Dat;
    if (threads > 0) ov.threads = threads;
    return hpheat::run_command(config, ov, std::cout, std::cerr);
}
