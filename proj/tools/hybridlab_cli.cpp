// Command-line front end; talks to the engine through the C API only.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "hybridlab.h"

namespace {

int status_to_exit(hl_status status) {
    switch (status) {
        case HL_OK: return 0;
        case HL_ERR_CONFIG:
        case HL_ERR_INVALID: return 2;
        case HL_ERR_NUMERICS:
        case HL_ERR_IO: return 3;
    }
    return 3;
}

int fail(hl_status status) {
    std::fprintf(stderr, "error: %s\n", hl_last_error());
    return status_to_exit(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybridlab: hybrid quantum-classical measurement simulator"};
    app.set_version_flag("--version", std::string(hl_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string mode;
    std::string grid;
    double dt = 0.0;
    bool have_dt = false;
    unsigned long seed = 0; // reserved for future stochastic extensions

    const char* commands[] = {"scenario", "evolve-classical", "evolve-quantum",
                              "evolve-hybrid", "diagnose"};
    for (const char* name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config,-c,config", config_path, "config file")
            ->required();
        sub->add_option("--out,-o", out_dir, "output directory");
        sub->add_option("--mode", mode, "override scenario mode");
        sub->add_option("--grid", grid, "override grid size as NxM");
        sub->add_option("--dt", dt, "override time step")
            ->each([&](const std::string&) { have_dt = true; });
        sub->add_option("--seed", seed, "random seed (reserved)");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    hl_config* cfg = nullptr;
    hl_status status = hl_config_parse_file(config_path.c_str(), &cfg);
    if (status != HL_OK) return fail(status);

    if (!mode.empty()) {
        status = hl_config_set(cfg, "scenario.mode", mode.c_str());
        if (status != HL_OK) {
            hl_config_free(cfg);
            return fail(status);
        }
    }
    if (!grid.empty()) {
        const std::size_t x = grid.find('x');
        if (x == std::string::npos || x == 0 || x + 1 >= grid.size()) {
            std::fprintf(stderr, "error: --grid expects NxM, got '%s'\n",
                         grid.c_str());
            hl_config_free(cfg);
            return 2;
        }
        status = hl_config_set(cfg, "grid.n_q", grid.substr(0, x).c_str());
        if (status == HL_OK)
            status = hl_config_set(cfg, "grid.n_p", grid.substr(x + 1).c_str());
        if (status != HL_OK) {
            hl_config_free(cfg);
            return fail(status);
        }
    }
    if (have_dt) {
        status = hl_config_set(cfg, "numerics.dt", std::to_string(dt).c_str());
        if (status != HL_OK) {
            hl_config_free(cfg);
            return fail(status);
        }
    }

    if (command == "scenario" || command == "diagnose") {
        // Run once through the report API so the verdict can be printed
        // without a second evaluation.
        hl_report* report = nullptr;
        status = hl_scenario_run(cfg, &report);
        if (status != HL_OK) {
            hl_config_free(cfg);
            return fail(status);
        }
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        status = hl_report_write_json(report, (out_dir + "/report.json").c_str());
        if (status == HL_OK && command == "scenario") {
            status = hl_report_write_csv(
                report, (out_dir + "/timeseries.csv").c_str());
            if (status == HL_OK)
                status = hl_report_write_plotdata(
                    report, (out_dir + "/plotdata").c_str());
        }
        if (status == HL_OK)
            std::printf("verdict: %s\n", hl_report_verdict(report));
        hl_report_free(report);
        hl_config_free(cfg);
        return status == HL_OK ? 0 : fail(status);
    }

    status = hl_execute(cfg, command.c_str(), out_dir.c_str());
    hl_config_free(cfg);
    if (status != HL_OK) return fail(status);
    return 0;
}
