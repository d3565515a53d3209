#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include "geobeam/errors.hpp"
#include "geobeam/runner.hpp"

namespace {

void apply_thread_cap() {
    const char* env = std::getenv("GEOBEAM_THREADS");
    if (!env || !*env) return;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) {
        std::cerr << "geobeam: ignoring GEOBEAM_THREADS=" << env << " (expected a positive integer)\n";
        return;
    }
    omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian beam quasimodes along closed geodesics"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    bool quiet = false;
    const char* descriptions[][2] = {
        {"floquet", "Floquet data and Diophantine certificate of the geodesic"},
        {"cascade", "Solve the cascade of transport equations"},
        {"residual-scan", "Quasimode residuals over a list of h"},
        {"evolve", "Evolve a quasimode under the cubic Schroedinger flow"},
        {"instability", "Separation of two nearby quasimodes"},
    };
    for (const auto& d : descriptions) {
        CLI::App* sub = app.add_subcommand(d[0], d[1]);
        sub->add_option("config", config_path, "JSON configuration")->required();
        sub->add_option("-o,--output-dir", out_dir, "Override output.dir");
        sub->add_flag("-q,--quiet", quiet, "Do not print the report");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : geobeam::exit_code(geobeam::ErrorKind::ConfigInvalid);
    }
    const std::string name = app.get_subcommands().front()->get_name();
    apply_thread_cap();

    std::optional<geobeam::RunConfig> cfg;
    try {
        cfg = geobeam::load_config(config_path);
        if (!out_dir.empty()) cfg->output.dir = out_dir;
        const geobeam::RunArtifacts art = geobeam::run_subcommand(name, *cfg);
        geobeam::write_artifacts(name, *cfg, art);
        if (!quiet) std::cout << art.report.dump(2) << "\n";
        return 0;
    } catch (const geobeam::Error& e) {
        const int code = geobeam::exit_code(e.kind());
        const geobeam::json report = geobeam::error_report(name, cfg ? &*cfg : nullptr, e, code);
        std::cerr << report.dump(2) << "\n";
        if (cfg && e.kind() != geobeam::ErrorKind::IoFailure) {
            try {
                geobeam::RunArtifacts art;
                art.report = report;
                geobeam::write_artifacts(name, *cfg, art);
            } catch (const std::exception&) {
            }
        }
        return code;
    } catch (const std::exception& e) {
        std::cerr << geobeam::error_report(name, cfg ? &*cfg : nullptr, e, 1).dump(2) << "\n";
        return 1;
    }
}
