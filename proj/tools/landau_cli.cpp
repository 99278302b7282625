// landau_cli: one subcommand per pipeline stage, all driven by an INI config.
//   landau_cli <subcommand> [--config run.ini] [--output-dir DIR]
// exit codes: 0 ok, 2 config error, 3 missing prerequisite, 4 numerical failure

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "landau/config.hpp"
#include "landau/errors.hpp"
#include "landau/harness.hpp"
#include "landau/parallel.hpp"

int main(int argc, char** argv) {
    landau::select_blas_kernel(argv);
    std::setvbuf(stdout, nullptr, _IOLBF, 0);

    CLI::App app{"Relativistic Landau hydrodynamic-limit solver"};
    app.require_subcommand(1, 1);
    std::string config_path, output_dir;
    for (const auto& [name, fn] : landau::subcommands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "INI config file (defaults apply when omitted)");
        sub->add_option("-o,--output-dir", output_dir, "overrides output_dir from the config");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        landau::configure_blas_threads();
        landau::RunConfig cfg = config_path.empty() ? landau::RunConfig{} : landau::load_config(config_path);
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        landau::validate(cfg);
        const std::string name = app.get_subcommands().front()->get_name();
        for (const auto& [n, fn] : landau::subcommands())
            if (n == name) {
                std::printf("%s (config %s)\n", name.c_str(), landau::config_hash(cfg).substr(0, 12).c_str());
                const auto res = fn(cfg);
                std::printf("wrote %zu files to %s\n", res.files.size() + 1, cfg.output_dir.c_str());
            }
        return 0;
    } catch (const landau::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const landau::PrerequisiteMissing& e) {
        std::fprintf(stderr, "missing prerequisite: %s\n", e.what());
        return 3;
    } catch (const landau::NumericalFailure& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}
