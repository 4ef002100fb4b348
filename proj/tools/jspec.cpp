#include "jspec/errors.hpp"
#include "jspec/io.hpp"
#include "jspec/runner.hpp"

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>
#include <omp.h>

int main(int argc, char** argv) {
    CLI::App app{"Spectral experiments for Jacobi matrices with periodically modulated entries"};
    app.footer(jspec::command_help());
    std::string command, config_path, family, z, out;
    jspec::index_t n = 0;
    app.add_option("command", command, "spectrum | density | cauchy | classify | levinson | kernel | stieltjes | gapcount")
        ->required();
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--family", family, "builtin family name (overrides the config)");
    app.add_option("--n", n, "matrix index n (overrides the config)");
    app.add_option("--z", z, "complex point such as 0+1i (overrides the config)");
    app.add_option("--out", out, "output directory (overrides the config)");
    CLI11_PARSE(app, argc, argv);

    if (const char* t = std::getenv("JSPEC_THREADS")) {
        const int k = std::atoi(t);
        if (k > 0) omp_set_num_threads(k);
    }

    try {
        jspec::RunConfig cfg = config_path.empty() ? jspec::default_run_config(command)
                                                   : jspec::parse_run_config(jspec::read_file(config_path));
        if (!cfg.command.empty() && cfg.command != command)
            throw jspec::Error(jspec::ErrorCode::Config,
                               "config is for command '" + cfg.command + "', not '" + command + "'");
        cfg.command = command;
        if (!family.empty()) {
            cfg.family = family;
            cfg.family_options.clear();
        }
        if (n > 0) {
            cfg.n = n;
            cfg.n_grid.clear();
        }
        if (!z.empty()) cfg.z = {jspec::parse_complex(z)};
        if (!out.empty()) cfg.out = out;
        jspec::finalize_config(cfg);
        return jspec::run(cfg, std::cout);
    } catch (const jspec::Error& e) {
        std::cerr << "jspec: " << e.what() << '\n';
        return e.code() == jspec::ErrorCode::Config ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "jspec: " << e.what() << '\n';
        return 3;
    }
}
