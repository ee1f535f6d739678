// nhse-lab: runs spectrum / evolve / walk / report experiments from a JSON config.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "nhse/errors.hpp"
#include "nhse/experiments.hpp"
#include "nhse/kernels.hpp"

namespace {

using namespace nhse;

int thread_cap_from_env()
{
    const char* env = std::getenv("NHSE_LAB_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) throw std::invalid_argument("NHSE_LAB_THREADS must be a positive integer");
    return static_cast<int>(n);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Non-Hermitian lattice and quantum-walk laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<int> nk, steps;
    std::optional<std::uint64_t> seed;

    const char* names[] = {"spectrum", "evolve", "walk", "report"};
    const char* help[] = {"PBC/OBC spectra and spectral area", "wave-packet evolution and acceleration fit",
                          "fiber-loop quantum walk", "acceleration law across seeded random models"};
    for (int i = 0; i < 4; ++i) {
        auto* sub = app.add_subcommand(names[i], help[i]);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--nk", nk, "Brillouin-zone samples (overrides config)");
        sub->add_option("--steps", steps, "walk steps (overrides config, walk only)");
        sub->add_option("--seed", seed, "random-model seed (overrides config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : experiments::validation_error;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        kernels::set_thread_limit(thread_cap_from_env());

        io::ExperimentConfig cfg = io::load_config(config_path);
        const io::Kind expected = cmd == "spectrum" ? io::Kind::spectrum
                                  : cmd == "evolve" ? io::Kind::evolve
                                  : cmd == "walk"   ? io::Kind::walk
                                                    : io::Kind::accel_report;
        if (cfg.kind != expected)
            throw std::invalid_argument("subcommand '" + cmd + "' does not match config kind '" +
                                        io::kind_name(cfg.kind) + "'");
        if (nk) cfg.nk = *nk;
        if (seed) cfg.seed = *seed;
        if (steps) {
            if (!cfg.walk) throw std::invalid_argument("--steps applies to walk configs only");
            cfg.walk->steps = *steps;
        }
        cfg.validate();

        const auto result = experiments::run(cfg, out_dir);
        for (const auto& w : result.warnings) std::cerr << "nhse-lab: warning: " << w << "\n";
        for (const auto& f : result.files) std::cout << out_dir << "/" << f << "\n";
        return result.exit_code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "nhse-lab: invalid input: " << e.what() << "\n";
        return experiments::validation_error;
    } catch (const NumericalError& e) {
        std::cerr << "nhse-lab: numerical failure: " << e.what() << "\n";
        return experiments::numerical_failure;
    } catch (const std::exception& e) {
        std::cerr << "nhse-lab: error: " << e.what() << "\n";
        return experiments::numerical_failure;
    }
}
