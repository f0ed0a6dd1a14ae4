// pilotguard <fig1|fig2|detect> [--config <path>] [overrides] [--out <path>]
//
// Exit codes: 0 success, 1 invalid configuration, 2 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pilotguard/experiment.hpp"

namespace {

struct Override {
    const char* flag;
    const char* key;
    const char* help;
    std::optional<std::string> value;
};

std::vector<Override> make_overrides() {
    return {
        {"--seed", "seed", "RNG seed", {}},
        {"--trials", "trials", "Monte Carlo trials per sweep point", {}},
        {"--trials-r0", "trials_r0", "trials for the R0 estimate (fig1, fig2)", {}},
        {"--n-list", "n_list", "antenna counts, comma separated (fig1)", {}},
        {"--n", "n", "antenna count (fig2, detect)", {}},
        {"--zeta-list", "zeta_list", "correlation factors, comma separated (fig2)", {}},
        {"--zeta", "zeta", "correlation factor (detect)", {}},
        {"--sigma-h2", "sigma_h2", "per-entry variance of H", {}},
        {"--sigma-g2", "sigma_g2", "per-entry variance of G1, G2", {}},
        {"--sigma-q2", "sigma_q2", "per-entry variance of the random-Q perturbation", {}},
        {"--gamma", "gamma", "estimation-noise power (list for detect)", {}},
        {"--delta", "delta", "quantizer guard band(s) (detect)", {}},
        {"--epsilon", "epsilon", "trace-check relative tolerance (detect)", {}},
        {"--key-bits", "key_bits", "target key length M (detect)", {}},
        {"--rate-fraction", "rate_fraction", "R_S / R0 (fig1, fig2)", {}},
        {"--both-phases", "both_phases", "baseline attacker also transmits in phase 1", {}},
        {"--modes", "modes", "attack modes, comma separated (detect)", {}},
        {"--workers", "workers", "worker threads (does not change results)", {}},
    };
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pilot-contamination detection and secrecy-outage experiments"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_path;
    std::vector<Override> overrides = make_overrides();
    std::vector<CLI::App*> subs;
    for (const char* name : {"fig1", "fig2", "detect"}) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("--config", config_path, "config file (key = value, [experiment] sections)");
        sub->add_option("--out", out_path, "output CSV path (default: stdout)");
        for (auto& o : overrides) sub->add_option(o.flag, o.value, o.help);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        const auto kind = pilotguard::parse_experiment_kind(name);
        auto cfg = pilotguard::ExperimentConfig::defaults(kind);
        if (!config_path.empty()) {
            pilotguard::apply_config(cfg, pilotguard::load_config_file(config_path, kind));
        }
        pilotguard::RawConfig flags;
        for (const auto& o : overrides) {
            if (o.value) flags[o.key] = *o.value;
        }
        pilotguard::apply_config(cfg, flags);
        pilotguard::validate(cfg);

        const auto result = pilotguard::run_experiment(
            cfg, [](const std::string& msg) { std::cerr << msg << "\n"; });
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

        if (out_path.empty()) {
            pilotguard::write_csv(std::cout, result);
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot open output '" << out_path << "'\n";
                return 1;
            }
            pilotguard::write_csv(out, result);
        }
    } catch (const pilotguard::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const pilotguard::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
