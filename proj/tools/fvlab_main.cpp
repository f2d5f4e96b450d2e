#include <CLI11.hpp>
#include <iostream>

#include "fvlab/config_file.hpp"
#include "fvlab/errors.hpp"
#include "fvlab/experiment.hpp"

namespace {

// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 invariant violation.
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitInvariant = 3;

struct Override {
    std::string section, key, value;
};

Override parse_override(const std::string& spec) {
    const auto dot = spec.find('.');
    const auto eq = spec.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq)
        throw fvlab::ConfigError("--set expects section.key=value, got \"" +
                                 spec + "\"");
    return {spec.substr(0, dot), spec.substr(dot + 1, eq - dot - 1),
            spec.substr(eq + 1)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fvlab: finite volume solver laboratory for stiff-relaxation "
                 "and spacetime conservation laws"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "configuration file (key = value)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "seed for all sampling");
    app.add_option("--set", overrides,
                   "override a config entry as section.key=value");

    // Ergonomic aliases for the most common knobs of each subcommand; they
    // map onto the same config keys as --set.
    struct Alias {
        std::string flag, section, key, description;
    };
    const std::vector<std::pair<std::string, std::vector<Alias>>> subs = {
        {"models-check",
         {{"--model", "models-check", "model", "model id or \"all\""},
          {"--samples", "models-check", "samples", "sample count"},
          {"--enforce", "models-check", "enforce", "fail (exit 3) on violation"}}},
        {"effective",
         {{"--model", "effective", "model", "model id"},
          {"--count", "effective", "count", "number of sampled equilibria"}}},
        {"run-hll",
         {{"--model", "run-hll", "model", "model id"},
          {"--cells", "run-hll", "cells", "cell count"},
          {"--length", "run-hll", "length", "domain length"},
          {"--final-time", "run-hll", "final_time", "final time"},
          {"--safety", "run-hll", "safety", "CFL safety factor"}}},
        {"run-ap",
         {{"--model", "run-ap", "model", "model id"},
          {"--cells", "run-ap", "cells", "cell count"},
          {"--epsilon", "run-ap", "epsilon", "relaxation scale"},
          {"--final-time", "run-ap", "final_time", "late final time"},
          {"--sigma-rule", "run-ap", "sigma_rule", "target-diffusion | zero"}}},
        {"run-parabolic",
         {{"--model", "run-parabolic", "model", "model id"},
          {"--cells", "run-parabolic", "cells", "cell count"},
          {"--final-time", "run-parabolic", "final_time", "final time"}}},
        {"compare-asymptotic",
         {{"--model", "compare-asymptotic", "model", "model id"},
          {"--cells", "compare-asymptotic", "cells", "cell count"},
          {"--epsilons", "compare-asymptotic", "epsilons",
           "comma list of epsilon values"},
          {"--final-time", "compare-asymptotic", "final_time", "late final time"}}},
        {"run-spacetime",
         {{"--preset", "run-spacetime", "preset",
           "flat-burgers | variable-coefficient | pullback-shear"},
          {"--elements", "run-spacetime", "elements", "elements per slab"},
          {"--final-time", "run-spacetime", "final_time", "final time"},
          {"--theta-jitter", "run-spacetime", "theta_jitter",
           "node jitter fraction"},
          {"--kruzkov-count", "run-spacetime", "kruzkov_count",
           "entropy residual parameters"}}},
        {"convergence",
         {{"--model", "convergence", "model", "model id"},
          {"--epsilon", "convergence", "epsilon", "relaxation scale"},
          {"--base-cells", "convergence", "base_cells", "coarsest cell count"},
          {"--levels", "convergence", "levels", "number of refinements"}}},
    };

    std::map<std::string, std::map<std::string, std::string>> alias_values;
    for (const auto& [name, aliases] : subs) {
        CLI::App* sub = app.add_subcommand(name);
        for (const auto& a : aliases)
            sub->add_option(a.flag, alias_values[name][a.section + "." + a.key],
                            a.description);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        fvlab::ConfigFile cfg;
        if (!config_path.empty()) cfg = fvlab::ConfigFile::load(config_path);
        for (const auto& spec : overrides) {
            const Override o = parse_override(spec);
            cfg.set(o.section, o.key, o.value);
        }
        const std::string sub = app.get_subcommands().front()->get_name();
        for (const auto& [path, value] : alias_values[sub]) {
            if (value.empty()) continue;
            const auto dot = path.find('.');
            cfg.set(path.substr(0, dot), path.substr(dot + 1), value);
        }
        if (cfg.has("run", "seed") && !app.count("--seed"))
            seed = static_cast<std::uint64_t>(cfg.get_num("run", "seed", 0));

        const auto outcome = fvlab::run_experiment(sub, cfg, out_dir, seed);
        for (const auto& path : outcome.artifacts)
            std::cout << "wrote " << path << "\n";
        return 0;
    } catch (const fvlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fvlab::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const fvlab::InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
