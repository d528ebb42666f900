#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hpz/error.hpp"

int main(int argc, char** argv) {
    using namespace hpz::cli;
    CLI::App app{"Quantum Brownian motion of a free particle: closed forms and oracles"};
    app.require_subcommand(1);
    app.set_version_flag("--version", code_version());

    std::string config, out = ".", format = "both";
    std::uint64_t seed = 0;
    unsigned threads = 1;
    const std::map<std::string, std::string> about{
        {"coefficients", "local frequency, damping and diffusion coefficients vs t"},
        {"fluctuations", "<X^2>, <XP>, <P^2> and the mean-square displacement vs t"},
        {"spread", "mean and variance of a wave packet vs t, optional density slice"},
        {"cat", "interference attenuation of a pair state and the fitted decoherence time"},
        {"reference", "successive-measurement curves: commutator, w^2, exact attenuation"},
        {"divergence", "zero-temperature <X^2> against log cutoff"},
        {"validate", "PDE, Monte Carlo and moment-ODE cross-checks (exit 2 on failure)"},
    };
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name, about.count(name) ? about.at(name) : "");
        sub->add_option("--config", config, "scenario JSON (env HPZ_CONFIG overrides)");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--seed", seed, "Monte Carlo seed");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
        sub->add_option("--format", format, "csv|json|both")->check(CLI::IsMember({"csv", "json", "both"}));
    }
    std::string run_a, run_b;
    auto* compare = app.add_subcommand("compare", "column-wise diff of two run directories");
    compare->add_option("run_a", run_a)->required();
    compare->add_option("run_b", run_b)->required();
    compare->add_option("--out", out, "directory for compare.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (compare->parsed()) {
        try {
            const auto report = compare_runs(run_a, run_b);
            std::cout << report.dump(2) << "\n";
            if (compare->count("--out")) {
                std::filesystem::create_directories(out);
                write_atomic(std::filesystem::path(out) / "compare.json", report.dump(2) + "\n");
            }
            return 0;
        } catch (const std::exception& e) {
            std::cerr << e.what() << "\n";
            return 1;
        }
    }

    const auto* sub = app.get_subcommands().front();
    if (const char* env = std::getenv("HPZ_CONFIG"); env && *env) config = env;
    if (config.empty()) {
        std::cerr << "config error: --config <path> is required\n";
        return 1;
    }
    RunOptions options;
    options.out_dir = out;
    options.threads = threads;
    if (sub->count("--seed")) options.seed = seed;
    options.format = format == "csv" ? Format::Csv : format == "json" ? Format::Json : Format::Both;
    return execute(sub->get_name(), config, options, std::cerr);
}
