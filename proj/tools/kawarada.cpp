#include <iostream>

#include "CLI11.hpp"
#include "kawarada/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Degenerate quenching solver with LOD splitting"};
    app.require_subcommand(1);

    kawarada::CommandOptions opts;
    std::uint64_t seed = 0;
    std::string out;
    std::string mode;
    double mag = 0.0;
    std::string resume;

    auto* run = app.add_subcommand("run", "integrate until quench or t_max and write traces");
    auto* verify = app.add_subcommand("verify", "dense checks of the operator properties on the grid");
    auto* stability = app.add_subcommand("stability", "twin-run perturbation growth against its envelope");
    auto* convergence = app.add_subcommand("convergence", "terminal states and T across step sizes");

    for (auto* sub : {run, verify, stability, convergence}) {
        sub->add_option("config", opts.config, "config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--out", out, "output path (run: file prefix)");
    }
    run->add_flag("--strict", opts.strict, "block on any failing guard");
    run->add_option("--resume", resume, "checkpoint to continue from");
    stability->add_option("--mode", mode, "frozen or live")->check(CLI::IsMember({"frozen", "live"}));
    stability->add_option("--mag", mag, "perturbation magnitude");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kawarada::exit_code::config;
    }

    auto* sub = app.get_subcommands().front();
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--out")) opts.out = out;
    if (sub == stability && sub->count("--mode")) opts.mode = mode;
    if (sub == stability && sub->count("--mag")) opts.mag = mag;
    if (sub == run && sub->count("--resume")) opts.resume = resume;

    if (sub == run) return kawarada::cmd_run(opts, std::cout, std::cerr);
    if (sub == verify) return kawarada::cmd_verify(opts, std::cout, std::cerr);
    if (sub == stability) return kawarada::cmd_stability(opts, std::cout, std::cerr);
    return kawarada::cmd_convergence(opts, std::cout, std::cerr);
}
