#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qwalk/commands.hpp"
#include "qwalk/errors.hpp"

namespace {

struct Cli {
    std::string config_path;
    std::string out_dir = ".";
    std::string plots = "on";
    int threads = 0;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Cli& cli) {
    cmd->add_option("--config", cli.config_path, "experiment configuration file (JSON)")
        ->required();
    cmd->add_option("--seed", cli.seed, "override the seed from the config file");
    cmd->add_option("--threads", cli.threads, "worker threads (0 = all cores)");
    cmd->add_option("--out", cli.out_dir, "output directory");
    cmd->add_option("--plots", cli.plots, "write SVG plots")
        ->check(CLI::IsMember({"on", "off"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete-time quantum walk localization toolkit"};
    app.require_subcommand(1);

    Cli cli;
    std::string ml_action;
    CLI::App* simulate = app.add_subcommand("simulate", "evolve one walk and export P(x,t)");
    CLI::App* sweep = app.add_subcommand("sweep", "scan randomness and run the detectors");
    CLI::App* ml = app.add_subcommand("ml", "train/apply the classifiers");
    CLI::App* scaling = app.add_subcommand("scaling", "critical value vs size and exponents");
    for (CLI::App* cmd : {simulate, sweep, ml, scaling}) add_common(cmd, cli);
    ml->add_option("subaction", ml_action, "train | scan | samplesize | regions")->required();

    CLI11_PARSE(app, argc, argv);

    using namespace qwalk;
    try {
        const cli::ExperimentConfig config = cli::load_config(cli.config_path);
        cli::RunOptions options;
        options.out_dir = cli.out_dir;
        options.plots = cli.plots == "on";
        options.threads = cli.threads;
        options.seed_override = cli.seed;
        if (simulate->parsed()) return cli::cmd_simulate(config, options);
        if (sweep->parsed()) return cli::cmd_sweep(config, options);
        if (ml->parsed()) return cli::cmd_ml(config, options, ml_action);
        return cli::cmd_scaling(config, options);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return cli::kExitConfig;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cli::kExitFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return cli::kExitFailure;
    }
}
