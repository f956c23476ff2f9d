#include <iostream>

#include <CLI11.hpp>

#include "torusdyn/harness/commands.hpp"

int main(int argc, char** argv) {
    using namespace torusdyn::harness;
    CLI::App app{"torusdyn: numerical experiments on lifts of torus diffeomorphisms"};
    app.require_subcommand(1);

    std::string config_path;
    RunOptions options;
    std::string out_dir = "torusdyn-out";
    std::uint64_t seed = 0;
    unsigned threads = 1;

    auto* run = app.add_subcommand("run", "run the command described by a config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory")->capture_default_str();
    auto* seed_opt = run->add_option("--seed", seed, "override [run] seed");
    run->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    options.out_dir = out_dir;
    if (*seed_opt) options.seed = seed;
    options.threads = threads;
    return run_config_file(config_path, options, std::cout);
}
