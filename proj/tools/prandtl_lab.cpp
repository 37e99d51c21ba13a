// prandtl_lab <subcommand> --config <path> [--out <dir>] [--seed <int>]
//
// Exit codes: 0 every enabled check passes, 1 a check fails, 2 configuration
// error, 3 solver divergence.

#include <prandtl/pipeline.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>

int main(int argc, char** argv) {
    using namespace prandtl;
    CLI::App app{"Numerical laboratory for the regularized Prandtl perturbation equation"};
    app.require_subcommand(0, 1);
    bool reference = false;
    app.add_flag("--config-reference", reference, "print the table of configuration keys and exit");

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    const std::map<std::string, std::string> about{
        {"shear-check", "validate the initial shear and scan its persistence time"},
        {"solve", "run the Picard solver and write the trajectory"},
        {"verify", "run the checks listed in verify.checks"},
        {"norms", "write the Gevrey and full norm time series"},
        {"full", "shear-check, solve, norms and verify in one run"}};
    for (const auto& name : subcommands()) {
        auto* sub = app.add_subcommand(name, about.count(name) ? about.at(name) : "");
        sub->add_option("--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "artifact directory (overrides output.directory)");
        sub->add_option("--seed", seed, "random seed (overrides verify.seed)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_pass : exit_config_error;
    }
    if (reference) {
        std::cout << config_reference();
        return exit_pass;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return exit_config_error;
    }
    const std::string subcommand = app.get_subcommands().front()->get_name();

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error:\n" << e.what() << "\n";
        return exit_config_error;
    }
    if (!out_dir.empty()) cfg.output.directory = out_dir;
    if (seed) cfg.verify.seed = *seed;
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";

    const RunResult res = run(cfg, subcommand, std::cerr);
    for (const auto& r : res.reports) std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "\n";
    if (!res.error.empty()) std::cerr << "error: " << res.error << "\n";
    if (!res.manifest.empty()) std::cout << "manifest: " << res.manifest.string() << "\n";
    return res.exit_code;
}
