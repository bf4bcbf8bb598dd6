#include "sheath/app.hpp"
#include "sheath/config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    CLI::App app{"Plasma sheath boundary-layer toolkit"};
    app.require_subcommand(1);
    std::string config_path, output_dir;
    int jobs = 0;
    bool seed_free = true;
    app.add_flag("--seed-free", seed_free, "Documents that no random numbers are used (always true)");

    const std::pair<const char*, const char*> commands[] = {
        {"profile", "Leading-order sheath profile"},
        {"limit", "Quasineutral limit Euler run"},
        {"simulate", "Full Euler-Poisson run with energy history"},
        {"converge", "Epsilon sweep against the limit and the expansion"},
        {"entropy", "Relative entropy history against the expansion"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "Configuration file (key = value)")->required()->check(CLI::ExistingFile);
        sub->add_option("--output", output_dir, "Output directory (overrides output_dir)");
        if (std::string(name) == "converge") sub->add_option("--jobs", jobs, "Concurrent epsilon runs")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    std::ifstream in(config_path);
    std::stringstream text;
    text << in.rdbuf();
    sheath::ConfigResult parsed = sheath::parse_config(text.str());
    if (parsed.ok() && sheath::mode_name(parsed.config.mode) != command) {
        parsed.errors.push_back({0, "mode: config selects '" + sheath::mode_name(parsed.config.mode) +
                                        "' but the command is '" + command + "'"});
    }
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors) std::cerr << config_path << ": " << e.str() << '\n';
        return 1;
    }
    sheath::RunConfig cfg = parsed.config;
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (jobs > 0) cfg.jobs = jobs;
    return sheath::dispatch(cfg, std::cout, std::cerr);
}
