#include "amc/commands.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>
#include <optional>

int main(int argc, char** argv) {
    CLI::App app{"Anomalous-diffusion mobile molecular channel: analysis, simulation and AIR"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(amc::kToolVersion));

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> variant;
    std::optional<std::string> closed_form;
    std::optional<std::string> scheme;
    std::optional<unsigned> threads;

    app.add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Master seed for the particle simulation");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--variant", variant, "Density normalization")
        ->check(CLI::IsMember({"printed", "normalized"}));
    app.add_option("--closed-form", closed_form, "Mobile closed form")
        ->check(CLI::IsMember({"printed", "corrected"}));
    app.add_option("--scheme", scheme, "Increment scheme")
        ->check(CLI::IsMember({"paper-iid", "exact"}));
    app.add_option("--threads", threads, "Worker threads for the particle simulation")
        ->check(CLI::PositiveNumber);

    using Command = std::function<amc::CommandResult(const amc::ExperimentConfig&, std::ostream&)>;
    const std::map<std::string, std::pair<std::string, Command>> commands = {
        {"fhtd", {"First hitting time densities over time", amc::cmd_fhtd}},
        {"hitting", {"Hitting probability curves", amc::cmd_hitting}},
        {"distance-pdf", {"TX-RX distance density at the sampling instant", amc::cmd_distance_pdf}},
        {"simulate", {"Particle-based simulation of hit times", amc::cmd_simulate}},
        {"air", {"Mutual information curves and achievable rates", amc::cmd_air}},
        {"validate", {"Run the oracle suite and write a report", amc::cmd_validate}},
    };
    for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return amc::kExitConfig;
    }

    amc::ExperimentConfig config;
    try {
        if (!config_path.empty()) config = amc::load_config(config_path);
        if (seed) config.seed = *seed;
        if (out_dir) config.out_dir = *out_dir;
        if (variant) config.variant = amc::parse_variant(*variant);
        if (closed_form) config.closed_form = amc::parse_closed_form(*closed_form);
        if (scheme) config.scheme = amc::parse_scheme(*scheme);
        if (threads) config.threads = *threads;
        config.validate();
    } catch (const amc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return amc::kExitConfig;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return commands.at(name).second(config, std::cerr).exit_code;
    } catch (const amc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return amc::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return amc::kExitValidation;
    }
}
