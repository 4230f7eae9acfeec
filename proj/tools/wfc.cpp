// Command-line front end: runs configured scenarios and writes CSV files.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wfc/config.hpp"
#include "wfc/scenario.hpp"
#include "wfc/verify.hpp"

namespace {

int run_sections(const std::vector<wfc::config::Section>& sections, wfc::scenario::Command command,
                 const std::filesystem::path& out_dir, std::optional<std::uint64_t> seed, unsigned jobs) {
    // Resolve everything first so that a bad section fails before any output.
    std::vector<wfc::scenario::Scenario> scenarios;
    for (const auto& section : sections) scenarios.push_back(wfc::scenario::resolve(section, command, seed));
    for (const auto& s : scenarios) {
        for (const auto& output : wfc::scenario::run(s, jobs)) {
            const auto path = out_dir / output.file_name;
            wfc::csv::write_atomic(path, output.table.str());
            std::cout << "wrote " << path.string() << " (" << output.table.rows.size() << " rows)\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Window flow control with random service: analytic bounds, exact oracle, simulation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* opt = sub->add_option("--config", config_path, "Scenario configuration file");
        if (needs_config) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory for CSV files");
        sub->add_option("--seed", seed, "Override the seed of every scenario");
        sub->add_option("--jobs", jobs, "Worker threads (0 = one per hardware thread)");
    };

    for (const auto command : {wfc::scenario::Command::ServiceCurve, wfc::scenario::Command::EffectiveCapacity,
                               wfc::scenario::Command::Backlog, wfc::scenario::Command::Simulate}) {
        const std::string name(wfc::scenario::command_name(command));
        add_common(app.add_subcommand(name, "Run the " + name + " computation for every section of --config"), true);
    }

    auto* verify = app.add_subcommand("verify", "Run the invariant suites and report pass/fail per suite");
    add_common(verify, false);
    std::string fault = "none";
    verify->add_option("--inject-fault", fault, "Deliberately break a computation (none, w-sign)")
        ->check(CLI::IsMember({"none", "w-sign"}));

    auto* reproduce = app.add_subcommand("reproduce", "Emit the data behind a canned figure scenario");
    std::string figure;
    reproduce->add_option("figure", figure, "fig4, fig5, fig6, fig7 or fig8")
        ->required()
        ->check(CLI::IsMember({"fig4", "fig5", "fig6", "fig7", "fig8"}));
    add_common(reproduce, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) {
            wfc::verify::Options options;
            options.seed = seed.value_or(1);
            options.jobs = jobs;
            options.fault = fault == "w-sign" ? wfc::verify::Fault::WindowSignFlip : wfc::verify::Fault::None;
            const auto results = wfc::verify::run_all(options);
            std::cout << wfc::verify::format_report(results);
            return wfc::verify::all_passed(results) ? 0 : 1;
        }
        if (reproduce->parsed()) {
            const auto command = wfc::scenario::figure_command(figure);
            const auto sections =
                config_path.empty()
                    ? wfc::config::parse(wfc::scenario::figure_config(figure), "configs/" + figure + ".conf")
                    : wfc::config::parse_file(config_path);
            return run_sections(sections, command, out_dir, seed, jobs);
        }
        for (auto* sub : app.get_subcommands()) {
            const auto command = wfc::scenario::parse_command(sub->get_name());
            return run_sections(wfc::config::parse_file(config_path), command, out_dir, seed, jobs);
        }
    } catch (const wfc::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
