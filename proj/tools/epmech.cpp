// Batch front end: runs config-driven sweeps, dynamics and figure presets and
// writes CSV/JSON data files for external plotting.
//
//   epmech run <config.json> [--out PATH] [--format csv|json] [--quiet]
//   epmech preset <fig2|fig3|fig4|fig5> [--out DIR] [--format csv|json] [--quiet]
//   epmech locate-ep <config.json> [--quiet]
//   epmech validate <config.json>
//
// Exit codes: 0 success, 1 validation failure, 2 computational failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "epmech/export.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw epmech::Error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int report(const epmech::RunOutput& out, bool quiet) {
    if (!quiet) {
        for (const auto& f : out.files)
            std::cout << "wrote " << f.string() << "\n";
        for (const auto& m : out.messages) std::cout << m << "\n";
    }
    for (const auto& e : out.errors) std::cerr << "error: " << e << "\n";
    return out.errors.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"non-Hermitian magno-optomechanics: spectra, exceptional points, dynamics"};
    app.require_subcommand(1);

    std::string config_path, out_path, format_name = "csv", preset_name;
    bool quiet = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "output file or directory");
        cmd->add_option("--format", format_name, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_flag("--quiet", quiet, "suppress non-error output");
    };

    auto* run_cmd = app.add_subcommand("run", "execute a config file");
    run_cmd->add_option("config", config_path, "JSON config document")->required();
    add_common(run_cmd);

    auto* preset_cmd = app.add_subcommand("preset", "run a figure preset");
    preset_cmd->add_option("name", preset_name, "fig2, fig3, fig4 or fig5")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig5"}));
    add_common(preset_cmd);

    auto* locate_cmd = app.add_subcommand("locate-ep", "root-find one exceptional point");
    locate_cmd->add_option("config", config_path, "JSON config document")->required();
    add_common(locate_cmd);

    auto* validate_cmd = app.add_subcommand("validate", "check a config file");
    validate_cmd->add_option("config", config_path, "JSON config document")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) {
            try {
                epmech::parse_config(read_file(config_path));
            } catch (const epmech::Error& e) {
                std::cerr << e.what() << "\n";
                return 1;
            }
            std::cout << "ok\n";
            return 0;
        }

        if (preset_cmd->parsed()) {
            const auto fmt = format_name == "json" ? epmech::OutputFormat::Json
                                                   : epmech::OutputFormat::Csv;
            const std::filesystem::path dir = out_path.empty() ? preset_name : out_path;
            return report(epmech::run_preset(preset_name, dir, fmt), quiet);
        }

        // run and locate-ep share the config-driven path.
        epmech::RunConfig cfg;
        try {
            cfg = epmech::parse_config(read_file(config_path));
        } catch (const epmech::Error& e) {
            std::cerr << e.what() << "\n";
            return 1;
        }
        if (locate_cmd->parsed() && cfg.mode != epmech::RunMode::LocateEP) {
            std::cerr << "locate-ep requires a config with mode 'locate_ep'\n";
            return 1;
        }
        if (!out_path.empty()) cfg.out = out_path;
        if (preset_cmd->count("--format") || run_cmd->count("--format") ||
            locate_cmd->count("--format"))
            cfg.format = format_name == "json" ? epmech::OutputFormat::Json
                                               : epmech::OutputFormat::Csv;
        const auto out = epmech::run_config(cfg, "out");
        return report(out, quiet);
    } catch (const epmech::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
