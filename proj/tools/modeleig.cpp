// modeleig: command-line front end. Flags mirror the keys of the flat config
// file accepted by --config; flags given on the command line win.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <unistd.h>

#include "CLI11.hpp"
#include "modeleig/cli.hpp"

namespace {

struct Command {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
};

constexpr const char* kDescriptions[][2] = {
    {"model-eigen", "first Dirichlet eigenvalue of the model density"},
    {"check-density", "validate the CD(K,N) condition for a density"},
    {"compare", "one-dimensional comparison residual against the model eigenpair"},
    {"rigidity", "decide whether the comparison is rigid for a density"},
    {"neumann-bound", "upper bound on the j-th Neumann eigenvalue"},
    {"ess-spectrum", "threshold of the essential-spectrum window"},
    {"kk-bound", "optimal spin-2 Kaluza-Klein mass bound"},
    {"sweep", "model eigenvalue and closed-form bound over a parameter range"},
};

bool is_flag_key(const std::string& k) { return k == "waive-cd" || k == "profile"; }

} // namespace

int main(int argc, char** argv)
{
    namespace mc = modeleig::cli;

    CLI::App app{"Sharp first Dirichlet eigenvalues of model CD(K,N) densities"};
    app.set_version_flag("--version", mc::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string format;
    std::string tol;
    std::string out;
    app.add_option("--config", config_path, "flat key = value file mirroring the flags");
    app.add_option("--format", format, "json, csv or human")->check(CLI::IsMember({"json", "csv", "human"}));
    app.add_option("--tol", tol, "solver tolerance override");
    app.add_option("--out", out, "write the report to PATH");
    app.fallthrough();

    std::map<std::string, Command> commands;
    for (const auto& [name, help] : kDescriptions) {
        Command& c = commands[name];
        c.app = app.add_subcommand(name, help);
        for (const auto& key : mc::command_keys().at(name)) {
            if (is_flag_key(key)) {
                c.app->add_flag("--" + key, c.flags[key]);
            } else {
                c.app->add_option("--" + key, c.values[key]);
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : modeleig::kExitPrecondition;
    }

    mc::RunConfig cfg;
    for (auto& [name, c] : commands) {
        if (c.app->parsed()) cfg.command = name;
    }
    Command& cmd = commands.at(cfg.command);
    const char* no_color = std::getenv("NO_COLOR");
    cfg.color = isatty(STDOUT_FILENO) && !(no_color && *no_color);
    if (cfg.command == "sweep") cfg.format = mc::Format::csv;

    try {
        if (!config_path.empty()) {
            for (const auto& [k, v] : mc::read_config_file(config_path)) mc::apply_setting(cfg, k, v);
        }
        if (app.count("--format")) mc::apply_setting(cfg, "format", format);
        if (app.count("--tol")) mc::apply_setting(cfg, "tol", tol);
        if (app.count("--out")) mc::apply_setting(cfg, "out", out);
        for (const auto& [k, v] : cmd.values) {
            if (cmd.app->count("--" + k)) mc::apply_setting(cfg, k, v);
        }
        for (const auto& [k, v] : cmd.flags) {
            if (cmd.app->count("--" + k)) mc::apply_setting(cfg, k, v ? "true" : "false");
        }
    } catch (const modeleig::Error& e) {
        std::cerr << "modeleig: error [" << e.code() << "]: " << e.what() << '\n';
        return e.exit_status();
    }
    return mc::run_command(cfg, std::cout, std::cerr);
}
