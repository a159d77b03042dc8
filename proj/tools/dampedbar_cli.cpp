// dampedbar: command-line front end. See README.md for commands and schemas.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dampedbar/cli.hpp"

namespace fs = std::filesystem;
using namespace dampedbar;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modal and finite element analysis of a bar with viscous end dampers"};
    app.set_help_flag("-h,--help", "Print help and exit");

    std::string command;
    std::string config_path;
    std::string out_dir;
    std::string format = "csv";
    int k = -1;
    int elements = -1;
    double dt = -1.0;
    double t_final = -1.0;
    bool quiet = false;

    std::string names;
    for (const auto& n : command_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("command", command, "One of: " + names)->required();
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "Directory for result files (default: tables to stdout)");
    app.add_option("--k", k, "Series truncation: modes n = -k..k")->check(CLI::NonNegativeNumber);
    app.add_option("--elements", elements, "Finite element count")->check(CLI::PositiveNumber);
    app.add_option("--dt", dt, "FEM time step")->check(CLI::PositiveNumber);
    app.add_option("--t-final", t_final, "FEM end time")->check(CLI::NonNegativeNumber);
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--quiet", quiet, "Suppress the summary on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInvalidConfig;
    }

    try {
        const auto& known = command_names();
        if (std::find(known.begin(), known.end(), command) == known.end())
            throw InvalidInput("unknown command '" + command + "' (expected one of: " + names + ")");

        RunConfig rc;
        if (!config_path.empty()) rc = parse_config(read_file(config_path));
        else if (!is_preset(command)) throw InvalidInput("command '" + command + "' needs --config");
        if (k >= 0) rc.k = k;
        if (elements > 0) rc.fem.elements = elements;
        if (dt > 0.0) rc.fem.dt = dt;
        if (t_final >= 0.0) rc.fem.t_final = t_final;

        const CommandOutput result = run_command(command, rc);
        const bool json = format == "json";
        if (!out_dir.empty()) fs::create_directories(out_dir);
        for (const NamedTable& nt : result.tables) {
            const std::string text = json ? to_json(nt.table) : to_csv(nt.table);
            if (out_dir.empty()) {
                if (result.tables.size() > 1) std::cout << "# " << nt.name << '\n';
                std::cout << text;
            } else {
                const fs::path path = fs::path(out_dir) / (nt.name + (json ? ".json" : ".csv"));
                write_file(path, text);
                if (!quiet) std::cerr << "wrote " << path.string() << " (" << nt.table.rows.size() << " rows)\n";
            }
        }
        if (result.exit_code == kExitVerifyFailed && !quiet) std::cerr << "verify: one or more checks failed\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "dampedbar: " << e.what() << '\n';
        return exit_code_for(e);
    }
}
