// gluecd: batch verification of curvature-dimension conditions for glued
// weighted manifolds.  Subcommands:
//   run <file|builtin> [--out DIR]   run a scenario, write report + CSVs
//   builtins                         list the built-in scenarios
//   describe <builtin>               print a builtin scenario file

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "gluecd/scenario.hpp"

namespace {

int run_command(const std::string& target, const std::string& outdir) {
    gluecd::Json doc;
    try {
        if (gluecd::is_builtin_scenario(target)) {
            doc = gluecd::Json::parse(gluecd::builtin_scenario_text(target));
        } else {
            std::ifstream in(target);
            if (!in) {
                std::cerr << "error: cannot open scenario file or builtin '" << target << "'\n";
                return 2;
            }
            doc = gluecd::Json::parse(in);
        }
    } catch (const gluecd::Json::parse_error& e) {
        std::cerr << "error: scenario is not valid JSON: " << e.what() << "\n";
        return 2;
    }

    try {
        const gluecd::Scenario sc = gluecd::parse_scenario(doc);
        const gluecd::RunReport rep = gluecd::run_scenario(sc);
        std::filesystem::create_directories(outdir);
        gluecd::write_report(rep, outdir);
        std::cout << rep.text(true);
        std::cout << "report written to " << outdir << "/" << rep.name << ".report.txt\n";
        return rep.exit_code;
    } catch (const gluecd::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const gluecd::ParseError& e) {
        std::cerr << "expression error: " << e.what() << "\n";
        return 2;
    } catch (const gluecd::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvature-dimension checks for glued weighted manifolds"};
    app.require_subcommand(1);

    std::string target, outdir = "reports";
    CLI::App* run = app.add_subcommand("run", "run a scenario file or builtin");
    run->add_option("scenario", target, "scenario file path or builtin name")->required();
    run->add_option("--out", outdir, "output directory for report and CSV files");

    CLI::App* list = app.add_subcommand("builtins", "list builtin scenarios");

    std::string describe_name;
    CLI::App* describe = app.add_subcommand("describe", "print a builtin scenario");
    describe->add_option("name", describe_name, "builtin name")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_command(target, outdir);
    if (list->parsed()) {
        for (const gluecd::BuiltinEntry& e : gluecd::builtin_scenarios())
            std::cout << e.name << " - " << e.summary << "\n";
        return 0;
    }
    if (describe->parsed()) {
        try {
            std::cout << gluecd::builtin_scenario_text(describe_name) << "\n";
            return 0;
        } catch (const gluecd::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
    }
    return 0;
}
