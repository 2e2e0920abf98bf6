#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "chernoff/errors.hpp"
#include "chernoff/experiments.hpp"

// Exit codes: 0 all checks passed, 10+i first failing check, 64 usage or
// config-schema problems, 70 internal failures (oracle breakdown, file IO).

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for Chernoff product-formula approximations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    CLI::App* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("config", config_path, "path to the experiment config JSON")->required();
    run->add_option("--out", out_dir, "directory for report.csv and summary.json "
                                      "(defaults to the config's output_dir, then .)");
    run->add_option("--jobs", jobs, "worker threads; outputs are byte-identical "
                                    "for every value")
        ->check(CLI::PositiveNumber);

    CLI::App* presets =
        app.add_subcommand("presets", "Print the built-in presets catalog as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (presets->parsed()) {
            std::fputs(chernoff::presets_catalog_json().c_str(), stdout);
            return 0;
        }
        std::ifstream in(config_path, std::ios::binary);
        if (!in) {
            std::fprintf(stderr, "error: cannot read config file '%s'\n",
                         config_path.c_str());
            return 64;
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();

        chernoff::ExperimentOutcome outcome =
            chernoff::run_experiment_json(buffer.str(), out_dir, jobs);
        for (const auto& check : outcome.checks)
            std::printf("%s  %-28s %s\n", check.passed ? "PASS" : "FAIL",
                        check.name.c_str(), check.detail.c_str());
        for (const auto& file : outcome.files_written)
            std::printf("wrote %s\n", file.c_str());
        return outcome.exit_code();
    } catch (const chernoff::UsageError& e) {
        std::fprintf(stderr, "config error at %s\n", e.what());
        return 64;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 70;
    }
}
