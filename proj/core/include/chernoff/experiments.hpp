#ifndef CHERNOFF_EXPERIMENTS_HPP
#define CHERNOFF_EXPERIMENTS_HPP

#include <string>
#include <vector>

namespace chernoff {

// One asserted statement inside an experiment run.
struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;  // the numbers behind the verdict
};

struct ExperimentOutcome {
    std::string command;
    std::vector<CheckOutcome> checks;
    std::vector<std::string> files_written;  // absolute or out-dir-relative paths
    std::string summary_json;                // what went into summary.json

    bool all_passed() const;
    // 0 when everything passed, otherwise 10 + index of the first failed
    // check (matching the order in `checks`).
    int exit_code() const;
};

// Parses a config document and runs the named command.  Artifacts
// (report.csv, summary.json) are written to out_dir_override when
// non-empty, else to the config's output_dir, else to the current
// directory.  jobs > 1 parallelizes row-independent work; results are
// byte-identical regardless.  Schema problems raise UsageError whose
// message starts with a JSON pointer to the offending field.
ExperimentOutcome run_experiment_json(const std::string& config_text,
                                      const std::string& out_dir_override = "",
                                      int jobs = 1);

// Catalog of built-in presets (rate functions, slow vectors, matrix and
// parabolic scenarios) as a JSON document.
std::string presets_catalog_json();

}  // namespace chernoff

#endif
