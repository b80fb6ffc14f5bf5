#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "porofem/bench.hpp"

namespace porofem {

// Parsed run configuration: flat key=value lines with optional
// [experiment <name>] section headers.  A section-less file whose keys
// include `problem` declares a single implicit experiment.  Unknown keys are
// hard errors.
struct RunConfig {
    std::vector<ExperimentSpec> experiments;
    std::string out_dir;  // empty = unset (resolution: flag > config > env > "reports")
    int threads = 1;
    std::uint64_t seed = 1;
    bool verify_jacobian = true;
    bool verify_kinematics = true;
    bool verify_consistency = true;
};

// Throws ConfigError with a line number on parse errors and with the
// offending name on validation errors.
RunConfig parse_config(std::string_view text);

// Executes the experiments (optionally in parallel) and writes summary.csv
// and iterations.csv into out_dir atomically.  Returns the rows in spec
// order; `all_ok` is true when every row converged or was marked
// expect = any in the config.
struct RunOutcome {
    std::vector<ReportRow> rows;
    bool all_ok = true;
};
RunOutcome run_all(const RunConfig &config, const std::string &out_dir);

}  // namespace porofem
