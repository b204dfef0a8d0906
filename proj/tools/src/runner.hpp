#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spec.hpp"

namespace loglattice::cli {

struct Flags {
    /// Extra enlargement rounds on top of the three windows every check already uses.
    int window_grow = 0;
    std::optional<int> depth;
    std::optional<std::vector<int>> delta;
    /// Permutes the evaluation order of items (and draws the random catalog of `verify`).
    std::optional<std::uint64_t> seed;
    /// Skipped suites count as failures.
    bool strict_exit = false;
    /// Emit per item wall time.
    bool timing = true;
};

/// Commands taking a spec file.
const std::vector<std::string>& spec_commands();

struct RunResult {
    json report;
    int exit_code = 0;
};

/// Runs tower / irregularity / cohomology / kclass / rees / verify on one spec.
/// Throws SchemaError when the command does not apply to the spec's mode.
RunResult run_command(const std::string& command, SpecDocument spec, const Flags& flags);

/// `verify` without a spec: the acceptance criteria on the built-in catalogs.
RunResult run_acceptance_command(const Flags& flags);

/// Plain text table of a stored report. Throws SchemaError when it is not a report.
std::string pretty_report(const json& report);

/// 0 when every item passed (and, under strict, none was skipped).
int exit_code_of(const json& report, bool strict);

/// Copy of a report with every timing field removed.
json without_timing(json report);

}  // namespace loglattice::cli
