#pragma once

// Front end behind the `satfl` executable: plan, run and compare.
// Exit codes: 0 success, 2 validation/usage error, 1 internal error.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "satfl/scenario.hpp"

namespace satfl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;

struct RunManifest {
    std::string scenario_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> policy;
    std::optional<double> train_time_s;
    std::optional<double> horizon_h;
    std::vector<std::string> policies;  // compare only
};

// Loads the scenario and applies the command-line overrides.
Scenario resolve_scenario(const RunManifest& manifest);

// Each command computes everything in memory first and writes files only
// once all of it succeeded, so a failing command leaves no partial output.
int cmd_plan(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_run(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_compare(const RunManifest& manifest, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace satfl::cli
