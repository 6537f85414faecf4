#pragma once

// Workflows behind the command-line front end. Each command_* function writes
// its artifacts below the output directory and returns a process exit code;
// the run_* functions are the pure computations they wrap.

#include "ionweave/config.hpp"
#include "ionweave/sideband.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ionweave {

struct CommandOptions {
    std::optional<std::filesystem::path> out;
    std::optional<OutputFormat> format;
    std::optional<double> threshold;
    std::optional<Sequence> sequence;
    bool compare = false;
    std::optional<std::filesystem::path> implemented_file; // fidelity from two matrix files
    std::optional<std::filesystem::path> target_file;
    std::optional<std::filesystem::path> config_path; // recorded in the metadata sidecar
    std::vector<std::string> argv;
};

TargetGraph require_target(const RunConfig& cfg);
DesignProblem make_design_problem(const RunConfig& cfg, const Chain& chain, const TargetGraph& target);

// The inline schedule, or the designer's schedule when the config says
// "schedule: design". The design solution is returned through *solution.
Schedule resolve_schedule(const RunConfig& cfg, const Chain& chain, DesignSolution* solution = nullptr);

struct EvolveResult {
    Schedule schedule; // after optional Rabi calibration
    ObservableTrace trace;
    std::optional<ThreeWayComparison> comparison;
};
EvolveResult run_evolution(const RunConfig& cfg, const Chain& chain);

BsbTraces run_bsb(const RunConfig& cfg, const Chain& chain);

struct SweepTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
SweepTable run_sweep(const RunConfig& cfg);

int command_modes(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int command_design(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int command_fidelity(const std::optional<RunConfig>& cfg, const CommandOptions& opt, std::ostream& log);
int command_evolve(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int command_bsb(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int command_sweep(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

// Full command line: parses arguments, runs one subcommand, maps exceptions
// to exit codes (0 ok, 1 validation, 2 infeasible design, 3 numerical).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace ionweave
