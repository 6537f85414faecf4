#pragma once

#include "ionweave/chain.hpp"
#include "ionweave/coupling.hpp"
#include "ionweave/designer.hpp"
#include "ionweave/spin.hpp"
#include "ionweave/targets.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ionweave {

// Either a built-in generator with numeric parameters or a file.
struct TargetSpec {
    std::string builtin; // cross_polytope, leaves_only_tree, cayley_tree_c36, triangular_torus
    std::map<std::string, double> parameters;
    std::optional<std::filesystem::path> file;
    TargetFileFormat format = TargetFileFormat::automatic;

    bool operator==(const TargetSpec&) const = default;
};

// Builds the target; the ion count fills in a missing "n" for generators that take one.
TargetGraph build_target(const TargetSpec& spec, int ion_count);

struct DesignSettings {
    std::vector<int> modes; // 0-based, empty = all
    DetuningGrid grid;
    int k_max = 8;
    int max_layers = 0;
    double closure_tolerance = 0.05;
    double rabi = 1e6;
    double phase = 0.0;
    double min_relative_weight = 0.02;
    double max_detuning_fraction = 0.5;
    double threshold = 0.0;
};

enum class Sequence { ising, floquet_xy, floquet_xyz, static_hamiltonian };
std::string_view sequence_name(Sequence s);

struct DynamicsSettings {
    Sequence sequence = Sequence::ising;
    int repetitions = 0;                 // 0: use schedule.repetitions
    std::string initial_state = "down";
    bool compare = false;                // three-way comparison (ising only)
    std::optional<double> layer_phase;   // calibrate Rabi so the strongest layer reaches this max |J| tau
    bool desired_is_effective = false;   // desired Hamiltonian: schedule average instead of the scaled target
};

struct BsbSettings {
    int mode = 0; // 0-based
    double rabi = 41e3;
    double mean_n = 0.1;
    std::vector<double> times;
    bool beam_profile = false; // per-ion Rabi rates from the offsets beam model
    int n_max = 0;
};

enum class SweepAxis { axial_frequency, quartic, detuning, s };
std::string_view sweep_axis_name(SweepAxis a);

struct SweepSettings {
    SweepAxis axis = SweepAxis::axial_frequency;
    std::vector<double> values; // SI units (Hz for frequencies)
};

enum class OutputFormat { csv, json, both };

struct OutputSettings {
    std::filesystem::path directory = "out";
    OutputFormat format = OutputFormat::both;
};

struct RunConfig {
    TrapConfig trap;
    std::optional<TargetSpec> target;
    std::optional<Schedule> schedule; // inline schedule
    bool design_schedule = false;     // schedule: design
    std::optional<OffsetModel> offsets;
    DesignSettings design;
    DynamicsSettings dynamics;
    std::optional<BsbSettings> bsb;
    std::optional<SweepSettings> sweep;
    OutputSettings output;
};

// Parses YAML text. Unknown keys, missing required keys and unitless
// dimensional values raise ValidationError naming the key and line.
// Relative file paths are resolved against base_dir.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".",
                       std::string_view source_name = "<config>");
RunConfig load_config(const std::filesystem::path& path);

OutputFormat parse_output_format(std::string_view s);

} // namespace ionweave
