#pragma once

#include "ionweave/coupling.hpp"
#include "ionweave/kernels.hpp"
#include "ionweave/targets.hpp"

#include <limits>
#include <string>
#include <vector>

namespace ionweave {

// Candidate base detunings |delta| (Hz) for the strongest layer.
struct DetuningGrid {
    double min = 50e3;
    double max = 150e3;
    double step = 0.1e3;

    std::vector<double> values() const;
};

struct DesignProblem {
    TargetGraph target;
    ModeSpectrum spectrum;
    LambDickeMatrix eta;
    std::vector<int> allowed_modes; // 0-based; empty means every mode
    DetuningGrid grid;
    int k_max = 8;
    int max_layers = 0;               // 0: no limit
    double closure_tolerance = 0.05;
    double rabi = 1e6;                // Hz, carrier Rabi rate written into every layer
    double phase = 0.0;               // layer phase
    double min_relative_weight = 0.02; // weights below this fraction of the largest are dropped and refit
    double max_detuning_fraction = 0.5; // |delta| cap as a fraction of the smallest mode spacing
    Backend backend = default_backend();

    std::vector<int> modes() const;
    double max_detuning() const;
};

struct WeightSolution {
    Eigen::VectorXd weights; // indexed by mode, zero for modes outside the allowed set
    int rank = 0;
    int nullspace_dimension = 0;
    double residual = 0.0; // || sum w_m P_m - J^d/||J^d|| ||, upper triangle
    double rank_one_fidelity = 0.0;
};

struct DesignSolution {
    Eigen::VectorXd weights;
    Schedule schedule;
    CouplingMatrix effective;     // full multimode effective coupling, rad/s
    double achieved_fidelity = 0.0;
    double rank_one_fidelity = 0.0;
    double scale = 0.0;           // max |J_eff| in rad/s
    double base_detuning = 0.0;   // Hz
    ClosureReport closure;
    bool closure_satisfied = false; // every mode within tolerance on every layer
    double pattern_discrepancy = 0.0; // max |normalized J_eff - normalized sum w P|
    std::size_t candidates_evaluated = 0;
    std::size_t feasible_candidates = 0;
    std::size_t closed_candidates = 0;
};

// P_m[i, j] = b_im b_jm for i != j.
CouplingMatrix mode_pattern(const ModeSpectrum& spectrum, int mode);
// sum_m w_m P_m.
CouplingMatrix weighted_pattern(const ModeSpectrum& spectrum, const Eigen::VectorXd& weights);

// Minimum-norm least-squares fit of the unit-norm target by mode patterns.
WeightSolution solve_weights(const DesignProblem& problem);
// solve_weights followed by dropping weights below min_relative_weight of the
// largest (and all but the max_layers strongest) and refitting.
WeightSolution fit_weights(const DesignProblem& problem);

// One loop-closed layer per nonzero weight. The strongest layer (largest
// |w_m| f_m) runs at |delta| = base_detuning; every other layer gets the
// detuning that makes its near-resonant contribution k/(delta |delta| w_m)
// proportional to w_m, with tau = k/|delta| exactly. Multiplicities k <= k_max
// keep every |delta| below max_detuning; otherwise InfeasibleDesignError
// carries the k_max that would be needed.
Schedule weights_to_schedule(const Eigen::VectorXd& weights, const ModeSpectrum& spectrum, double base_detuning,
                             int k_max, double rabi, double phase = 0.0,
                             double max_detuning = std::numeric_limits<double>::infinity());

// Realizes fixed weights at one base detuning and scores the result.
DesignSolution evaluate_design(const DesignProblem& problem, const Eigen::VectorXd& weights, double base_detuning);

// Weight fit with pruning, then a grid search over base detunings. Closed
// candidates (all modes within tolerance) win when any exist; otherwise the
// best fidelity is returned with closure_satisfied = false. Ties prefer the
// shorter cycle, then fewer layers.
DesignSolution design(const DesignProblem& problem);

struct DesignRow {
    int mode = 0; // 1-based
    double detuning = 0.0;
    double duration = 0.0;
    int multiplicity = 1;
    double weight = 0.0;

    bool operator==(const DesignRow&) const = default;
};

struct DesignReport {
    std::string target_name;
    std::vector<DesignRow> rows;
    double achieved_fidelity = 0.0;
    double rank_one_fidelity = 0.0;
    double base_detuning = 0.0;
    bool closure_satisfied = false;
    double worst_closure_deviation = 0.0;
    double pattern_discrepancy = 0.0;
    Schedule schedule;
    CouplingMatrix implemented; // max-normalized
    CouplingMatrix target;      // max-normalized

    std::string table() const;
    bool operator==(const DesignReport&) const = default;
};

DesignReport design_report(const DesignProblem& problem, const DesignSolution& solution);

} // namespace ionweave
