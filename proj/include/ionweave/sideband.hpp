#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace ionweave {

// Fock-diagonal thermal state p_n = nbar^n / (nbar + 1)^(n + 1), n = 0..n_max.
struct ThermalWeights {
    double mean_n = 0.0;
    std::vector<double> weights;

    int n_max() const { return static_cast<int>(weights.size()) - 1; }
    double captured() const; // sum of the retained weights
    bool operator==(const ThermalWeights&) const = default;
};

ThermalWeights thermal_weights(double mean_n, int n_max);

// max(8, smallest n whose thermal tail beyond n is below 1e-6).
int default_fock_cutoff(double mean_n);

// H = sum_i eta_i Omega_i (sigma_+^i a^dag + sigma_-^i a), Omega_i = 2 pi rabi_i,
// on spin (x) Fock{0..n_max}. Basis index = spin_index * (n_max + 1) + n, with
// the spin index laid out as for SpinState.
Eigen::MatrixXd bsb_hamiltonian(const Eigen::VectorXd& eta_column, std::span<const double> rabi_per_ion, int n_max);

// K = (number of up spins) - (phonon number), diagonal in the same basis.
Eigen::VectorXd excitation_number(int qubits, int n_max);

struct BsbOptions {
    int n_max = 0;                        // 0: default_fock_cutoff(mean_n)
    int n_max_cap = 60;                   // give up beyond this cutoff
    double truncation_tolerance = 1e-4;   // allowed population of the top Fock level
};

struct BsbTraces {
    std::vector<double> times;                    // seconds
    std::vector<double> average_down;             // (1/N) sum_i P_i(down)
    std::vector<std::vector<double>> ion_down;    // [time][ion]
    int n_max = 0;
    double max_top_population = 0.0;
    ThermalWeights thermal;

    bool operator==(const BsbTraces&) const = default;
};

// P(down) of every ion for the pure initial state |down...down> (x) |n>.
// Evolves inside the conserved-excitation block of that state, which is exact
// for the truncated Hamiltonian. top_population receives the largest
// population reached on Fock level n_max.
std::vector<std::vector<double>> bsb_branch(const Eigen::VectorXd& eta_column, std::span<const double> rabi_per_ion,
                                            std::span<const double> times, int n, int n_max,
                                            double* top_population = nullptr);

// Thermal average over Fock branches. Raises the cutoff when the top level
// gets populated beyond the tolerance; throws NumericalError past the cap.
BsbTraces bsb_evolution(const Eigen::VectorXd& eta_column, std::span<const double> rabi_per_ion,
                        std::span<const double> times, double mean_n, const BsbOptions& options = {});

// Same observables from dense propagation in the full truncated space; slow,
// kept as a reference for tests.
BsbTraces bsb_evolution_reference(const Eigen::VectorXd& eta_column, std::span<const double> rabi_per_ion,
                                  std::span<const double> times, double mean_n, int n_max);

} // namespace ionweave
