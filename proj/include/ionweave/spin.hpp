#pragma once

#include "ionweave/coupling.hpp"
#include "ionweave/kernels.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ionweave {

// 2^N amplitudes; qubit 1 is the most significant bit and |down> is bit 0.
using SpinState = Eigen::VectorXcd;

SpinState basis_state(int qubits, std::uint64_t index);
SpinState all_down(int qubits);
// '0' = down, '1' = up, qubit 1 first; "down"/"up"/"neel" are accepted as well.
SpinState state_from_string(int qubits, const std::string& spec);

// Systematic imperfections: a linear qubit-frequency gradient along the chain
// and a Gaussian beam profile Omega(x) = Omega_0 exp(-2 (x - x_c)^2 / w^2)
// with waist w = beam_width_axial / 2. Positions are measured from the chain
// centre; x_c = beam_center_offset.
struct OffsetModel {
    double qubit_gradient = 0.0;                // Hz per meter
    std::optional<double> beam_width_axial;     // meters; absent means uniform illumination
    double beam_center_offset = 0.0;            // meters
    double base_rabi = 0.0;                     // Hz, Omega_0 / 2pi

    void validate() const;
    // Delta f_i in Hz relative to the chain centre.
    std::vector<double> frequency_offsets(std::span<const double> positions) const;
    // Omega_i / Omega_0.
    std::vector<double> rabi_factors(std::span<const double> positions) const;
    bool operator==(const OffsetModel&) const = default;
};

// Physical positions plus an optional offset model. A null offsets pointer is
// the ideal model.
struct LayerContext {
    const OffsetModel* offsets = nullptr;
    std::vector<double> positions; // meters
    Backend backend = default_backend();
};

enum class PauliAxis { x, y, z };

// sum_{i<j} J_ij sum_{a in axes} sigma_a^i sigma_a^j
Eigen::MatrixXcd pair_hamiltonian(const CouplingMatrix& j, std::span<const PauliAxis> axes,
                                  Backend backend = default_backend());

// sum_{i<j} J'_ij sigma_phi^i sigma_phi^j + sum_i pi Delta f_i sigma_z^i, with
// J'_ij = J_ij r_i r_j for Rabi factors r (offsets only).
Eigen::MatrixXcd ising_hamiltonian(const CouplingMatrix& j, double phase, const LayerContext& ctx);

// exp(-i H t) for Hermitian H by eigendecomposition.
Eigen::MatrixXcd hermitian_exp(const Eigen::MatrixXcd& h, double t);

Eigen::MatrixXcd ising_layer_unitary(const CouplingMatrix& j, double phase, double duration, const LayerContext& ctx);

// Applies (x)_i exp(-i angle sigma_axis / 2) in place.
void global_rotation(SpinState& state, PauliAxis axis, double angle);
Eigen::MatrixXcd global_rotation_unitary(int qubits, PauliAxis axis, double angle);

// The global rotation R_y = (x)_i exp(-i (pi/4) sigma_y) used to turn XX
// layers into ZZ layers: R_y^dag (sigma_x sigma_x) R_y = sigma_z sigma_z.
void apply_ry_quarter(SpinState& state);
void apply_ry_quarter_dagger(SpinState& state);

struct ObservableTrace {
    int qubits = 0;
    std::vector<int> step;
    std::vector<std::string> label;
    std::vector<double> time; // seconds of interaction time
    std::vector<std::vector<double>> sites; // <sigma_z^i> per step
    std::vector<double> average;

    std::size_t size() const { return step.size(); }
    // The first record on an empty trace fixes qubits when it is still 0.
    void record(const SpinState& state, std::string lbl, double t, Backend backend = default_backend());
    bool operator==(const ObservableTrace&) const = default;
};

// Largest |difference| over all recorded observables of two equally sized traces.
double max_trace_deviation(const ObservableTrace& a, const ObservableTrace& b);

// Applies each layer in order for schedule.repetitions cycles, recording the
// initial point and the state after every layer.
ObservableTrace run_ising_schedule(const SpinState& state0, const Schedule& schedule,
                                   std::span<const CouplingMatrix> per_layer, const LayerContext& ctx);

// Period [XX(J1,t1), XX(J3,t3), YY(J1,t1), YY(J3,t3)] repeated n_periods times.
ObservableTrace floquet_xy(const SpinState& state0, double t1, double t3, const CouplingMatrix& j1,
                           const CouplingMatrix& j3, int n_periods, const LayerContext& ctx);

// Trotter step [XX1, XX3, YY1, YY3, R_y, XX1, XX3, R_y^dag] repeated n_steps
// times; rotations take no time.
ObservableTrace floquet_xyz(const SpinState& state0, double t1, double t3, const CouplingMatrix& j1,
                            const CouplingMatrix& j3, int n_steps, const LayerContext& ctx);

// Evolution under a static Hamiltonian sampled at the given times.
ObservableTrace static_evolution(const SpinState& state0, const Eigen::MatrixXcd& h, std::span<const double> times,
                                 int qubits, Backend backend = default_backend());

struct ThreeWayComparison {
    ObservableTrace desired;      // dense evolution under the desired Hamiltonian
    ObservableTrace implemented;  // layered, ideal
    ObservableTrace with_offsets; // layered, offset model enabled
};

// desired: coupling of the target sigma_phi sigma_phi Hamiltonian in rad/s.
ThreeWayComparison compare_three_ways(const SpinState& state0, const CouplingMatrix& desired, const Schedule& schedule,
                                      std::span<const CouplingMatrix> per_layer, const OffsetModel& offsets,
                                      std::span<const double> positions, Backend backend = default_backend());

// Carrier Rabi rate (Hz) at which a layer accumulates max_ij |J_ij| * tau = phase.
double calibrate_rabi(const ModeSpectrum& spectrum, const LambDickeMatrix& eta, const LaserLayer& layer, double phase);

// Sets one common Rabi rate on every layer so that the strongest layer
// accumulates max_ij |J_ij| * tau = phase. Relative layer strengths are kept.
Schedule calibrate_schedule(const Schedule& schedule, const ModeSpectrum& spectrum, const LambDickeMatrix& eta,
                            double phase);

} // namespace ionweave
