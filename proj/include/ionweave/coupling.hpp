#pragma once

#include "ionweave/chain.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace ionweave {

// One constant-parameter global interaction layer.
//   detuning: delta_M = (mu - w_M)/2pi in Hz, signed
//   phase:    selects sigma_phi = sigma_x cos(phi) - sigma_y sin(phi)
//   rabi:     global carrier Rabi rate Omega/2pi in Hz
struct LaserLayer {
    int mode = 0; // 0-based mode index
    double detuning = 0.0;
    double duration = 0.0;
    double phase = 0.0;
    double rabi = 0.0;

    // Beat-note frequency mu/2pi in Hz.
    double beat_frequency(const ModeSpectrum& spectrum) const;
    bool operator==(const LaserLayer&) const = default;
};

struct Schedule {
    std::vector<LaserLayer> layers;
    int repetitions = 1;

    void validate(Eigen::Index n_modes) const;
    double cycle_duration() const;
    bool operator==(const Schedule&) const = default;
};

// Symmetric, zero-diagonal spin-spin coupling matrix. Values are angular
// frequencies (rad/s) unless normalized() is set, in which case they are
// dimensionless with max |J_ij| = 1.
class CouplingMatrix {
public:
    CouplingMatrix() = default;
    explicit CouplingMatrix(Eigen::Index n) : values_(Eigen::MatrixXd::Zero(n, n)) {}
    // Validates symmetry (relative tolerance) and zero diagonal; the stored
    // matrix is exactly symmetrized.
    CouplingMatrix(Eigen::MatrixXd values, bool normalized);

    Eigen::Index size() const { return values_.rows(); }
    const Eigen::MatrixXd& values() const { return values_; }
    bool normalized() const { return normalized_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

    double max_abs() const;
    bool is_zero() const { return max_abs() == 0.0; }
    // Upper triangle i<j in row-major order.
    Eigen::VectorXd upper_triangle() const;
    // Rescaled so that max |J_ij| = 1. Throws on a zero matrix.
    CouplingMatrix max_normalized() const;
    CouplingMatrix scaled(double factor) const;
    // Simultaneous row/column permutation: result(p[i], p[j]) = this(i, j).
    CouplingMatrix permuted(std::span<const int> perm) const;

    bool operator==(const CouplingMatrix& o) const
    {
        return normalized_ == o.normalized_ && values_.rows() == o.values_.rows() && values_ == o.values_;
    }

private:
    Eigen::MatrixXd values_;
    bool normalized_ = false;
};

// J_ij = Omega_i Omega_j sum_m eta_im eta_jm w_m / (mu^2 - w_m^2), angular units.
// mu is the absolute beat frequency in Hz. Throws ResonanceError when mu is
// within 1 Hz of any mode.
CouplingMatrix coupling_matrix(const ModeSpectrum& spectrum, const LambDickeMatrix& eta,
                               std::span<const double> rabi_per_ion, double mu);

// Coupling of one layer with a uniform Rabi rate (layer.rabi on every ion).
CouplingMatrix layer_coupling(const ModeSpectrum& spectrum, const LambDickeMatrix& eta, const LaserLayer& layer);
// Coupling of one layer with explicit per-ion Rabi rates (Hz).
CouplingMatrix layer_coupling(const ModeSpectrum& spectrum, const LambDickeMatrix& eta, const LaserLayer& layer,
                              std::span<const double> rabi_per_ion);

// Duration-weighted mean sum_m J_m tau_m / sum_m tau_m. All layers must share
// one phase; otherwise the layers do not commute and ValidationError is thrown.
CouplingMatrix effective_coupling(const Schedule& schedule, std::span<const CouplingMatrix> per_layer);

// Effective coupling of a schedule under the full multimode model.
CouplingMatrix schedule_effective_coupling(const Schedule& schedule, const ModeSpectrum& spectrum,
                                           const LambDickeMatrix& eta);

struct LayerClosure {
    std::vector<double> products; // delta_m * tau for every mode m
    double addressed_deviation = 0.0; // distance of the addressed-mode product to an integer
    double worst_deviation = 0.0;     // over all modes
    bool addressed_closed = false;
    bool closed = false;
};

struct ClosureReport {
    double tolerance = 0.05;
    std::vector<LayerClosure> layers;

    bool addressed_closed() const;
    bool closed() const;
    double worst_deviation() const;
};

ClosureReport loop_closure_report(const Schedule& schedule, const ModeSpectrum& spectrum, double tolerance = 0.05);

struct FidelityReport {
    double fidelity = 0.0;
    double cosine = 0.0; // normalized overlap in [-1, 1]
    CouplingMatrix implemented; // max |J| = 1
    CouplingMatrix target;      // max |J| = 1
    Eigen::MatrixXd residuals;  // implemented - target, normalized matrices

    bool operator==(const FidelityReport&) const = default;
};

// Normalized overlap <A,B>/sqrt(<A,A><B,B>), <A,B> = sum_{i<j} A_ij B_ij.
double overlap_cosine(const CouplingMatrix& a, const CouplingMatrix& b);
// F = (1 + cosine)/2. Throws ValidationError on a zero or mismatched input.
FidelityReport fidelity(const CouplingMatrix& implemented, const CouplingMatrix& target);

} // namespace ionweave
