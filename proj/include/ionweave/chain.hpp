#pragma once

#include <Eigen/Dense>

#include <vector>

namespace ionweave {

// Physical and dimensionless parameters of a linear ion chain in a
// harmonic-plus-quartic axial potential
//
//   V(u) = sum_i (u_i^2/2 + alpha u_i^4/4) + sum_{i<j} 1/|u_i - u_j|
//
// with positions u in units of l = (e^2 / (4 pi eps0 M w_z^2))^(1/3).
struct TrapConfig {
    int ion_count = 1;
    double axial_com_frequency = 1e6; // Hz, ordinary frequency w_z / 2pi
    double quartic_coefficient = 0.0; // alpha, dimensionless
    double ion_mass = 0.0;            // kg
    double raman_wavevector = 0.0;    // rad/m, net Raman wavevector along the axis

    // Throws ValidationError when an invariant is violated.
    void validate() const;
    // Angular trap frequency w_z.
    double axial_angular_frequency() const;
    // Length scale l in meters.
    double length_scale() const;
};

struct EquilibriumPositions {
    std::vector<double> dimensionless; // ascending, units of length_scale
    double length_scale = 0.0;         // meters
    double gradient_residual = 0.0;    // max-norm of dV/du at the solution
    int iterations = 0;

    std::size_t size() const { return dimensionless.size(); }
    // x_i = l * u_i in meters.
    std::vector<double> physical() const;
};

// Axial normal modes, mode index m = 0..N-1 in code (mode 1..N in reports),
// lowest frequency first.
struct ModeSpectrum {
    Eigen::VectorXd frequencies;  // Hz
    Eigen::VectorXd eigenvalues;  // dimensionless Hessian eigenvalues, w_m = w_z sqrt(lambda_m)
    Eigen::MatrixXd eigenvectors; // column m is b_{., m}; largest-|.| entry positive

    Eigen::Index size() const { return frequencies.size(); }
    Eigen::VectorXd angular_frequencies() const;
    // Smallest gap between adjacent mode frequencies, Hz. Zero for a single ion.
    double min_spacing() const;
};

// eta(i, m) = b_{i,m} dk sqrt(hbar / (2 M w_m))
struct LambDickeMatrix {
    Eigen::MatrixXd eta;

    Eigen::Index size() const { return eta.rows(); }
    // True when every |eta| < 1.
    bool within_lamb_dicke_regime() const;
};

Eigen::VectorXd potential_gradient(const Eigen::VectorXd& u, double alpha);
Eigen::MatrixXd potential_hessian(const Eigen::VectorXd& u, double alpha);
double potential_energy(const Eigen::VectorXd& u, double alpha);

EquilibriumPositions equilibrium_positions(const TrapConfig& config);
ModeSpectrum normal_modes(const TrapConfig& config, const EquilibriumPositions& eq);
LambDickeMatrix lamb_dicke(const TrapConfig& config, const ModeSpectrum& spectrum);

// Convenience bundle used throughout the CLI and designer.
struct Chain {
    TrapConfig config;
    EquilibriumPositions positions;
    ModeSpectrum spectrum;
    LambDickeMatrix eta;
};

Chain solve_chain(const TrapConfig& config);

} // namespace ionweave
