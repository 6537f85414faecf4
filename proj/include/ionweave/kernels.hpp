#pragma once

// Data-parallel inner loops. Each kernel has a serial reference
// implementation and an OpenMP implementation producing bit-identical output
// (no reductions across threads change summation order). Tests compare the
// two; bench/ times them.

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <vector>

namespace ionweave {

enum class Backend { serial, openmp };

// Process-wide default used when callers do not pass a backend explicitly.
Backend default_backend();
void set_default_backend(Backend b);

namespace kernels {

using cplx = std::complex<double>;

// Two-body term coefficient * P_i P_j. For kind == phase, P = sigma_phi =
// sigma_x cos(phi) - sigma_y sin(phi); for kind == zz, P = sigma_z.
struct PairTerm {
    enum class Kind { phase, zz };
    int i = 0;
    int j = 0;
    double coefficient = 0.0;
    Kind kind = Kind::phase;
    double phase = 0.0;
};

// H = sum pair terms + sum_i z_field[i] sigma_z^i on n qubits. Basis index
// bit (n-1-q) holds qubit q; bit value 1 is |up> (sigma_z = +1).
struct SpinModel {
    int qubits = 0;
    std::vector<PairTerm> pairs;
    std::vector<double> z_field; // empty or size qubits
};

Eigen::MatrixXcd assemble_hamiltonian(const SpinModel& model, Backend backend);

// <sigma_z^q> for each qubit.
Eigen::VectorXd site_magnetization(const Eigen::VectorXcd& psi, int qubits, Backend backend);

// out[k] = fn(k) for k in [0, count). fn must be safe to call concurrently.
std::vector<double> map_indices(std::size_t count, const std::function<double(std::size_t)>& fn, Backend backend);

namespace serial {
Eigen::MatrixXcd assemble_hamiltonian(const SpinModel& model);
Eigen::VectorXd site_magnetization(const Eigen::VectorXcd& psi, int qubits);
std::vector<double> map_indices(std::size_t count, const std::function<double(std::size_t)>& fn);
} // namespace serial

namespace omp {
Eigen::MatrixXcd assemble_hamiltonian(const SpinModel& model);
Eigen::VectorXd site_magnetization(const Eigen::VectorXcd& psi, int qubits);
std::vector<double> map_indices(std::size_t count, const std::function<double(std::size_t)>& fn);
} // namespace omp

} // namespace kernels
} // namespace ionweave
