#pragma once

// Shared fixtures and independent oracles for the unit tests.

#include "ionweave/chain.hpp"
#include "ionweave/coupling.hpp"
#include "ionweave/units.hpp"

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

namespace testing {

using cplx = std::complex<double>;

// 9Be+ with a 313 nm Raman pair crossing at 90 degrees.
inline ionweave::TrapConfig beryllium(int n, double axial_hz = 1.3e6, double alpha = 0.0)
{
    ionweave::TrapConfig t;
    t.ion_count = n;
    t.axial_com_frequency = axial_hz;
    t.quartic_coefficient = alpha;
    t.ion_mass = 9.012182 * ionweave::constants::atomic_mass_unit;
    t.raman_wavevector = std::numbers::sqrt2 * 2.0 * std::numbers::pi / 313e-9;
    return t;
}

// Single-qubit operators in the (down, up) basis, down = bit 0.
inline Eigen::Matrix2cd pauli_x() { Eigen::Matrix2cd m; m << 0, 1, 1, 0; return m; }
inline Eigen::Matrix2cd pauli_y() { Eigen::Matrix2cd m; m << 0, cplx(0, 1), cplx(0, -1), 0; return m; }
inline Eigen::Matrix2cd pauli_z() { Eigen::Matrix2cd m; m << -1, 0, 0, 1; return m; }

// Operator acting as `op` on qubit q (0-based, qubit 0 most significant) of n.
inline Eigen::MatrixXcd embed(const Eigen::Matrix2cd& op, int q, int n)
{
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int k = 0; k < n; ++k) {
        const Eigen::MatrixXcd f = (k == q) ? Eigen::MatrixXcd(op) : Eigen::MatrixXcd::Identity(2, 2);
        Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index r = 0; r < out.rows(); ++r)
            for (Eigen::Index c = 0; c < out.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = out(r, c) * f;
        out = next;
    }
    return out;
}

// sum_{i<j} J_ij P_i P_j built from Kronecker products.
inline Eigen::MatrixXcd pair_oracle(const Eigen::MatrixXd& j, const Eigen::Matrix2cd& p)
{
    const int n = static_cast<int>(j.rows());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) h += j(a, b) * embed(p, a, n) * embed(p, b, n);
    return h;
}

inline Eigen::MatrixXd random_symmetric(int n, std::mt19937& rng)
{
    std::normal_distribution<double> d;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) m(i, k) = m(k, i) = d(rng);
    return m;
}

inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto p = std::filesystem::temp_directory_path() / ("ionweave_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace testing
