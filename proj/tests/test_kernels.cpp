#include "helpers.hpp"

#include "ionweave/kernels.hpp"

#include <doctest.h>

#include <random>
#include <stdexcept>

using namespace ionweave;
using namespace ionweave::kernels;

namespace {

SpinModel random_model(int n, std::mt19937& rng)
{
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> ph(-3.2, 3.2);
    SpinModel m;
    m.qubits = n;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            m.pairs.push_back({i, j, g(rng), PairTerm::Kind::phase, ph(rng)});
            m.pairs.push_back({i, j, g(rng), PairTerm::Kind::zz, 0.0});
        }
    for (int i = 0; i < n; ++i) m.z_field.push_back(g(rng));
    return m;
}

Eigen::MatrixXcd model_oracle(const SpinModel& m)
{
    using testing::embed;
    const Eigen::Index d = Eigen::Index{1} << m.qubits;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& p : m.pairs) {
        Eigen::Matrix2cd op = testing::pauli_z();
        if (p.kind == PairTerm::Kind::phase) op = std::cos(p.phase) * testing::pauli_x() - std::sin(p.phase) * testing::pauli_y();
        h += p.coefficient * embed(op, p.i, m.qubits) * embed(op, p.j, m.qubits);
    }
    for (int q = 0; q < static_cast<int>(m.z_field.size()); ++q) h += m.z_field[q] * embed(testing::pauli_z(), q, m.qubits);
    return h;
}

} // namespace

TEST_CASE("assembled Hamiltonian matches the Kronecker-product oracle")
{
    std::mt19937 rng(11);
    for (int n = 1; n <= 6; ++n) {
        const SpinModel m = random_model(n, rng);
        const Eigen::MatrixXcd h = serial::assemble_hamiltonian(m);
        CHECK((h - model_oracle(m)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("serial and OpenMP kernels are bit-identical")
{
    std::mt19937 rng(5);
    for (int n = 2; n <= 9; ++n) {
        const SpinModel m = random_model(n, rng);
        CHECK(serial::assemble_hamiltonian(m) == omp::assemble_hamiltonian(m));
        CHECK(assemble_hamiltonian(m, Backend::serial) == assemble_hamiltonian(m, Backend::openmp));

        std::normal_distribution<double> g;
        Eigen::VectorXcd psi(Eigen::Index{1} << n);
        for (auto& a : psi) a = {g(rng), g(rng)};
        psi.normalize();
        CHECK(serial::site_magnetization(psi, n) == omp::site_magnetization(psi, n));
    }
    auto fn = [](std::size_t k) { return std::sin(0.37 * static_cast<double>(k)) / (1.0 + static_cast<double>(k)); };
    CHECK(serial::map_indices(1000, fn) == omp::map_indices(1000, fn));
    CHECK(omp::map_indices(0, fn).empty());
}

TEST_CASE("site magnetization of basis states")
{
    const int n = 4;
    for (std::uint64_t idx = 0; idx < 16; ++idx) {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(16);
        psi[static_cast<Eigen::Index>(idx)] = 1.0;
        for (Backend b : {Backend::serial, Backend::openmp}) {
            const Eigen::VectorXd z = site_magnetization(psi, n, b);
            for (int q = 0; q < n; ++q) CHECK(z[q] == (((idx >> (n - 1 - q)) & 1U) ? 1.0 : -1.0));
        }
    }
}

TEST_CASE("map_indices propagates exceptions from either backend")
{
    auto bad = [](std::size_t k) -> double {
        if (k == 17) throw std::runtime_error("boom");
        return 0.0;
    };
    CHECK_THROWS_AS(serial::map_indices(40, bad), std::runtime_error);
    CHECK_THROWS_AS(omp::map_indices(40, bad), std::runtime_error);
}

TEST_CASE("default backend can be switched")
{
    const Backend before = default_backend();
    set_default_backend(Backend::serial);
    CHECK(default_backend() == Backend::serial);
    set_default_backend(Backend::openmp);
    CHECK(default_backend() == Backend::openmp);
    set_default_backend(before);
}
