#include "helpers.hpp"

#include "ionweave/errors.hpp"
#include "ionweave/sideband.hpp"

#include <doctest.h>

#include <cmath>

using namespace ionweave;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v;
    for (int k = 0; k < n; ++k) v.push_back(a + (b - a) * k / (n - 1));
    return v;
}

} // namespace

TEST_CASE("single-ion BSB Hamiltonian oracle")
{
    Eigen::VectorXd eta(1);
    eta << 0.2;
    const std::vector<double> rabi{41e3};
    const Eigen::MatrixXd h = bsb_hamiltonian(eta, rabi, 1);
    REQUIRE(h.rows() == 4);
    // |down,0> = 0, |down,1> = 1, |up,0> = 2, |up,1> = 3
    Eigen::MatrixXd oracle = Eigen::MatrixXd::Zero(4, 4);
    oracle(3, 0) = oracle(0, 3) = 0.2 * kTwoPi * 41e3;
    CHECK((h - oracle).cwiseAbs().maxCoeff() < 1e-9);

    // sqrt(n+1) on the next rung
    const Eigen::MatrixXd h3 = bsb_hamiltonian(eta, rabi, 3);
    CHECK(h3(4 + 2, 1) == doctest::Approx(0.2 * kTwoPi * 41e3 * std::sqrt(2.0)));

    CHECK(bsb_hamiltonian(Eigen::VectorXd::Zero(3), std::vector<double>(3, 1e5), 4).isZero());
    CHECK_THROWS_AS(bsb_hamiltonian(eta, rabi, 0), ValidationError);
    CHECK_THROWS_AS(bsb_hamiltonian(eta, std::vector<double>(2, 1.0), 2), ValidationError);
}

TEST_CASE("multi-ion Hamiltonian is Hermitian and conserves the excitation number")
{
    const Chain c = solve_chain(testing::beryllium(4));
    const Eigen::VectorXd col = c.eta.eta.col(2);
    const std::vector<double> rabi{30e3, 41e3, 50e3, 38e3};
    const Eigen::MatrixXd h = bsb_hamiltonian(col, rabi, 6);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-14 * h.cwiseAbs().maxCoeff());
    const Eigen::VectorXd k = excitation_number(4, 6);
    const Eigen::MatrixXd comm = h * k.asDiagonal() - k.asDiagonal() * h;
    CHECK(comm.cwiseAbs().maxCoeff() == 0.0);

    // drift of <K> under dense evolution from a superposition of branches
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(h.rows());
    psi[0] = std::sqrt(0.7);
    psi[2] = std::sqrt(0.3);
    const double k0 = (psi.adjoint() * k.asDiagonal() * psi)(0, 0).real();
    for (double t : {1e-6, 7e-6, 40e-6}) {
        const Eigen::VectorXcd ph = (es.eigenvalues() * -t).unaryExpr([](double a) { return std::polar(1.0, a); });
        const Eigen::VectorXcd out = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().transpose() * psi;
        CHECK(std::abs((out.adjoint() * k.asDiagonal() * out)(0, 0).real() - k0) < 1e-10);
    }
}

TEST_CASE("single-ion ground-state flop is cos^2(eta Omega t)")
{
    Eigen::VectorXd eta(1);
    eta << 0.31;
    const std::vector<double> rabi{41e3};
    const auto times = linspace(0, 100e-6, 201);
    const BsbTraces tr = bsb_evolution(eta, rabi, times, 0.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double c = std::cos(0.31 * kTwoPi * 41e3 * times[k]);
        CHECK(std::abs(tr.average_down[k] - c * c) < 1e-8);
    }
    CHECK(tr.average_down[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("six ions on mode 3 flop at different rates")
{
    const Chain c = solve_chain(testing::beryllium(6));
    const auto times = linspace(0, 100e-6, 101);
    const BsbTraces tr = bsb_evolution(c.eta.eta.col(2), std::vector<double>(6, 41e3), times, 0.1);
    double spread = 0.0;
    for (const auto& row : tr.ion_down) {
        spread = std::max(spread, *std::max_element(row.begin(), row.end()) - *std::min_element(row.begin(), row.end()));
        for (double p : row) {
            CHECK(p >= -1e-12);
            CHECK(p <= 1 + 1e-12);
        }
    }
    CHECK(spread > 0.1);
    for (double p : tr.ion_down[0]) CHECK(p == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tr.max_top_population < 1e-4);
}

TEST_CASE("thermal average sits between the n = 0 and n = 1 branches early on")
{
    const Chain c = solve_chain(testing::beryllium(4));
    const Eigen::VectorXd col = c.eta.eta.col(0);
    const std::vector<double> rabi(4, 41e3);
    const auto times = linspace(0, 15e-6, 31);
    const BsbTraces thermal = bsb_evolution(col, rabi, times, 0.1);
    const auto b0 = bsb_branch(col, rabi, times, 0, thermal.n_max);
    const auto b1 = bsb_branch(col, rabi, times, 1, thermal.n_max);
    auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    // early: until the faster n = 1 branch reaches its first minimum
    std::size_t early = 1;
    while (early + 1 < times.size() && mean(b1[early + 1]) < mean(b1[early])) ++early;
    CHECK(times[early] > 10e-6);
    for (std::size_t k = 1; k <= early; ++k) {
        const double lo = std::min(mean(b0[k]), mean(b1[k])), hi = std::max(mean(b0[k]), mean(b1[k]));
        CHECK(thermal.average_down[k] >= lo - 1e-12);
        CHECK(thermal.average_down[k] <= hi + 1e-12);
    }

    const BsbTraces cold = bsb_evolution(col, rabi, times, 0.0);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(cold.average_down[k] == doctest::Approx(mean(b0[k])).epsilon(1e-14));
}

TEST_CASE("sector evolution agrees with the full-space reference")
{
    const Chain c = solve_chain(testing::beryllium(3));
    const std::vector<double> rabi{35e3, 41e3, 37e3};
    const auto times = linspace(0, 60e-6, 25);
    BsbOptions opt;
    opt.n_max = 10;
    const BsbTraces a = bsb_evolution(c.eta.eta.col(1), rabi, times, 0.3, opt);
    const BsbTraces b = bsb_evolution_reference(c.eta.eta.col(1), rabi, times, 0.3, a.n_max);
    for (std::size_t k = 0; k < times.size(); ++k)
        for (int i = 0; i < 3; ++i) CHECK(std::abs(a.ion_down[k][i] - b.ion_down[k][i]) < 1e-10);
}

TEST_CASE("thermal weights and the Fock cutoff")
{
    const ThermalWeights w = thermal_weights(0.1, 12);
    for (int n = 0; n <= 12; ++n) CHECK(w.weights[n] == doctest::Approx(std::pow(0.1, n) / std::pow(1.1, n + 1)));
    CHECK(w.captured() > 1 - 1e-6);
    CHECK(default_fock_cutoff(0.1) == 8);
    const int big = default_fock_cutoff(2.0);
    CHECK(big > 8);
    CHECK(thermal_weights(2.0, big).captured() >= 1 - 1e-6);
    CHECK(thermal_weights(2.0, big - 1).captured() < 1 - 1e-6);
    CHECK_THROWS_AS(thermal_weights(-0.1, 5), ValidationError);
}

TEST_CASE("truncation problems surface as numerical errors")
{
    const Chain c = solve_chain(testing::beryllium(4));
    const auto times = linspace(0, 400e-6, 41);
    BsbOptions opt;
    opt.n_max = 2;
    opt.n_max_cap = 3;
    CHECK_THROWS_AS(bsb_evolution(c.eta.eta.col(0), std::vector<double>(4, 41e3), times, 0.1, opt), NumericalError);

    // the default path grows n_max when needed and stays under tolerance
    const BsbTraces ok = bsb_evolution(c.eta.eta.col(0), std::vector<double>(4, 41e3), times, 0.1);
    CHECK(ok.max_top_population < 1e-4);
}
