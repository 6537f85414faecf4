#include "helpers.hpp"

#include "ionweave/designer.hpp"
#include "ionweave/errors.hpp"
#include "ionweave/targets.hpp"

#include <doctest.h>

#include <random>

using namespace ionweave;
using testing::beryllium;

namespace {

// Independent re-evaluation of the multimode sum for uniform Rabi rates.
double j_oracle(const Chain& c, double rabi, double mu, int i, int j)
{
    const double w_mu = 2 * std::numbers::pi * mu;
    const double om = 2 * std::numbers::pi * rabi;
    double s = 0.0;
    for (Eigen::Index m = 0; m < c.spectrum.size(); ++m) {
        const double wm = 2 * std::numbers::pi * c.spectrum.frequencies[m];
        s += c.eta.eta(i, m) * c.eta.eta(j, m) * wm / (w_mu * w_mu - wm * wm);
    }
    return om * om * s;
}

Schedule plaquette_schedule()
{
    Schedule s;
    s.layers = {LaserLayer{0, 107.6e3, 9.29e-6, 0.0, 1e6}, LaserLayer{2, -71.14e3, 14.06e-6, 0.0, 1e6}};
    return s;
}

} // namespace

TEST_CASE("coupling matrix equals the multimode sum")
{
    const Chain c = solve_chain(beryllium(5));
    const double mu = c.spectrum.frequencies[2] + 37e3;
    const std::vector<double> rabi(5, 0.8e6);
    const CouplingMatrix j = coupling_matrix(c.spectrum, c.eta, rabi, mu);
    for (int a = 0; a < 5; ++a) {
        CHECK(j(a, a) == 0.0);
        for (int b = 0; b < 5; ++b) {
            CHECK(j(a, b) == j(b, a));
            if (a != b) CHECK(j(a, b) == doctest::Approx(j_oracle(c, 0.8e6, mu, a, b)).epsilon(1e-12));
        }
    }
}

TEST_CASE("two ions: the COM term dominates and flips sign across the resonance")
{
    const Chain c = solve_chain(beryllium(2));
    const double w1 = c.spectrum.frequencies[0];
    const double spacing = c.spectrum.frequencies[1] - w1;
    const std::vector<double> rabi(2, 1e6);
    const double above = coupling_matrix(c.spectrum, c.eta, rabi, w1 + 0.02 * spacing)(0, 1);
    const double below = coupling_matrix(c.spectrum, c.eta, rabi, w1 - 0.02 * spacing)(0, 1);
    // w_m / (mu^2 - w_m^2) is positive for mu above the mode
    CHECK(above > 0);
    CHECK(below < 0);
    // COM share of the total
    const double om = 2 * std::numbers::pi * 1e6;
    const double mu = 2 * std::numbers::pi * (w1 + 0.02 * spacing);
    const double wc = 2 * std::numbers::pi * w1;
    const double com = om * om * c.eta.eta(0, 0) * c.eta.eta(1, 0) * wc / (mu * mu - wc * wc);
    CHECK(std::abs(com) > 0.9 * std::abs(above));
}

TEST_CASE("four ions: sign patterns near modes 1 and 3")
{
    const Chain c = solve_chain(beryllium(4));
    const std::vector<double> rabi(4, 1e6);
    const double spacing = c.spectrum.min_spacing();
    const CouplingMatrix j3 = coupling_matrix(c.spectrum, c.eta, rabi, c.spectrum.frequencies[2] - 0.05 * spacing);
    CHECK(j3(0, 3) * j3(0, 1) < 0);
    CHECK(j3(1, 2) * j3(0, 1) < 0);
    CHECK(j3(1, 2) * j3(2, 3) < 0);
    CHECK(j3(0, 3) * j3(2, 3) < 0);

    const CouplingMatrix j1 = coupling_matrix(c.spectrum, c.eta, rabi, c.spectrum.frequencies[0] + 0.02 * spacing);
    const Eigen::VectorXd up = j1.upper_triangle();
    CHECK(up.minCoeff() > 0.95 * up.maxCoeff());
}

TEST_CASE("near resonance the coupling approaches the rank-one pattern")
{
    for (int n : {3, 5, 8}) {
        const Chain c = solve_chain(beryllium(n));
        const std::vector<double> rabi(static_cast<std::size_t>(n), 1e6);
        for (int m = 0; m < n; ++m) {
            const double d = 0.009 * c.spectrum.min_spacing();
            const CouplingMatrix j = coupling_matrix(c.spectrum, c.eta, rabi, c.spectrum.frequencies[m] + d);
            CHECK(overlap_cosine(j, mode_pattern(c.spectrum, m)) > 0.999);
        }
    }
}

TEST_CASE("drives inside the guard band are rejected")
{
    const Chain c = solve_chain(beryllium(3));
    const std::vector<double> rabi(3, 1e6);
    CHECK_THROWS_AS(coupling_matrix(c.spectrum, c.eta, rabi, c.spectrum.frequencies[1] + 0.5), ResonanceError);
    CHECK_THROWS_AS(coupling_matrix(c.spectrum, c.eta, std::vector<double>(2, 1e6), 2e6), ValidationError);
}

TEST_CASE("effective coupling is the duration-weighted mean")
{
    const Chain c = solve_chain(beryllium(4));
    const Schedule s = plaquette_schedule();
    std::vector<CouplingMatrix> per;
    for (const auto& l : s.layers) per.push_back(layer_coupling(c.spectrum, c.eta, l));

    Schedule one;
    one.layers = {s.layers[0]};
    CHECK(effective_coupling(one, std::span(per).first(1)) == per[0]);

    Schedule twice;
    twice.layers = {s.layers[0], s.layers[0]};
    const std::vector<CouplingMatrix> same{per[0], per[0]};
    CHECK((effective_coupling(twice, same).values() - per[0].values()).cwiseAbs().maxCoeff() <
          1e-12 * per[0].max_abs());

    const Eigen::MatrixXd expected = (per[0].values() * 9.29e-6 + per[1].values() * 14.06e-6) / (9.29e-6 + 14.06e-6);
    const CouplingMatrix eff = effective_coupling(s, per);
    CHECK((eff.values() - expected).cwiseAbs().maxCoeff() < 1e-12 * expected.cwiseAbs().maxCoeff());

    // reordering and splitting
    Schedule rev;
    rev.layers = {s.layers[1], s.layers[0]};
    const std::vector<CouplingMatrix> per_rev{per[1], per[0]};
    CHECK((effective_coupling(rev, per_rev).values() - eff.values()).cwiseAbs().maxCoeff() < 1e-12 * eff.max_abs());
    Schedule split = s;
    split.layers[0].duration /= 2;
    split.layers.insert(split.layers.begin(), split.layers[0]);
    const std::vector<CouplingMatrix> per_split{per[0], per[0], per[1]};
    CHECK((effective_coupling(split, per_split).values() - eff.values()).cwiseAbs().maxCoeff() < 1e-12 * eff.max_abs());

    Schedule mixed = s;
    mixed.layers[1].phase = -std::numbers::pi / 2;
    CHECK_THROWS_AS(effective_coupling(mixed, per), ValidationError);
}

TEST_CASE("the two-layer four-ion schedule yields the plaquette")
{
    const Chain c = solve_chain(beryllium(4, 1.3e6));
    const Schedule s = plaquette_schedule();

    // Near-resonant part alone: weights tau / (w_m delta) on the addressed patterns.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(4);
    for (const auto& l : s.layers) w[l.mode] += l.duration / (c.spectrum.frequencies[l.mode] * l.detuning);
    const CouplingMatrix near = weighted_pattern(c.spectrum, w).max_normalized();
    CHECK(std::abs(near(0, 3)) < 0.05);
    CHECK(std::abs(near(1, 2)) < 0.05);
    for (auto [a, b] : {std::pair{0, 1}, {0, 2}, {1, 3}, {2, 3}}) CHECK(std::abs(near(a, b) - 1.0) < 0.05);

    // Full multimode model: off-resonant modes leave a visible J_23 residue.
    const CouplingMatrix full = schedule_effective_coupling(s, c.spectrum, c.eta).max_normalized();
    CHECK(std::abs(full(0, 3)) < 0.05);
    CHECK(std::abs(full(1, 2)) < 0.1);
    for (auto [a, b] : {std::pair{0, 1}, {0, 2}, {1, 3}, {2, 3}}) CHECK(std::abs(full(a, b)) > 0.94);
    CHECK(fidelity(full, cross_polytope(4).coupling).fidelity >= 0.9993);
}

TEST_CASE("loop closure products")
{
    const Chain c = solve_chain(beryllium(4));
    Schedule s;
    s.layers = {LaserLayer{0, 107.6e3, 9.29e-6, 0, 1e6}};
    const auto r = loop_closure_report(s, c.spectrum);
    CHECK(r.layers[0].products[0] == doctest::Approx(0.999604).epsilon(1e-9));
    CHECK(r.addressed_closed());

    s.layers = {LaserLayer{2, -100e3, 10.0e-6, 0, 1e6}};
    CHECK(loop_closure_report(s, c.spectrum).layers[0].products[2] == doctest::Approx(-1.0).epsilon(1e-12));

    Schedule doubled = s;
    doubled.layers[0].duration *= 2;
    const auto a = loop_closure_report(s, c.spectrum).layers[0].products;
    const auto b = loop_closure_report(doubled, c.spectrum).layers[0].products;
    for (std::size_t m = 0; m < a.size(); ++m) CHECK(b[m] == doctest::Approx(2 * a[m]).epsilon(1e-12));
    CHECK(loop_closure_report(doubled, c.spectrum).addressed_closed());

    s.layers = {LaserLayer{0, 107.6e3, 7e-6, 0, 1e6}};
    CHECK_FALSE(loop_closure_report(s, c.spectrum).addressed_closed());
}

TEST_CASE("fidelity metric properties")
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 8;
        const CouplingMatrix a(testing::random_symmetric(n, rng), false);
        const CouplingMatrix b(testing::random_symmetric(n, rng), false);
        // oracle: explicit sums over i<j
        double ab = 0, aa = 0, bb = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                ab += a(i, j) * b(i, j);
                aa += a(i, j) * a(i, j);
                bb += b(i, j) * b(i, j);
            }
        const FidelityReport r = fidelity(a, b);
        CHECK(r.fidelity == doctest::Approx(0.5 * (1 + ab / std::sqrt(aa * bb))).epsilon(1e-12));
        CHECK(fidelity(b, a).fidelity == doctest::Approx(r.fidelity).epsilon(1e-12));
        CHECK(std::abs(fidelity(a, a).fidelity - 1.0) < 1e-12);
        CHECK(std::abs(fidelity(a, a.scaled(-1.0)).fidelity) < 1e-12);
        CHECK(std::abs(fidelity(a.scaled(3.0), a.scaled(0.2)).fidelity - 1.0) < 1e-12);
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        CHECK(std::abs(fidelity(a.permuted(perm), b.permuted(perm)).fidelity - r.fidelity) < 1e-12);
        CHECK(r.implemented.max_abs() == doctest::Approx(1.0));
        CHECK(r.target.max_abs() == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(fidelity(CouplingMatrix(3), cross_polytope(4).coupling), ValidationError);
    CHECK_THROWS_AS(fidelity(CouplingMatrix(4), cross_polytope(4).coupling), ValidationError);
}

TEST_CASE("coupling matrices validate their input")
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    m(0, 1) = 1;
    CHECK_THROWS_AS(CouplingMatrix(m, false), ValidationError);
    m(1, 0) = 1;
    m(2, 2) = 0.1;
    CHECK_THROWS_AS(CouplingMatrix(m, false), ValidationError);
    CHECK_THROWS_AS(CouplingMatrix(Eigen::MatrixXd::Zero(2, 3), false), ValidationError);
    CHECK_THROWS_AS(CouplingMatrix(3).max_normalized(), ValidationError);
}
