#include "ionweave/sideband.hpp"

#include "ionweave/errors.hpp"
#include "ionweave/units.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <string>

namespace ionweave {

namespace {

void check_inputs(const Eigen::VectorXd& eta, std::span<const double> rabi, int n_max)
{
    const Eigen::Index n = eta.size();
    if (n < 1 || n > 12) throw ValidationError("bsb: ion count out of range [1, 12]");
    if (static_cast<Eigen::Index>(rabi.size()) != n) throw ValidationError("bsb: need one Rabi rate per ion");
    if (n_max < 1) throw ValidationError("bsb: n_max must be >= 1");
    for (double r : rabi)
        if (!std::isfinite(r) || r < 0) throw ValidationError("bsb: Rabi rates must be finite and >= 0");
}

std::uint64_t ion_mask(int ions, int i) { return std::uint64_t{1} << (ions - 1 - i); }

double thermal_weight(double mean_n, int n)
{
    if (mean_n == 0.0) return n == 0 ? 1.0 : 0.0;
    return std::pow(mean_n / (mean_n + 1.0), n) / (mean_n + 1.0);
}

// Weighted sum of branch traces, normalized by the retained thermal weight.
BsbTraces combine(const std::vector<std::vector<std::vector<double>>>& branches, const ThermalWeights& tw,
                  std::span<const double> times, int ions)
{
    BsbTraces out;
    out.times.assign(times.begin(), times.end());
    out.thermal = tw;
    out.n_max = tw.n_max();
    const double total = tw.captured();
    out.ion_down.assign(times.size(), std::vector<double>(static_cast<std::size_t>(ions), 0.0));
    for (std::size_t n = 0; n < branches.size(); ++n) {
        const double p = tw.weights[n] / total;
        if (p == 0.0) continue;
        for (std::size_t k = 0; k < times.size(); ++k)
            for (int i = 0; i < ions; ++i) out.ion_down[k][i] += p * branches[n][k][i];
    }
    for (const auto& row : out.ion_down) {
        double s = 0.0;
        for (double v : row) s += v;
        out.average_down.push_back(s / ions);
    }
    return out;
}

} // namespace

double ThermalWeights::captured() const
{
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

ThermalWeights thermal_weights(double mean_n, int n_max)
{
    if (!(mean_n >= 0) || !std::isfinite(mean_n)) throw ValidationError("mean phonon number must be >= 0");
    if (n_max < 0) throw ValidationError("n_max must be >= 0");
    ThermalWeights tw;
    tw.mean_n = mean_n;
    for (int n = 0; n <= n_max; ++n) tw.weights.push_back(thermal_weight(mean_n, n));
    return tw;
}

int default_fock_cutoff(double mean_n)
{
    if (!(mean_n >= 0)) throw ValidationError("mean phonon number must be >= 0");
    // tail beyond n is (nbar/(nbar+1))^(n+1)
    const double q = mean_n / (mean_n + 1.0);
    int n = 0;
    while (std::pow(q, n + 1) >= 1e-6) ++n;
    return std::max(8, n);
}

Eigen::MatrixXd bsb_hamiltonian(const Eigen::VectorXd& eta_column, std::span<const double> rabi_per_ion, int n_max)
{
    check_inputs(eta_column, rabi_per_ion, n_max);
    const int ions = static_cast<int>(eta_column.size());
    const Eigen::Index levels = n_max + 1;
    const Eigen::Index dim = (Eigen::Index{1} << ions) * levels;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index s = 0; s < (Eigen::Index{1} << ions); ++s) {
        for (int i = 0; i < ions; ++i) {
            const auto m = static_cast<Eigen::Index>(ion_mask(ions, i));
            if (s & m) continue; // ion i down in s
            const double g = eta_column[i] * to_angular(rabi_per_ion[i]);
            // sigma_+ a^dag: |down, n> -> sqrt(n+1) |up, n+1>
            for (Eigen::Index n = 0; n < n_max; ++n) {
                const double v = g * std::sqrt(static_cast<double>(n + 1));
                h((s | m) * levels + n + 1, s * levels + n) += v;
                h(s * levels + n, (s | m) * levels + n + 1) += v;
            }
        }
    }
    return h;
}

Eigen::VectorXd excitation_number(int qubits, int n_max)
{
    const Eigen::Index levels = n_max + 1;
    Eigen::VectorXd k((Eigen::Index{1} << qubits) * levels);
    for (Eigen::Index s = 0; s < (Eigen::Index{1} << qubits); ++s)
        for (Eigen::Index n = 0; n < levels; ++n)
            k[s * levels + n] = std::popcount(static_cast<std::uint64_t>(s)) - static_cast<double>(n);
    return k;
}

std::vector<std::vector<double>> bsb_branch(const Eigen::VectorXd& eta_column, std::span<const double> rabi_per_ion,
                                            std::span<const double> times, int n, int n_max, double* top_population)
{
    check_inputs(eta_column, rabi_per_ion, n_max);
    if (n < 0 || n > n_max) throw ValidationError("bsb: Fock branch outside [0, n_max]");
    const int ions = static_cast<int>(eta_column.size());

    // The block reachable from |down...down, n>: spin configs s carrying
    // n + popcount(s) phonons, limited by the cutoff.
    std::vector<std::uint64_t> configs;
    std::vector<int> slot(std::size_t{1} << ions, -1);
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << ions); ++s) {
        if (n + std::popcount(s) > n_max) continue;
        slot[s] = static_cast<int>(configs.size());
        configs.push_back(s);
    }
    const auto dim = static_cast<Eigen::Index>(configs.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index a = 0; a < dim; ++a) {
        const std::uint64_t s = configs[a];
        const int phonons = n + std::popcount(s);
        for (int i = 0; i < ions; ++i) {
            const std::uint64_t m = ion_mask(ions, i);
            if ((s & m) || slot[s | m] < 0) continue;
            const double v = eta_column[i] * to_angular(rabi_per_ion[i]) * std::sqrt(phonons + 1.0);
            h(slot[s | m], a) += v;
            h(a, slot[s | m]) += v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("bsb: block diagonalization failed");
    const Eigen::VectorXd c0 = es.eigenvectors().row(0).transpose(); // V^T e_0, config 0 is all down

    std::vector<std::vector<double>> out;
    double top = 0.0;
    for (double t : times) {
        Eigen::VectorXcd c(dim);
        for (Eigen::Index k = 0; k < dim; ++k) c[k] = c0[k] * std::polar(1.0, -es.eigenvalues()[k] * t);
        const Eigen::VectorXcd psi = es.eigenvectors().cast<std::complex<double>>() * c;
        std::vector<double> down(static_cast<std::size_t>(ions), 0.0);
        double at_top = 0.0;
        for (Eigen::Index a = 0; a < dim; ++a) {
            const double p = std::norm(psi[a]);
            for (int i = 0; i < ions; ++i)
                if (!(configs[a] & ion_mask(ions, i))) down[i] += p;
            if (n + std::popcount(configs[a]) == n_max) at_top += p;
        }
        top = std::max(top, at_top);
        out.push_back(std::move(down));
    }
    if (top_population) *top_population = top;
    return out;
}

BsbTraces bsb_evolution(const Eigen::VectorXd& eta_column, std::span<const double> rabi_per_ion,
                        std::span<const double> times, double mean_n, const BsbOptions& options)
{
    int n_max = options.n_max > 0 ? options.n_max : default_fock_cutoff(mean_n);
    for (;;) {
        if (n_max > options.n_max_cap)
            throw NumericalError("bsb: Fock cutoff would exceed the cap of " + std::to_string(options.n_max_cap));
        const ThermalWeights tw = thermal_weights(mean_n, n_max);
        std::vector<std::vector<std::vector<double>>> branches(static_cast<std::size_t>(n_max + 1));
        double top = 0.0;
        for (int n = 0; n <= n_max; ++n) {
            if (tw.weights[n] == 0.0) {
                branches[n].assign(times.size(), std::vector<double>(eta_column.size(), 0.0));
                continue;
            }
            double branch_top = 0.0;
            branches[n] = bsb_branch(eta_column, rabi_per_ion, times, n, n_max, &branch_top);
            top += tw.weights[n] / tw.captured() * branch_top;
        }
        if (top < options.truncation_tolerance) {
            BsbTraces out = combine(branches, tw, times, static_cast<int>(eta_column.size()));
            out.max_top_population = top;
            return out;
        }
        n_max = n_max < options.n_max_cap ? std::min(2 * n_max, options.n_max_cap) : n_max + 1;
    }
}

BsbTraces bsb_evolution_reference(const Eigen::VectorXd& eta_column, std::span<const double> rabi_per_ion,
                                  std::span<const double> times, double mean_n, int n_max)
{
    const Eigen::MatrixXd h = bsb_hamiltonian(eta_column, rabi_per_ion, n_max);
    const int ions = static_cast<int>(eta_column.size());
    const Eigen::Index levels = n_max + 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("bsb: diagonalization failed");
    const Eigen::MatrixXcd v = es.eigenvectors().cast<std::complex<double>>();
    const ThermalWeights tw = thermal_weights(mean_n, n_max);

    std::vector<std::vector<std::vector<double>>> branches(static_cast<std::size_t>(levels));
    double top = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        const Eigen::VectorXcd c0 = v.adjoint().col(n); // initial basis index 0 * levels + n
        double branch_top = 0.0;
        for (double t : times) {
            Eigen::VectorXcd c(c0.size());
            for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = std::polar(1.0, -es.eigenvalues()[k] * t) * c0[k];
            const Eigen::VectorXcd psi = v * c;
            std::vector<double> down(static_cast<std::size_t>(ions), 0.0);
            double at_top = 0.0;
            for (Eigen::Index idx = 0; idx < psi.size(); ++idx) {
                const double p = std::norm(psi[idx]);
                const auto s = static_cast<std::uint64_t>(idx / levels);
                for (int i = 0; i < ions; ++i)
                    if (!(s & ion_mask(ions, i))) down[i] += p;
                if (idx % levels == n_max) at_top += p;
            }
            branch_top = std::max(branch_top, at_top);
            branches[n].push_back(std::move(down));
        }
        top += tw.weights[n] / tw.captured() * branch_top;
    }
    BsbTraces out = combine(branches, tw, times, ions);
    out.max_top_population = top;
    return out;
}

} // namespace ionweave
