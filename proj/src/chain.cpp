#include "ionweave/chain.hpp"

#include "ionweave/errors.hpp"
#include "ionweave/units.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ionweave {

namespace {

constexpr double kGradientTolerance = 1e-12;
constexpr int kMaxNewtonIterations = 200;
constexpr int kMaxStepHalvings = 60;

bool strictly_ascending(const Eigen::VectorXd& u)
{
    for (Eigen::Index i = 1; i < u.size(); ++i)
        if (!(u[i] > u[i - 1])) return false;
    return true;
}

} // namespace

void TrapConfig::validate() const
{
    if (ion_count < 1) throw ValidationError("trap.ions must be >= 1");
    if (!(axial_com_frequency > 0)) throw ValidationError("trap.axial_frequency must be > 0");
    if (!(ion_mass > 0)) throw ValidationError("trap.ion_mass must be > 0");
    if (!(raman_wavevector > 0)) throw ValidationError("trap.raman_wavevector must be > 0");
    if (!(quartic_coefficient >= 0) || !std::isfinite(quartic_coefficient))
        throw ValidationError("trap.quartic must be a finite value >= 0");
}

double TrapConfig::axial_angular_frequency() const { return to_angular(axial_com_frequency); }

double TrapConfig::length_scale() const
{
    using namespace constants;
    const double wz = axial_angular_frequency();
    const double num = elementary_charge * elementary_charge;
    const double den = 4.0 * std::numbers::pi * vacuum_permittivity * ion_mass * wz * wz;
    return std::cbrt(num / den);
}

std::vector<double> EquilibriumPositions::physical() const
{
    std::vector<double> x(dimensionless.size());
    std::transform(dimensionless.begin(), dimensionless.end(), x.begin(),
                   [&](double u) { return u * length_scale; });
    return x;
}

Eigen::VectorXd ModeSpectrum::angular_frequencies() const { return constants::two_pi * frequencies; }

double ModeSpectrum::min_spacing() const
{
    double gap = 0.0;
    for (Eigen::Index m = 1; m < frequencies.size(); ++m) {
        const double d = frequencies[m] - frequencies[m - 1];
        gap = (m == 1) ? d : std::min(gap, d);
    }
    return gap;
}

bool LambDickeMatrix::within_lamb_dicke_regime() const { return eta.cwiseAbs().maxCoeff() < 1.0; }

double potential_energy(const Eigen::VectorXd& u, double alpha)
{
    double v = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double u2 = u[i] * u[i];
        v += 0.5 * u2 + 0.25 * alpha * u2 * u2;
        for (Eigen::Index j = i + 1; j < u.size(); ++j) v += 1.0 / std::abs(u[i] - u[j]);
    }
    return v;
}

Eigen::VectorXd potential_gradient(const Eigen::VectorXd& u, double alpha)
{
    const Eigen::Index n = u.size();
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double gi = u[i] + alpha * u[i] * u[i] * u[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = u[i] - u[j];
            gi -= (d > 0 ? 1.0 : -1.0) / (d * d);
        }
        g[i] = gi;
    }
    return g;
}

Eigen::MatrixXd potential_hessian(const Eigen::VectorXd& u, double alpha)
{
    const Eigen::Index n = u.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = 1.0 + 3.0 * alpha * u[i] * u[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            const double c = 2.0 / std::pow(std::abs(u[i] - u[j]), 3);
            h(i, j) = -c;
            h(i, i) += c;
        }
    }
    return h;
}

EquilibriumPositions equilibrium_positions(const TrapConfig& config)
{
    config.validate();
    const int n = config.ion_count;
    const double alpha = config.quartic_coefficient;

    // uniform seed, spacing close to the harmonic-chain minimum spacing
    const double spacing = n > 1 ? 2.0 / std::pow(static_cast<double>(n), 0.56) : 0.0;
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u[i] = (i - 0.5 * (n - 1)) * spacing;

    Eigen::VectorXd g = potential_gradient(u, alpha);
    double residual = g.lpNorm<Eigen::Infinity>();
    int iter = 0;
    while (residual >= kGradientTolerance && iter < kMaxNewtonIterations) {
        ++iter;
        const Eigen::VectorXd step = potential_hessian(u, alpha).ldlt().solve(-g);
        double lambda = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= kMaxStepHalvings; ++halving, lambda *= 0.5) {
            const Eigen::VectorXd trial = u + lambda * step;
            if (!strictly_ascending(trial)) continue;
            const Eigen::VectorXd trial_g = potential_gradient(trial, alpha);
            const double trial_residual = trial_g.lpNorm<Eigen::Infinity>();
            if (trial_residual < residual || halving == kMaxStepHalvings) {
                u = trial;
                g = trial_g;
                residual = trial_residual;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (!(residual < kGradientTolerance)) {
        std::ostringstream os;
        os << "equilibrium solver did not converge for N=" << n << ", alpha=" << alpha
           << ": gradient residual " << residual << " after " << iter << " iterations";
        throw NumericalError(os.str());
    }

    EquilibriumPositions eq;
    eq.dimensionless.assign(u.data(), u.data() + n);
    eq.length_scale = config.length_scale();
    eq.gradient_residual = residual;
    eq.iterations = iter;
    return eq;
}

ModeSpectrum normal_modes(const TrapConfig& config, const EquilibriumPositions& eq)
{
    config.validate();
    if (static_cast<int>(eq.size()) != config.ion_count)
        throw ValidationError("equilibrium positions do not match trap.ions");

    const Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(eq.dimensionless.data(),
                                                                static_cast<Eigen::Index>(eq.size()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(potential_hessian(u, config.quartic_coefficient));
    if (solver.info() != Eigen::Success) throw NumericalError("Hessian eigendecomposition failed");

    ModeSpectrum spec;
    spec.eigenvalues = solver.eigenvalues();
    spec.eigenvectors = solver.eigenvectors();
    if (spec.eigenvalues.minCoeff() <= 0.0)
        throw NumericalError("unstable configuration: non-positive Hessian eigenvalue");
    spec.frequencies = config.axial_com_frequency * spec.eigenvalues.cwiseSqrt();

    // Sign convention: the first component reaching the column's max magnitude is positive.
    for (Eigen::Index m = 0; m < spec.eigenvectors.cols(); ++m) {
        auto col = spec.eigenvectors.col(m);
        const double peak = col.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            if (std::abs(col[i]) >= peak * (1.0 - 1e-9)) {
                if (col[i] < 0) col = -col;
                break;
            }
        }
    }
    return spec;
}

LambDickeMatrix lamb_dicke(const TrapConfig& config, const ModeSpectrum& spectrum)
{
    config.validate();
    const Eigen::VectorXd w = spectrum.angular_frequencies();
    LambDickeMatrix ld;
    ld.eta = spectrum.eigenvectors;
    for (Eigen::Index m = 0; m < w.size(); ++m) {
        const double scale = config.raman_wavevector * std::sqrt(constants::hbar / (2.0 * config.ion_mass * w[m]));
        ld.eta.col(m) *= scale;
    }
    return ld;
}

Chain solve_chain(const TrapConfig& config)
{
    Chain c;
    c.config = config;
    c.positions = equilibrium_positions(config);
    c.spectrum = normal_modes(config, c.positions);
    c.eta = lamb_dicke(config, c.spectrum);
    return c;
}

} // namespace ionweave
